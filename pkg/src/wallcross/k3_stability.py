"""Central charges Z_{β,ω} on a K3 surface, wall loci near the large volume limit,
twisted slopes and the alcove-indexed chambers around a contractible collection.

Everything is exact: phases are compared through signs of cross products, never
through floating point angles.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, gcd, isqrt
from typing import Sequence

from .lattice_core import (
    LatticeError,
    MukaiVector,
    SurfaceConfig,
    Vector,
    add,
    as_fraction,
    format_rational,
    hilbert_vector,
    mukai_pairing,
    rational_sqrt,
    primitive_integer,
    scale,
    signature,
    IntegralLattice,
    solve_rational,
    sub,
    vec,
)
from .parallel import pmap
from .root_systems import RootSystem

IntVec = tuple[int, ...]


class StabilityError(ValueError):
    pass


class GapPointError(StabilityError):
    """A central charge vanishes, so (β, ω) is not a stability condition."""


@dataclass(frozen=True)
class ComplexRational:
    re: Fraction
    im: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "re", as_fraction(self.re))
        object.__setattr__(self, "im", as_fraction(self.im))

    def __add__(self, other: ComplexRational) -> ComplexRational:
        return ComplexRational(self.re + other.re, self.im + other.im)

    def __mul__(self, other: ComplexRational) -> ComplexRational:
        return ComplexRational(
            self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re
        )

    def conj(self) -> ComplexRational:
        return ComplexRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


@dataclass(frozen=True)
class KahlerPoint:
    beta: Vector
    omega: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", vec(self.beta))
        object.__setattr__(self, "omega", vec(self.omega))
        if len(self.beta) != len(self.omega):
            raise StabilityError("beta and omega must have the same length")

    def shifted(self, L: Sequence[object]) -> KahlerPoint:
        """The point (β − L, ω)."""
        return KahlerPoint(sub(self.beta, vec(L)), self.omega)


@dataclass(frozen=True)
class LimitParams:
    N: Fraction
    xi: Fraction
    V: Fraction
    collection: str | tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        for name in ("N", "xi", "V"):
            val = as_fraction(getattr(self, name))
            if val <= 0:
                raise StabilityError(f"{name} must be positive")
            object.__setattr__(self, name, val)
        if self.collection is not None and not isinstance(self.collection, str):
            object.__setattr__(self, "collection", tuple(self.collection))


def _json_rational(q: Fraction) -> int | str:
    return int(q) if q.denominator == 1 else format_rational(q)


def mukai_json(v: MukaiVector) -> list[object]:
    return [_json_rational(v.r), [_json_rational(a) for a in v.c1], _json_rational(v.s)]


@dataclass(frozen=True)
class WallDescriptor:
    v: MukaiVector
    w: MukaiVector
    kind: str  # "hilbert-chow", "curve-wall" or "boundary"
    curve: Vector | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("hilbert-chow", "curve-wall", "boundary"):
            raise StabilityError(f"unknown wall kind {self.kind!r}")
        if not self.w.is_integral():
            raise StabilityError("wall class must be integral")
        ints = [int(a) for a in self.w.as_tuple()]
        if gcd(*ints) != 1:
            raise StabilityError("wall class must be primitive")

    def to_dict(self) -> dict[str, object]:
        d: dict[str, object] = {"kind": self.kind, "v": mukai_json(self.v), "w": mukai_json(self.w)}
        if self.curve is not None:
            d["curve"] = [_json_rational(a) for a in self.curve]
        if self.k is not None:
            d["k"] = self.k
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def sort_key(self) -> tuple:
        kinds = {"hilbert-chow": 0, "curve-wall": 1, "boundary": 2}
        return (kinds[self.kind], self.curve or (), -(self.k or 0), self.w.as_tuple())


# named Mukai vectors of the basic sheaves


def skyscraper(S: SurfaceConfig) -> MukaiVector:
    """k(x): (0, 0, 1)."""
    return MukaiVector(0, (0,) * S.rank, 1)


def curve_sheaf(S: SurfaceConfig, C: Sequence[object], k: int) -> MukaiVector:
    """𝒪_C(k) for a −2 curve C: (0, C, 1 + k)."""
    return MukaiVector(0, C, 1 + k)


def structure_sheaf(S: SurfaceConfig) -> MukaiVector:
    return MukaiVector(1, (0,) * S.rank, 1)


def line_bundle(S: SurfaceConfig, D: Sequence[object]) -> MukaiVector:
    """ℒ with c₁ = D: (1, D, 1 + D²/2)."""
    return MukaiVector(1, D, 1 + S.ns.norm(D) / 2)


def ideal_sheaf(S: SurfaceConfig, n: int) -> MukaiVector:
    """ℐ_Y for Y of length n: (1, 0, 1 − n)."""
    return hilbert_vector(S, n)


def twisted_ideal(S: SurfaceConfig, D: Sequence[object], n: int) -> MukaiVector:
    """ℒ_Y = ℒ ⊗ ℐ_Y: (1, D, 1 + D²/2 − n)."""
    return MukaiVector(1, D, 1 + S.ns.norm(D) / 2 - n)


# central charge and phases


def central_charge(S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector) -> ComplexRational:
    b, w = kp.beta, kp.omega
    ns = S.ns
    re = ns.pair(v.c1, b) - v.s - v.r * (ns.norm(b) - ns.norm(w)) / 2
    im = ns.pair(sub(v.c1, scale(v.r, b)), w)
    return ComplexRational(re, im)


def _nonzero_charge(S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector) -> ComplexRational:
    z = central_charge(S, kp, v)
    if z.is_zero():
        raise GapPointError(f"Z({v}) vanishes at this point")
    return z


def on_wall(S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector, w: MukaiVector) -> bool:
    """Z(v) and Z(w) are positive real multiples of each other."""
    z = _nonzero_charge(S, kp, v) * _nonzero_charge(S, kp, w).conj()
    return z.im == 0 and z.re > 0


def _in_slice(z: ComplexRational) -> bool:
    """Z lies in the upper half plane or on the negative real axis, i.e. phase in (0,1]."""
    return z.im > 0 or (z.im == 0 and z.re < 0)


def phase_compare(S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector, w: MukaiVector) -> int:
    """Sign of φ(v) − φ(w) for phases in (0, 1]."""
    zv = _nonzero_charge(S, kp, v)
    zw = _nonzero_charge(S, kp, w)
    if not (_in_slice(zv) and _in_slice(zw)):
        raise StabilityError("central charge outside the (0,1] half plane; negate the class")
    # both angles lie in (0, π], so their difference is in (−π, π) and
    # sign(Im(zv·conj(zw))) = sign(sin(φv − φw)) decides
    cross = zv.im * zw.re - zv.re * zw.im
    return (cross > 0) - (cross < 0)


# collections and the limit region


def collection_roots(S: SurfaceConfig, collection: str | Sequence[str] | None) -> list[Vector]:
    """Positive root classes Σ aᵢCᵢ (C² = −2) of a contractible collection."""
    curves = S.collection(collection)
    if not curves:
        return []
    cartan = [[-int(S.ns.pair(a, b)) for b in curves] for a in curves]
    R = RootSystem.finite(cartan)
    out = []
    for coeffs in R.positive_roots():
        c: Vector = (Fraction(0),) * S.rank
        for a, C in zip(coeffs, curves):
            c = add(c, scale(a, C))
        out.append(c)
    return out


@lru_cache(maxsize=64)
def _special_classes(gram: tuple[tuple[int, ...], ...], radius: int) -> tuple[tuple, tuple]:
    L = IntegralLattice(gram)
    iso, minus2 = [], []
    for x in itertools.product(range(-radius, radius + 1), repeat=L.rank):
        if not any(x):
            continue
        q = L.norm(x)
        if q == 0 and gcd(*x) == 1:
            iso.append(x)
        elif q == -2:
            minus2.append(x)
    return tuple(iso), tuple(minus2)


@dataclass(frozen=True)
class RegionReport:
    ok: bool
    reasons: tuple[str, ...]
    search_radius: int

    def __bool__(self) -> bool:
        return self.ok


DEFAULT_RADIUS = 4


def in_limit_region(
    S: SurfaceConfig, kp: KahlerPoint, lp: LimitParams, radius: int = DEFAULT_RADIUS
) -> RegionReport:
    """Check the large volume limit inequalities.

    The quantifiers over isotropic and −2 classes range over integer classes
    with all coordinates in [−radius, radius]; the radius is returned with the
    verdict.
    """
    ns = S.ns
    b, w = kp.beta, kp.omega
    N, xi, V = lp.N, lp.xi, lp.V
    w2 = ns.norm(w)
    reasons: list[str] = []
    if w2 <= 0:
        reasons.append("ω²>0 violated")
    if any(ns.pair(w, C) < 0 for C in S.curves.values()):
        reasons.append("ω not nef")
    curves = S.collection(lp.collection)
    if any(abs(ns.pair(C, b)) >= N for C in curves):
        reasons.append("|C·β|<N violated")
    if abs(ns.norm(b)) >= N:
        reasons.append("|β²|<N violated")
    bw = ns.pair(b, w)
    if not (-N < bw <= 0):
        reasons.append("−N<β·ω≤0 violated")
    if w2 <= V:
        reasons.append("ω²>V violated")
    iso, minus2 = _special_classes(ns.gram, radius)
    for q in iso:
        if abs(ns.pair(w, q)) <= xi:
            reasons.append(f"isotropic class {q} has |ω·q|≤ξ")
            break
    in_c = {tuple(r) for r in collection_roots(S, lp.collection)}
    in_c |= {tuple(-a for a in r) for r in in_c}
    for a in minus2:
        if tuple(Fraction(x) for x in a) in in_c:
            continue
        if abs(ns.pair(w, a)) <= xi:
            reasons.append(f"−2 class {a} has |ω·α|≤ξ")
            break
    for C in curves:
        cw = ns.pair(C, w)
        if cw < 0:
            reasons.append("0≤C·ω violated")
        elif w2 > 0 and cw >= N / w2:
            reasons.append("exceptional curve too large")
    return RegionReport(not reasons, tuple(dict.fromkeys(reasons)), radius)


def gap_test(
    S: SurfaceConfig, kp: KahlerPoint, collection: str | Sequence[str] | None
) -> Vector | None:
    """A root class C of the collection with ω·C = 0 and β·C ∈ ℤ, if one exists."""
    for C in collection_roots(S, collection):
        if S.ns.pair(kp.omega, C) == 0 and S.ns.pair(kp.beta, C).denominator == 1:
            return C
    return None


# walls


HC_CLASS_S = -1  # the Hilbert–Chow wall compares v with (0, 0, −1)


def _hc_descriptor(S: SurfaceConfig, v: MukaiVector) -> WallDescriptor:
    return WallDescriptor(v, MukaiVector(0, (0,) * S.rank, HC_CLASS_S), "hilbert-chow")


def _curve_walls(
    S: SurfaceConfig, v: MukaiVector, D: Sequence[object], n: int, collection
) -> list[WallDescriptor]:
    pairs = [(C, k) for C in collection_roots(S, collection) for k in range(0, -n, -1)]

    def make(pair: tuple[Vector, int]) -> WallDescriptor:
        C, k = pair
        shift = S.ns.pair(C, D)
        return WallDescriptor(v, MukaiVector(0, C, shift + k), "curve-wall", C, k)

    return sorted(pmap(make, pairs), key=WallDescriptor.sort_key)


def hilb_walls(
    S: SurfaceConfig, n: int, collection: str | Sequence[str] | None
) -> list[WallDescriptor]:
    """Hilbert–Chow wall plus W(C, k) for root classes C and k = 0, −1, …, 1−n."""
    if n < 2:
        raise StabilityError("hilb_walls needs n ≥ 2")
    v = hilbert_vector(S, n)
    return [_hc_descriptor(S, v), *_curve_walls(S, v, (0,) * S.rank, n, collection)]


def twisted_walls(
    S: SurfaceConfig, D: Sequence[object], n: int, collection: str | Sequence[str] | None
) -> list[WallDescriptor]:
    """Walls for v_D = v ⊗ 𝒪(D): the k-slot of each curve wall shifts by C·D."""
    if n < 2:
        raise StabilityError("twisted_walls needs n ≥ 2")
    D = vec(D)
    v = tensor_shift(S, hilbert_vector(S, n), D)
    return [_hc_descriptor(S, v), *_curve_walls(S, v, D, n, collection)]


def tensor_shift(S: SurfaceConfig, v: MukaiVector, L: Sequence[object]) -> MukaiVector:
    """v · ch(ℒ) = (r, C + rL, L·C + s + rL²/2)."""
    L = vec(L)
    ns = S.ns
    return MukaiVector(
        v.r, add(v.c1, scale(v.r, L)), ns.pair(L, v.c1) + v.s + v.r * ns.norm(L) / 2
    )


def tensor_shift_identity(
    S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector, L: Sequence[object]
) -> bool:
    """Z_{β,ω}(v·chℒ) = Z_{β−L,ω}(v)."""
    return central_charge(S, kp, tensor_shift(S, v, L)) == central_charge(S, kp.shifted(L), v)


def twisted_slopes(S: SurfaceConfig, kp: KahlerPoint, v: MukaiVector) -> tuple[Fraction, Fraction]:
    """(μ, ν) = ((c − rβ)·ω / r, (s − c·β) / r)."""
    if v.r <= 0:
        raise StabilityError("twisted slopes need positive rank")
    ns = S.ns
    mu = ns.pair(sub(v.c1, scale(v.r, kp.beta)), kp.omega) / v.r
    nu = (v.s - ns.pair(v.c1, kp.beta)) / v.r
    return mu, nu


def twisted_slope_compare(
    S: SurfaceConfig, kp: KahlerPoint, E: MukaiVector, F: MukaiVector
) -> int:
    a, b = twisted_slopes(S, kp, E), twisted_slopes(S, kp, F)
    return (a > b) - (a < b)


# alcoves around a contractible collection


def alcove_chamber_of(
    S: SurfaceConfig,
    D: Sequence[object],
    s: object,
    kp: KahlerPoint,
    collection: str | Sequence[str] | None,
) -> dict[Vector, int]:
    """For each positive root class C, the k with φ(0,C,k−1) < φ(v_D) < φ(0,C,k)."""
    v = MukaiVector(1, D, s)
    zv = _nonzero_charge(S, kp, v)
    if zv.im <= 0:
        raise StabilityError("v must have central charge in the upper half plane")
    out: dict[Vector, int] = {}
    for C in collection_roots(S, collection):
        cw = S.ns.pair(C, kp.omega)
        if cw <= 0:
            raise StabilityError(f"root class {C} is not ω-positive")
        # φ(0,C,k) = φ(v) exactly at k* = C·β − C·ω · Re Z(v) / Im Z(v); larger k means larger phase
        kstar = S.ns.pair(C, kp.beta) - cw * zv.re / zv.im
        if kstar.denominator == 1:
            raise StabilityError(f"point lies on the wall of root class {C} with k={kstar}")
        k = ceil(kstar)
        lo, hi = MukaiVector(0, C, k - 1), MukaiVector(0, C, k)
        assert phase_compare(S, kp, lo, v) < 0 < phase_compare(S, kp, hi, v)
        out[C] = k
    return out


# Jordan–Hölder supports and base vectors


def _pairing_gram(S: SurfaceConfig, cs: Sequence[MukaiVector]) -> list[list[Fraction]]:
    return [[mukai_pairing(S, a, b) for b in cs] for a in cs]


def _require_negative_definite(gram: list[list[Fraction]]) -> None:
    if not gram:
        return
    scaled = [[int(a) for a in row] for row in gram] if all(
        a.denominator == 1 for row in gram for a in row
    ) else None
    if scaled is None:
        raise StabilityError("spherical classes must pair integrally")
    if signature(IntegralLattice(tuple(map(tuple, scaled)))) != (0, len(gram), 0):
        raise StabilityError("spherical set does not span a negative definite lattice")


def _ellipsoid_points(gram: list[list[Fraction]], lin: list[Fraction], const: Fraction) -> list[IntVec]:
    """Integer t with const + 2·lin·t + tᵀGt ≥ −2, G negative definite.

    Writing A = −G, the set is (t−μ)ᵀA(t−μ) ≤ M with μ = A⁻¹lin and
    M = const + 2 + linᵀA⁻¹lin, so |tᵢ − μᵢ| ≤ sqrt(M·(A⁻¹)ᵢᵢ).
    """
    m = len(gram)
    if m == 0:
        return [()] if const >= -2 else []
    A = [[-a for a in row] for row in gram]
    mu = solve_rational(A, lin)
    M = const + 2 + sum((a * b for a, b in zip(lin, mu)), Fraction(0))
    if M < 0:
        return []
    ranges = []
    for i in range(m):
        e = [Fraction(int(i == j)) for j in range(m)]
        col = solve_rational(A, e)
        r2 = M * col[i]
        r = isqrt(ceil(r2)) + 1
        ranges.append(range(floor(mu[i]) - r, ceil(mu[i]) + r + 1))
    # integral data (the usual case) is evaluated with plain ints
    if all(x.denominator == 1 for x in [const, *lin, *(a for row in gram for a in row)]):
        const, lin = int(const), [int(a) for a in lin]
        gram = [[int(a) for a in row] for row in gram]
    out = []
    for t in itertools.product(*ranges):
        val = const + 2 * sum(a * b for a, b in zip(lin, t))
        val += sum(gram[i][j] * t[i] * t[j] for i in range(m) for j in range(m))
        if val >= -2:
            out.append(tuple(t))
    return out


def combine(v: MukaiVector, cs: Sequence[MukaiVector], t: Sequence[int]) -> MukaiVector:
    """v + c_t with c_t = Σ tᵢcᵢ."""
    out = v
    for ti, c in zip(t, cs):
        if ti:
            out = out + ti * c
    return out


def stable_factor_support(
    S: SurfaceConfig, v: MukaiVector, spherical: Sequence[MukaiVector]
) -> list[IntVec]:
    """All integer t with (v + c_t)² ≥ −2, found inside an exact bounding box."""
    gram = _pairing_gram(S, spherical)
    _require_negative_definite(gram)
    lin = [mukai_pairing(S, v, c) for c in spherical]
    return sorted(_ellipsoid_points(gram, lin, mukai_pairing(S, v, v)))


def totally_semistable(S: SurfaceConfig, v: MukaiVector, spherical: Sequence[MukaiVector]) -> bool:
    return any(mukai_pairing(S, v, c) < 0 for c in spherical)


def base_vector_m(S: SurfaceConfig, v: MukaiVector, spherical: Sequence[MukaiVector]) -> IntVec:
    """The unique m with ⟨v+c_m, cᵢ⟩ ≥ 0 for all i that is maximal for adding ℕ-combinations."""
    support = stable_factor_support(S, v, spherical)
    gram = _pairing_gram(S, spherical)
    lin = [mukai_pairing(S, v, c) for c in spherical]
    # ⟨v + c_t, cᵢ⟩ = ⟨v, cᵢ⟩ + Σⱼ tⱼ⟨cⱼ, cᵢ⟩
    positive = [
        t for t in support
        if all(lin[i] + sum(tj * gram[j][i] for j, tj in enumerate(t)) >= 0
               for i in range(len(spherical)))
    ]
    pos_set = set(positive)
    maximal = [
        m for m in positive
        if not any(
            u != m and u in pos_set and all(a >= b for a, b in zip(u, m)) for u in positive
        )
    ]
    if len(maximal) != 1:
        raise StabilityError(f"expected a unique base vector, found {maximal}")
    return maximal[0]


@dataclass(frozen=True)
class ModuliWeight:
    level: int
    d_degree: Fraction
    ch2: Fraction
    finite_weights: tuple[Fraction, ...]
    sign_exponents: tuple[Fraction, ...]


def moduli_weight(
    S: SurfaceConfig,
    v: MukaiVector,
    spherical: Sequence[MukaiVector],
    base: Sequence[int] | None = None,
) -> ModuliWeight:
    """Level, d-degree and hᵢ-weights −⟨v+c_t, cᵢ⟩ of the component v + c_t.

    The three components are returned separately.  ``ch2`` is s − r, the
    value under the ch₂ normalisation of the grading.
    """
    t = tuple(base) if base is not None else (0,) * len(spherical)
    u = combine(v, spherical, t)
    pairs = tuple(mukai_pairing(S, u, c) for c in spherical)
    return ModuliWeight(
        level=1,
        d_degree=u.s,
        ch2=u.s - u.r,
        finite_weights=tuple(-p for p in pairs),
        sign_exponents=tuple(p - 1 for p in pairs),
    )


# corner stability conditions


def is_ample_proxy(S: SurfaceConfig, w: Sequence[object]) -> bool:
    """ω² > 0, ω positive on every listed curve and on the positive-cone reference class."""
    ns = S.ns
    if ns.norm(w) <= 0 or any(ns.pair(w, C) <= 0 for C in S.curves.values()):
        return False
    return S.positive_class is None or ns.pair(w, S.positive_class) > 0


def _omega_candidates(S: SurfaceConfig, radius: int) -> list[IntVec]:
    """Primitive integral ample candidates, smallest ω² first.

    Besides a coordinate box, when the curves span NS the classes with
    prescribed degrees 1..radius on the curves are added; ample cones of
    higher Picard rank are often too thin for a small box.
    """
    ns = S.ns
    cands = set()
    for x in itertools.product(range(-radius, radius + 1), repeat=S.rank):
        if any(x) and gcd(*x) == 1 and is_ample_proxy(S, x):
            cands.add(x)
    curves = list(S.curves.values())
    if len(curves) == S.rank:
        gram = [[ns.pair(a, b) for b in curves] for a in curves]
        try:
            for degs in itertools.product(range(1, radius + 1), repeat=S.rank):
                coeffs = solve_rational(gram, degs)
                y: Vector = (Fraction(0),) * S.rank
                for c, C in zip(coeffs, curves):
                    y = add(y, scale(c, C))
                x = primitive_integer(y, orient=False)
                if is_ample_proxy(S, x):
                    cands.add(x)
        except LatticeError:
            pass
    return sorted(cands, key=lambda x: (ns.norm(x), max(map(abs, x)), x))


def _span_solve(S: SurfaceConfig, R: Sequence[Vector], values: Sequence[Fraction]) -> Vector:
    """The class y in span(R) with C_r·y = values[r]."""
    gram = [[S.ns.pair(a, b) for b in R] for a in R]
    coeffs = solve_rational(gram, values)
    y: Vector = (Fraction(0),) * S.rank
    for c, C in zip(coeffs, R):
        y = add(y, scale(c, C))
    return y


def corner_certificate(
    S: SurfaceConfig,
    D: Sequence[object],
    s: object,
    R: Sequence[Sequence[object]],
    k: Sequence[int],
    kp: KahlerPoint,
) -> bool:
    """Every v_D + c_t in the support lies on every wall W(v, (0, C_r, k_r))."""
    v = MukaiVector(1, D, s)
    cs = [MukaiVector(0, C, kr) for C, kr in zip(R, k)]
    try:
        for t in stable_factor_support(S, v, cs):
            u = combine(v, cs, t)
            for c in cs:
                if not on_wall(S, kp, u, c):
                    return False
    except GapPointError:
        return False
    return True


def _generic_for(
    S: SurfaceConfig, v: MukaiVector, kp: KahlerPoint, collection, n_range: int
) -> bool:
    """No curve wall (0, C, k) with |k| ≤ n_range passes through kp, and Z(v) ≠ 0."""
    if central_charge(S, kp, v).is_zero():
        return False
    for C in collection_roots(S, collection):
        for kk in range(-n_range, n_range + 1):
            w = MukaiVector(0, C, kk)
            if central_charge(S, kp, w).is_zero() or on_wall(S, kp, v, w):
                return False
    return True


def solve_corner_stability(
    S: SurfaceConfig,
    D: Sequence[object],
    s: object,
    R: Sequence[Sequence[object]],
    k: Sequence[int],
    lp: LimitParams | None = None,
    *,
    radius: int | None = None,
    omega_hint: Sequence[object] | None = None,
    collection: str | Sequence[str] | None = None,
) -> KahlerPoint:
    """A point (β, ω) lying on all walls W(v_D + c_t, (0, C_r, k_r)) at once.

    A common ratio ξ = C_r·ω / (C_r·β − k_r) is imposed.  Writing η = 1/ξ and
    β = β_k + η ω_R inside span(R) (β_k, ω_R the classes in span(R) with
    C_r·β_k = k_r and C_r·ω_R = C_r·ω), the wall condition for v_D becomes
    the quadratic  −(ω_R²/2) η² + D·(ω − ω_R) η − (ω²/2 + D·β_k − β_k²/2 − s) = 0,
    and the same condition then holds for every v_D + c_t.  Integral ω are
    tried in order of (ω², max |coordinate|) and the first rational root that
    passes the exact certificate (and the limit-region test, when given) wins.
    """
    D = vec(D)
    s = as_fraction(s)
    R = [vec(C) for C in R]
    k = [int(a) for a in k]
    if len(R) != len(k):
        raise StabilityError("one alcove integer per root class")
    ns = S.ns
    if R:
        gram = [[ns.pair(a, b) for b in R] for a in R]
        _require_negative_definite(gram)
    if radius is None:
        radius = 12 if S.rank <= 2 else 6 if S.rank <= 3 else 4
    cands = [tuple(omega_hint)] if omega_hint is not None else _omega_candidates(S, radius)
    v = MukaiVector(1, D, s)

    def accept(kp: KahlerPoint) -> bool:
        if lp is not None and not in_limit_region(S, kp, lp):
            return False
        return True

    for w in cands:
        w = vec(w)
        w2 = ns.norm(w)
        if lp is not None and w2 <= lp.V:
            continue
        if not R:
            kp = KahlerPoint((Fraction(0),) * S.rank, w)
            if accept(kp) and _generic_for(S, v, kp, collection, 4):
                return kp
            continue
        cw = [ns.pair(C, w) for C in R]
        if any(x <= 0 for x in cw):
            continue
        beta_k = _span_solve(S, R, [Fraction(x) for x in k])
        w_R = _span_solve(S, R, cw)
        a = -ns.norm(w_R) / 2
        b = ns.pair(D, sub(w, w_R))
        c = -(w2 / 2 + ns.pair(D, beta_k) - ns.norm(beta_k) / 2 - s)
        root = rational_sqrt(b * b - 4 * a * c)
        if root is None:
            continue
        for eta in sorted({(-b - root) / (2 * a), (-b + root) / (2 * a)}):
            if eta <= 0:
                continue
            kp = KahlerPoint(add(beta_k, scale(eta, w_R)), w)
            if corner_certificate(S, D, s, R, k, kp) and accept(kp):
                return kp
    raise StabilityError("no corner point found within the search bounds; enlarge N, V or radius")


# sweeps


def phase_sweep(
    S: SurfaceConfig,
    v: MukaiVector,
    others: Sequence[MukaiVector],
    start: KahlerPoint,
    end: KahlerPoint,
    steps: int,
) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Phase comparisons sign(φ(v) − φ(w)) at steps+1 equally spaced points of a segment."""
    rows = []
    for i in range(steps + 1):
        t = Fraction(i, steps)
        kp = KahlerPoint(
            add(scale(1 - t, start.beta), scale(t, end.beta)),
            add(scale(1 - t, start.omega), scale(t, end.omega)),
        )
        signs = []
        for w in others:
            try:
                signs.append(phase_compare(S, kp, v, w))
            except GapPointError:
                signs.append(0)
        rows.append((t, tuple(signs)))
    return rows


def sweep_tsv(rows: Sequence[tuple[Fraction, tuple[int, ...]]], labels: Sequence[str]) -> str:
    out = ["\t".join(["t", *labels])]
    for t, signs in rows:
        out.append("\t".join([format_rational(t), *("<=>"[x + 1] for x in signs)]))
    return "\n".join(out) + "\n"
