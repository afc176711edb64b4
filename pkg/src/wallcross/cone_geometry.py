"""The positive cone of the Hilbert scheme S^[n]: Mukai homomorphism coordinates,
the ℓ-map from stability conditions, wall generators, the walls through a point
of the Sym^n face, face posets of hyperplane arrangements and 2D slices.

NS(S^[n]) classes are stored as coordinate tuples (α₁, …, α_ρ, b) meaning
α̃ + b·B, where α̃ = θ_v((0, −α, 0)) and B = θ_v((−1, 0, 1−n)).  The
Beauville–Bogomolov form is the Mukai form transported by θ_v:
(α̃ + bB)·(α̃' + b'B) = α·α' + (2 − 2n) b b'.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .feasibility import feasible
from .k3_stability import (
    KahlerPoint,
    collection_roots,
    tensor_shift,
)
from .lattice_core import (
    MukaiVector,
    SurfaceConfig,
    Vector,
    as_fraction,
    format_rational,
    mukai_pairing,
    primitive_integer,
    scale,
    sub,
    vec,
)
from .parallel import pmap
from .root_systems import RootSystem

SignVector = tuple[int, ...]


class ConeError(ValueError):
    pass


@dataclass(frozen=True)
class HilbNSModel:
    base: SurfaceConfig
    n: int
    twist: Vector | None = None  # D for v_D = (1, 0, 1−n)·ch(𝒪(D))

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ConeError("the Hilbert scheme model needs n ≥ 2")
        if self.twist is not None:
            object.__setattr__(self, "twist", vec(self.twist))

    @property
    def rank(self) -> int:
        return self.base.rank + 1

    @property
    def _D(self) -> Vector:
        return self.twist if self.twist is not None else (Fraction(0),) * self.base.rank

    @property
    def v(self) -> MukaiVector:
        v0 = MukaiVector(1, (0,) * self.base.rank, 1 - self.n)
        return tensor_shift(self.base, v0, self._D)

    def bb(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        """Beauville–Bogomolov form in (α̃, b) coordinates."""
        x, y = vec(x), vec(y)
        if len(x) != self.rank or len(y) != self.rank:
            raise ConeError("NS(S^[n]) vectors have length rho + 1")
        return self.base.ns.pair(x[:-1], y[:-1]) + (2 - 2 * self.n) * x[-1] * y[-1]

    def tilde(self, alpha: Sequence[object]) -> Vector:
        return (*vec(alpha), Fraction(0))

    @property
    def B(self) -> Vector:
        return (Fraction(0),) * self.base.rank + (Fraction(1),)

    def untwist(self, w: MukaiVector) -> MukaiVector:
        return tensor_shift(self.base, w, scale(-1, self._D))

    def theta_inverse(self, x: Sequence[object]) -> MukaiVector:
        x = vec(x)
        b = x[-1]
        w0 = MukaiVector(-b, scale(-1, x[:-1]), -b * (self.n - 1))
        return tensor_shift(self.base, w0, self._D)


def theta_v(model: HilbNSModel, w: MukaiVector) -> Vector:
    """Mukai homomorphism v⊥ → NS(S^[n]) in (α̃, b) coordinates."""
    if mukai_pairing(model.base, w, model.v) != 0:
        raise ConeError(f"{w} is not orthogonal to v")
    u = model.untwist(w)
    # u = (r, c, r(n−1)) = (0, −α, 0)·… with α = −c and b = −r
    return (*scale(-1, u.c1), -u.r)


def project_to_v_perp(model: HilbNSModel, w: MukaiVector) -> MukaiVector:
    v = model.v
    v2 = mukai_pairing(model.base, v, v)
    return w - (mukai_pairing(model.base, w, v) / v2) * v


def wall_normal(model: HilbNSModel, w: MukaiVector) -> Vector:
    """Normal (under the BB form) of the wall θ_v(v⊥ ∩ w⊥)."""
    x = theta_v(model, project_to_v_perp(model, w))
    if not any(x):
        raise ConeError(f"{w} is proportional to v and defines no wall")
    return x


def bb_reflection(model: HilbNSModel, D: Sequence[object]) -> Callable[[Sequence[object]], Vector]:
    """Reflection x ↦ x − 2(x·D)/(D·D)·D in the BB form."""
    D = vec(D)
    d2 = model.bb(D, D)
    if d2 == 0:
        raise ConeError("cannot reflect in an isotropic class")

    def rho(x: Sequence[object]) -> Vector:
        x = vec(x)
        c = 2 * model.bb(x, D) / d2
        return sub(x, scale(c, D))

    return rho


markman_reflection = bb_reflection


# the ℓ-map


def ell_preimage(model: HilbNSModel, kp: KahlerPoint) -> MukaiVector:
    """(r, C, s)_{ω,β} for v = (r, c, s): a class in v⊥ whose θ_v-image is a positive multiple of ℓ."""
    ns = model.base.ns
    v = model.v
    r, c, s = v.r, v.c1, v.s
    b, w = kp.beta, kp.omega
    cw, bw = ns.pair(c, w), ns.pair(b, w)
    half = (ns.norm(b) - ns.norm(w)) / 2
    rr = cw - r * bw
    C = tuple(
        rr * bi + (s - ns.pair(c, b) + r * half) * wi for bi, wi in zip(b, w)
    )
    ss = cw * half + s * bw - cw * bw
    return MukaiVector(rr, C, ss)


def ell_map(model: HilbNSModel, kp: KahlerPoint) -> tuple[int, ...]:
    """Primitive integral representative of the ray ℓ(σ_{β,ω}) in NS(S^[n])."""
    x = theta_v(model, ell_preimage(model, kp))
    if not any(x):
        raise ConeError("the ℓ-map vanishes at this point")
    return primitive_integer(x, orient=False)


def ell_map_shortcut(model: HilbNSModel, kp: KahlerPoint) -> Vector:
    """(β·ω)β̃ + ((ω²−β²)/2 + n−1)ω̃ + (β·ω)B for the untwisted v = (1, 0, 1−n)."""
    if model.twist is not None and any(model.twist):
        raise ConeError("the shortcut form only covers the untwisted Hilbert scheme")
    ns = model.base.ns
    b, w = kp.beta, kp.omega
    bw = ns.pair(b, w)
    cw = (ns.norm(w) - ns.norm(b)) / 2 + model.n - 1
    return (*(bw * bi + cw * wi for bi, wi in zip(b, w)), bw)


# Bayer–Macrì generators


def _box(model: HilbNSModel, height: int) -> list[MukaiVector]:
    rho = model.base.rank
    out = []
    for t in itertools.product(range(-height, height + 1), repeat=rho + 2):
        if any(t):
            out.append(MukaiVector(t[0], t[1:-1], t[-1]))
    return out


def _sign_canonical(t: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    lead = next((a for a in t if a != 0), 0)
    return tuple(-a for a in t) if lead < 0 else t


def bm_wall_generators(
    model: HilbNSModel,
    family: str,
    height: int,
    ample: Sequence[object] | None = None,
) -> list[tuple[Fraction, ...]]:
    """Candidate wall classes of the nef, movable or effective cone within a box.

    nef and movable return Mukai vectors (r, c…, s) canonical up to sign; the
    effective family returns divisor classes in NS(S^[n]) coordinates, kept on
    the side where they pair positively with ``ample`` when it is given.
    """
    if family not in ("nef", "movable", "effective"):
        raise ConeError(f"unknown family {family!r}")
    if height <= 0:
        return []
    S = model.base
    v = model.v
    v2 = mukai_pairing(S, v, v)

    def test(a: MukaiVector) -> list[tuple[Fraction, ...]]:
        a2 = mukai_pairing(S, a, a)
        va = mukai_pairing(S, v, a)
        if family == "nef":
            if a2 >= -2 and 0 <= va <= v2 / 2 and any(project_to_v_perp(model, a).as_tuple()):
                return [a.as_tuple()]
            return []
        spherical = a2 == -2 and va == 0
        isotropic = a2 == 0 and 1 <= va <= 2
        if family == "movable":
            return [a.as_tuple()] if spherical or isotropic else []
        out = []
        if spherical:
            out.append(theta_v(model, a))
        if isotropic:
            out.append(theta_v(model, v2 * a - va * v))
        if ample is not None:
            return [x if model.bb(x, ample) > 0 else tuple(-y for y in x) for x in out
                    if model.bb(x, ample) != 0]
        return out

    found: set[tuple[Fraction, ...]] = set()
    for res in pmap(test, _box(model, height)):
        for t in res:
            found.add(t if (family == "effective" and ample is not None) else _sign_canonical(t))
    return sorted(found)


# walls through a point of the Sym^n face


@dataclass(frozen=True)
class LabeledWall:
    label: tuple  # ("HC",) or ("root", m, coefficient vector of ±α)
    normal: Vector
    mukai: MukaiVector | None = None

    def tag(self) -> str:
        if self.label[0] in ("HC", "delta"):
            return "boundary"
        return "divisorial" if self.label[1] == 0 else "flopping"


def _root_coefficients(S: SurfaceConfig, collection) -> list[tuple[Vector, tuple[int, ...]]]:
    curves = S.collection(collection)
    if not curves:
        return []
    cartan = [[-int(S.ns.pair(a, b)) for b in curves] for a in curves]
    R = RootSystem.finite(cartan)
    classes = collection_roots(S, collection)
    return list(zip(classes, R.positive_roots()))


def walls_through_symn_point(model: HilbNSModel, collection) -> list[LabeledWall]:
    """W_HC and θ_v(v⊥ ∩ (0, s, m)⊥) for spherical s ∈ ℤ𝒞 and 0 ≤ m < n.

    s runs over both signs; (0, s, 0) and (0, −s, 0) give the same wall so
    the list has 1 + |Φ⁺|(2n − 1) entries.
    """
    S = model.base
    out = [LabeledWall(("HC",), model.B, MukaiVector(-1, (0,) * S.rank, 1 - model.n))]
    seen = {primitive_integer(model.B)}
    for cls, coeffs in _root_coefficients(S, collection):
        for sign in (1, -1):
            for m in range(model.n):
                s = scale(sign, cls)
                w = MukaiVector(0, s, m)
                if model.twist is not None:
                    w = tensor_shift(S, w, model.twist)
                N = wall_normal(model, w)
                key = primitive_integer(N)
                if key in seen:
                    continue
                seen.add(key)
                label = ("root", m, tuple(sign * a for a in coeffs))
                out.append(LabeledWall(label, N, w))
    return out


def contraction_point(S: SurfaceConfig, collection, radius: int = 6) -> Vector:
    """An integral big and nef H with H·C = 0 exactly on the root classes of 𝒞."""
    curves = S.collection(collection)
    others = [C for C in S.curves.values() if C not in curves]
    best = None
    for x in itertools.product(range(-radius, radius + 1), repeat=S.rank):
        if S.ns.norm(x) <= 0 or any(S.ns.pair(x, C) != 0 for C in curves):
            continue
        if any(S.ns.pair(x, C) <= 0 for C in others):
            continue
        if S.positive_class is not None and S.ns.pair(x, S.positive_class) <= 0:
            continue
        key = (S.ns.norm(x), x)
        if best is None or key < best[0]:
            best = (key, x)
    if best is None:
        raise ConeError("no contraction point found within the search radius")
    return vec(best[1])


# face posets of central arrangements


def covectors(functionals: Sequence[Sequence[object]], dim: int) -> frozenset[SignVector]:
    """All realizable sign vectors (sign f₁(x), …, sign f_h(x)), x ∈ ℚ^dim.

    Depth-first over the hyperplanes; every partial assignment is checked for
    exact feasibility so dead branches are cut immediately.
    """
    fs = [vec(f) for f in functionals]
    out: set[SignVector] = set()

    def rec(i: int, acc: list[tuple[Vector, int]]) -> None:
        if i == len(fs):
            out.add(tuple(s for _, s in acc))
            return
        for s in (-1, 0, 1):
            nxt = acc + [(fs[i], s)]
            if feasible(nxt, dim):
                rec(i + 1, nxt)

    rec(0, [])
    return frozenset(out)


def face_order(c: SignVector, d: SignVector) -> bool:
    """c ≤ d: the face c lies in the closure of the face d."""
    return all(a == 0 or a == b for a, b in zip(c, d))


@dataclass(frozen=True)
class ArrangementMatch:
    matches: bool
    faces: int
    chambers: int
    orientation: tuple[int, ...] | None
    reason: str = ""


def _slice_functionals(model: HilbNSModel, walls: Sequence[LabeledWall]) -> tuple[list[Vector], int]:
    """Functionals t ↦ ⟨Σ tⱼuⱼ, Nᵢ⟩ on the span of the normals (a transverse slice)."""
    basis: list[Vector] = []
    for w in walls:
        cand = basis + [w.normal]
        if _rank(cand) == len(cand):
            basis = cand
    fs = [tuple(model.bb(u, w.normal) for u in basis) for w in walls]
    return fs, len(basis)


def _rank(rows: Sequence[Vector]) -> int:
    m = [list(r) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        p = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def affine_arrangement(kind: str, rank: int, n: int) -> list[tuple[tuple, Vector]]:
    """{δ, mδ + α : α ∈ Δ_f, 0 ≤ m < n} as labeled normals in ℝ^I, up to proportionality."""
    from .lattice_core import affine_cartan_matrix

    R = RootSystem.affine(affine_cartan_matrix(kind, rank))
    delta = R.null_root
    fin = RootSystem.finite([row[1:] for row in R.cartan.gram[1:]])
    out: list[tuple[tuple, Vector]] = [(("delta",), vec(delta))]
    seen = {primitive_integer(delta)}
    for a in fin.positive_roots():
        for sign in (1, -1):
            for m in range(n):
                normal = tuple(m * d + sign * x for d, x in zip(delta, (0, *a)))
                key = primitive_integer(normal)
                if key in seen:
                    continue
                seen.add(key)
                out.append((("root", m, tuple(sign * x for x in a)), vec(normal)))
    return out


def _match_covectors(
    A: frozenset[SignVector], B: frozenset[SignVector]
) -> tuple[int, ...] | None:
    """An orientation ε ∈ {±1}^h with ε·B = A, if one exists."""
    if len(A) != len(B):
        return None
    topes_a = sorted(c for c in A if 0 not in c)
    topes_b = [c for c in B if 0 not in c]
    if not topes_a or len(topes_a) != len(topes_b):
        return None if topes_a or topes_b else tuple()
    t0 = topes_a[0]
    for t in topes_b:
        eps = tuple(a * b for a, b in zip(t0, t))
        if {tuple(e * x for e, x in zip(eps, c)) for c in B} == A:
            return eps
    return None


def arrangement_matches(
    model: HilbNSModel,
    walls: Sequence[LabeledWall],
    affine: Sequence[tuple[tuple, Vector]],
    x: Sequence[object] | None = None,
) -> ArrangementMatch:
    """Compare labeled face posets of the K3-side walls and an affine root arrangement.

    The Hilbert–Chow wall is matched with δ and the wall of (0, ±s, m) with
    mδ ± α.  Face posets are compared as covector sets up to reorienting
    each hyperplane; equal covector sets give an order isomorphism of the
    face posets.
    """
    if x is not None:
        bad = [w.label for w in walls if model.bb(x, w.normal) != 0]
        if bad:
            raise ConeError(f"walls {bad} do not pass through x")
    aff_labels = [("HC",) if lab == ("delta",) else lab for lab, _ in affine]
    by_label = {w.label: w for w in walls}
    if sorted(by_label) != sorted(aff_labels) or len(by_label) != len(walls):
        return ArrangementMatch(False, 0, 0, None, "wall labels differ")
    ordered = [by_label[lab] for lab in aff_labels]
    fs, dim = _slice_functionals(model, ordered)
    k3_faces = covectors(fs, dim)
    aff_dim = len(affine[0][1])
    aff_faces = covectors([nrm for _, nrm in affine], aff_dim)
    chambers = sum(1 for c in k3_faces if 0 not in c)
    if dim != aff_dim:
        return ArrangementMatch(False, len(k3_faces), chambers, None, "slice dimensions differ")
    eps = _match_covectors(aff_faces, k3_faces)
    return ArrangementMatch(eps is not None, len(k3_faces), chambers, eps,
                            "" if eps is not None else "covector sets differ")


# 2D slices for figures


@dataclass(frozen=True)
class SliceSpec:
    basepoint: Vector
    dir1: Vector
    dir2: Vector
    extent: Fraction

    def __post_init__(self) -> None:
        for name in ("basepoint", "dir1", "dir2"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        object.__setattr__(self, "extent", as_fraction(self.extent))
        if self.extent <= 0:
            raise ConeError("extent must be positive")
        if _rank([self.dir1, self.dir2]) != 2:
            raise ConeError("slice directions must be linearly independent")


@dataclass(frozen=True)
class Segment:
    p0: tuple[Fraction, Fraction]
    p1: tuple[Fraction, Fraction]
    tag: str
    label: str
    full: bool = False  # the whole slice lies in the wall

    def key(self) -> tuple:
        return (self.tag, self.label, self.p0, self.p1)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def clip_line(a: Fraction, b: Fraction, c: Fraction, E: Fraction):
    """Intersection of a·u + b·v + c = 0 with the square [−E, E]², as two points or None."""
    pts = set()
    if b != 0:
        for u in (-E, E):
            v = -(a * u + c) / b
            if -E <= v <= E:
                pts.add((u, v))
    if a != 0:
        for v in (-E, E):
            u = -(b * v + c) / a
            if -E <= u <= E:
                pts.add((u, v))
    if len(pts) < 2:
        return None
    p = sorted(pts)
    return p[0], p[-1]


def slice_segments(
    spec: SliceSpec,
    walls: Iterable[tuple[str, str, Sequence[object]]],
) -> list[Segment]:
    """Intersect walls (label, tag, normal) with the slice base + u·dir1 + v·dir2, |u|,|v| ≤ extent."""
    out = []
    for label, tag, normal in walls:
        normal = vec(normal)
        a, b = _dot(normal, spec.dir1), _dot(normal, spec.dir2)
        c = _dot(normal, spec.basepoint)
        E = spec.extent
        if a == 0 and b == 0:
            if c == 0:
                out.append(Segment((-E, -E), (E, E), tag, label, full=True))
            continue
        pts = clip_line(a, b, c, E)
        if pts is not None:
            out.append(Segment(pts[0], pts[1], tag, label))
    return sorted(out, key=Segment.key)


def quiver_slice_walls(kind: str, rank: int, n: int) -> list[tuple[str, str, Vector]]:
    """Walls {δ, mδ + α : 0 ≤ m < n} of the affine quiver, labeled and tagged."""
    out = []
    for lab, normal in affine_arrangement(kind, rank, n):
        if lab == ("delta",):
            out.append(("delta", "boundary", normal))
        else:
            m, a = lab[1], lab[2]
            tag = "divisorial" if m == 0 else "flopping"
            out.append((f"m={m};alpha={','.join(map(str, a))}", tag, normal))
    return out


COLORS = {"divisorial": "red", "flopping": "blue", "boundary": "black"}


def segments_json(segments: Sequence[Segment]) -> str:
    data = [
        {
            "label": s.label,
            "tag": s.tag,
            "p0": [format_rational(x) for x in s.p0],
            "p1": [format_rational(x) for x in s.p1],
            "full": s.full,
        }
        for s in segments
    ]
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def _fmt(q: Fraction) -> str:
    """Fixed-precision decimal for drawing (exact values sit in data attributes)."""
    return f"{float(q):.6f}".rstrip("0").rstrip(".")


def segments_svg(segments: Sequence[Segment], extent: object, size: int = 600) -> str:
    """Deterministic SVG; the y axis is flipped so v grows upwards."""
    E = as_fraction(extent)
    scale_ = Fraction(size, 2) / E

    def X(u: Fraction) -> str:
        return _fmt((u + E) * scale_)

    def Y(v: Fraction) -> str:
        return _fmt((E - v) * scale_)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="gray"/>',
    ]
    lines += [f"<!-- legend: {tag} = {color} -->" for tag, color in sorted(COLORS.items())]
    for s in segments:
        lines.append(
            f'<line x1="{X(s.p0[0])}" y1="{Y(s.p0[1])}" x2="{X(s.p1[0])}" y2="{Y(s.p1[1])}" '
            f'stroke="{COLORS.get(s.tag, "gray")}" stroke-width="2" '
            f'data-label="{s.label}" data-tag="{s.tag}" '
            f'data-p0="{format_rational(s.p0[0])} {format_rational(s.p0[1])}" '
            f'data-p1="{format_rational(s.p1[0])} {format_rational(s.p1[1])}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def level_one_slice(kind: str, rank: int, extent: object = 3) -> SliceSpec:
    """θ·δ = 1 slice: base e₀/δ₀ with directions e_i − (δ_i/δ₀)e₀ for i = 1, 2."""
    from .lattice_core import affine_cartan_matrix

    R = RootSystem.affine(affine_cartan_matrix(kind, rank))
    delta = R.null_root
    size = len(delta)
    if size < 3:
        raise ConeError("a 2D slice needs at least three vertices")
    base = tuple(Fraction(int(i == 0), delta[0]) for i in range(size))

    def d(j: int) -> Vector:
        return tuple(
            Fraction(-delta[j], delta[0]) if i == 0 else Fraction(int(i == j)) for i in range(size)
        )

    return SliceSpec(base, d(1), d(2), as_fraction(extent))

