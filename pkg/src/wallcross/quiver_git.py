"""GIT chamber combinatorics for Nakajima quiver varieties."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from .lattice_core import as_fraction, dot, primitive_integer, standard_lattice
from .root_systems import RootSystem, RootSystemError

IntVec = tuple[int, ...]


class QuiverError(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    """Symmetric adjacency matrix of the doubled quiver; a loop contributes 2 on the diagonal."""

    adjacency: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        A = tuple(tuple(int(a) for a in row) for row in self.adjacency)
        object.__setattr__(self, "adjacency", A)
        n = len(A)
        if n == 0 or any(len(r) != n for r in A):
            raise QuiverError("adjacency must be a non-empty square matrix")
        for i in range(n):
            for j in range(n):
                if A[i][j] < 0 or A[i][j] != A[j][i]:
                    raise QuiverError("adjacency must be symmetric and non-negative")

    @property
    def n_vertices(self) -> int:
        return len(self.adjacency)

    @property
    def cartan(self) -> tuple[tuple[int, ...], ...]:
        n = self.n_vertices
        return tuple(
            tuple((2 if i == j else 0) - self.adjacency[i][j] for j in range(n)) for i in range(n)
        )

    def pair(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        """Symmetrized Euler form xᵀ C y."""
        C = self.cartan
        return sum(
            (as_fraction(x[i]) * C[i][j] * as_fraction(y[j])
             for i in range(len(C)) for j in range(len(C)) if C[i][j] and x[i] and y[j]),
            Fraction(0),
        )

    def apply_cartan(self, v: Sequence[object]) -> tuple[Fraction, ...]:
        C = self.cartan
        return tuple(sum((C[i][j] * as_fraction(v[j]) for j in range(len(C))), Fraction(0))
                     for i in range(len(C)))

    @classmethod
    def from_cartan(cls, cartan: Sequence[Sequence[int]], name: str = "") -> Quiver:
        n = len(cartan)
        return cls(
            tuple(tuple((2 if i == j else 0) - cartan[i][j] for j in range(n)) for i in range(n)),
            name,
        )

    @classmethod
    def from_name(cls, name: str) -> Quiver:
        if name == "jordan":
            return cls(((2,),), "jordan")
        try:
            L = standard_lattice(name)
        except ValueError as exc:
            raise QuiverError(f"unknown quiver {name!r}") from exc
        return cls.from_cartan(L.gram, name)


def _check_dims(Q: Quiver, *vs: Sequence[object]) -> None:
    for v in vs:
        if len(v) != Q.n_vertices:
            raise QuiverError(f"vector {tuple(v)} has wrong length for {Q.n_vertices} vertices")


def canonical_normal(n: Sequence[object]) -> IntVec:
    """Primitive integer normal with first nonzero entry positive."""
    return primitive_integer(n, orient=True)


def canonical_walls(normals: Iterable[Sequence[object]]) -> list[IntVec]:
    return sorted({canonical_normal(n) for n in normals})


def bounded_positive_roots(Q: Quiver, v: Sequence[int]) -> list[IntVec]:
    """R₊(v): nonzero θ in the box 0 ≤ θ ≤ v with θ·Cθ ≤ 2, sorted."""
    _check_dims(Q, v)
    if any(int(a) < 0 for a in v):
        raise QuiverError("dimension vector must be non-negative")
    out = []
    for theta in itertools.product(*(range(int(a) + 1) for a in v)):
        if any(theta) and Q.pair(theta, theta) <= 2:
            out.append(tuple(theta))
    return sorted(out)


def affine_root_system(Q: Quiver) -> RootSystem:
    try:
        return RootSystem.affine(Q.cartan)
    except RootSystemError as exc:
        raise QuiverError(f"quiver {Q.name or ''} is not affine ADE: {exc}") from exc


def genuine_walls_affine(Q: Quiver, n: int) -> list[IntVec]:
    """Canonical normals of δ⊥ and (mδ+α)⊥ for 0 ≤ m < n and α a finite root."""
    R = affine_root_system(Q)
    if n < 1:
        raise QuiverError("need at least one point")
    return canonical_walls(R.affine_walls(n))


def chamber_signature(theta: Sequence[object], walls: Iterable[Sequence[int]]) -> tuple[int, ...]:
    out = []
    for w in walls:
        d = dot(theta, w)
        out.append((d > 0) - (d < 0))
    return tuple(out)


def is_generic(theta: Sequence[object], walls: Iterable[Sequence[int]]) -> bool:
    return all(s != 0 for s in chamber_signature(theta, walls))


def hilb_chamber_check(Q: Quiver, v: Sequence[int], theta: Sequence[object]) -> bool:
    """θ has positive finite coordinates and level, and sees every wall of R₊(v) as its face C does."""
    if Q.n_vertices == 1:
        return as_fraction(theta[0]) > 0
    R = affine_root_system(Q)
    delta = R.null_root
    theta = tuple(as_fraction(t) for t in theta)
    level = dot(theta, delta)
    if level <= 0 or any(t <= 0 for t in theta[1:]):
        return False
    face = (theta[0] - level,) + theta[1:]  # projection along e₀ onto δ⊥
    for r in bounded_positive_roots(Q, v):
        if canonical_normal(r) == canonical_normal(delta):
            continue
        a, b = dot(r, face), dot(r, theta)
        if a == 0 or (a > 0) != (b > 0) or b == 0:
            return False
    return True


def hilb_chamber_rep(Q: Quiver, v: Sequence[int]) -> tuple[Fraction, ...]:
    """A parameter in the chamber of R₊(v) adjacent to the face C = {θᵢ > 0, θ·δ = 0}."""
    _check_dims(Q, v)
    if Q.n_vertices == 1:
        return (Fraction(1),)
    R = affine_root_system(Q)
    delta = R.null_root
    finite = (Fraction(1),) * (Q.n_vertices - 1)
    base0 = -sum((Fraction(d) * t for d, t in zip(delta[1:], finite)), Fraction(0))
    eps = Fraction(1, 8)
    for _ in range(64):
        theta = (base0 + eps,) + finite
        if hilb_chamber_check(Q, v, theta):
            return theta
        eps /= 2
    raise QuiverError("could not certify a parameter in the Hilbert chamber")


# ---------------------------------------------------------------------------
# King's criterion as a certificate check


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class QuiverRepCertificate:
    """A representation of the doubled framed quiver and a candidate subrepresentation.

    ``edges`` lists (source, target, matrix) with matrix of shape v[target] × v[source];
    ``i_maps[k]`` has shape v[k] × w[k] and ``j_maps[k]`` shape w[k] × v[k];
    ``subspace[k]`` lists spanning vectors of S_k ⊂ V_k.
    """

    v: tuple[int, ...]
    w: tuple[int, ...]
    edges: tuple[tuple[int, int, tuple[tuple[Fraction, ...], ...]], ...]
    i_maps: tuple[tuple[tuple[Fraction, ...], ...], ...]
    j_maps: tuple[tuple[tuple[Fraction, ...], ...], ...]
    subspace: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self) -> None:
        n = len(self.v)
        if len(self.w) != n or len(self.i_maps) != n or len(self.j_maps) != n or len(self.subspace) != n:
            raise CertificateError("one entry per vertex expected")
        for s, t, M in self.edges:
            if len(M) != self.v[t] or any(len(row) != self.v[s] for row in M):
                raise CertificateError(f"edge {s}->{t} has the wrong shape")
        for k in range(n):
            if len(self.i_maps[k]) != self.v[k] or any(len(r) != self.w[k] for r in self.i_maps[k]):
                raise CertificateError(f"i map at vertex {k} has the wrong shape")
            if len(self.j_maps[k]) != self.w[k] or any(len(r) != self.v[k] for r in self.j_maps[k]):
                raise CertificateError(f"j map at vertex {k} has the wrong shape")
            if any(len(u) != self.v[k] for u in self.subspace[k]):
                raise CertificateError(f"subspace vector at vertex {k} has the wrong length")


@dataclass(frozen=True)
class KingResult:
    verdict: str  # "respects" or "violates"
    dim_s: tuple[int, ...]
    in_kernel_of_j: bool
    contains_image_of_i: bool
    failed: tuple[str, ...] = field(default_factory=tuple)


def _mat(rows: Sequence[Sequence[object]], nrows: int, ncols: int) -> sympy.Matrix:
    if nrows == 0 or ncols == 0:
        return sympy.zeros(nrows, ncols)
    return sympy.Matrix([[sympy.Rational(str(as_fraction(a))) for a in r] for r in rows])


def _span(vectors: Sequence[Sequence[object]], dim: int) -> sympy.Matrix:
    if not vectors:
        return sympy.zeros(dim, 0)
    return sympy.Matrix.hstack(*[_mat([[a] for a in u], dim, 1) for u in vectors])


def _contained(cols: sympy.Matrix, span: sympy.Matrix) -> bool:
    if cols.cols == 0:
        return True
    if span.cols == 0:
        return cols.is_zero_matrix
    return sympy.Matrix.hstack(span, cols).rank() == span.rank()


def king_certificate_check(rep: QuiverRepCertificate, theta: Sequence[object]) -> KingResult:
    n = len(rep.v)
    theta = tuple(as_fraction(t) for t in theta)
    spans = [_span(rep.subspace[k], rep.v[k]) for k in range(n)]
    for s, t, M in rep.edges:
        image = _mat(M, rep.v[t], rep.v[s]) * spans[s]
        if not _contained(image, spans[t]):
            raise CertificateError(f"subspace is not invariant under the edge {s}->{t}")
    dim_s = tuple(int(sp.rank()) if sp.cols else 0 for sp in spans)
    in_ker = all(
        rep.w[k] == 0 or (_mat(rep.j_maps[k], rep.w[k], rep.v[k]) * spans[k]).is_zero_matrix
        for k in range(n)
    )
    has_im = all(_contained(_mat(rep.i_maps[k], rep.v[k], rep.w[k]), spans[k]) for k in range(n))
    ts = dot(theta, dim_s)
    failed = []
    if in_ker and ts > 0:
        failed.append("theta.dim S <= 0 for S in ker j")
    if has_im and ts > dot(theta, rep.v):
        failed.append("theta.dim S <= theta.dim V for S containing im i")
    return KingResult("violates" if failed else "respects", dim_s, in_ker, has_im, tuple(failed))


# ---------------------------------------------------------------------------
# Crawley–Boevey, Ext quivers and numerical invariants


def crawley_boevey(Q: Quiver, v: Sequence[int], w: Sequence[int]) -> tuple[Quiver, IntVec]:
    """Unframed quiver with a new vertex ∞ (index 0) joined to vertex i by wᵢ edges."""
    _check_dims(Q, v, w)
    n = Q.n_vertices
    A = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            A[i + 1][j + 1] = Q.adjacency[i][j]
        A[0][i + 1] = A[i + 1][0] = int(w[i])
    return Quiver(tuple(map(tuple, A)), f"{Q.name}-cb" if Q.name else ""), (1, *map(int, v))


def theta_infinity(theta: Sequence[object], v: Sequence[object]) -> tuple[Fraction, ...]:
    th = tuple(as_fraction(t) for t in theta)
    return (-dot(th, v),) + th


@dataclass(frozen=True)
class ExtQuiverData:
    quiver: Quiver
    dims: tuple[int, ...]
    framing: tuple[int, ...]
    trivial_factor_dim: int

    @property
    def loops(self) -> tuple[int, ...]:
        return tuple(self.quiver.adjacency[i][i] // 2 for i in range(self.quiver.n_vertices))


def ext_quiver(
    Qinf: Quiver,
    total: Sequence[int],
    decomp: Sequence[tuple[Sequence[int], int]],
    beta_inf: Sequence[int],
) -> ExtQuiverData:
    """Local quiver of a polystable point with summands βⁱ (multiplicity nᵢ) and β∞."""
    _check_dims(Qinf, total, beta_inf)
    acc = [int(b) for b in beta_inf]
    for beta, mult in decomp:
        _check_dims(Qinf, beta)
        acc = [a + mult * int(b) for a, b in zip(acc, beta)]
    if tuple(acc) != tuple(int(t) for t in total):
        raise QuiverError(f"decomposition sums to {tuple(acc)}, expected {tuple(total)}")

    def p(b: Sequence[int]) -> Fraction:
        return 1 - Qinf.pair(b, b) / 2

    k = len(decomp)
    A = [[0] * k for _ in range(k)]
    for i, (bi, _) in enumerate(decomp):
        loops = p(bi)
        if loops < 0 or loops.denominator != 1:
            raise QuiverError(f"summand {tuple(bi)} has negative loop count {loops}")
        A[i][i] = 2 * int(loops)
        for j, (bj, _) in enumerate(decomp):
            if i != j:
                e = -Qinf.pair(bi, bj)
                if e < 0:
                    raise QuiverError(f"summands {tuple(bi)},{tuple(bj)} give {e} edges")
                A[i][j] = int(e)
    framing = []
    for bi, _ in decomp:
        m = -Qinf.pair(beta_inf, bi)
        if m < 0:
            raise QuiverError(f"negative framing {m} at summand {tuple(bi)}")
        framing.append(int(m))
    ell = p(beta_inf)
    if ell < 0:
        raise QuiverError(f"negative trivial factor dimension {ell}")
    return ExtQuiverData(Quiver(tuple(map(tuple, A))), tuple(int(m) for _, m in decomp),
                         tuple(framing), int(ell))


def affine_framing(Q: Quiver) -> IntVec:
    """w₀ = (1, 0, …, 0), framing at the affine node."""
    return tuple(int(i == 0) for i in range(Q.n_vertices))


def num_points(Q: Quiver, v: Sequence[int]) -> int:
    """n = v₀ − vᵀCv/2."""
    _check_dims(Q, v)
    n = Fraction(v[0]) - Q.pair(v, v) / 2
    if n < 0:
        raise QuiverError(f"dimension vector {tuple(v)} gives {n} points: empty moduli")
    return int(n)


@dataclass(frozen=True)
class ShiftMap:
    """θ ↦ θ + (θ·δ)·shift, the identity on level 0."""

    delta: IntVec
    shift: tuple[Fraction, ...]

    def __call__(self, theta: Sequence[object]) -> tuple[Fraction, ...]:
        lvl = dot(theta, self.delta)
        return tuple(as_fraction(t) + lvl * s for t, s in zip(theta, self.shift))

    def inverse(self, theta: Sequence[object]) -> tuple[Fraction, ...]:
        lvl = dot(theta, self.delta)
        return tuple(as_fraction(t) - lvl * s for t, s in zip(theta, self.shift))

    def push_normal(self, normal: Sequence[object]) -> tuple[Fraction, ...]:
        """Normal of φ(H) for H = normal⊥: r − (shift·r)δ."""
        c = dot(self.shift, normal)
        return tuple(as_fraction(r) - c * d for r, d in zip(normal, self.delta))

    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        n = len(self.delta)
        return tuple(
            tuple(Fraction(int(i == j)) + self.shift[i] * self.delta[j] for j in range(n))
            for i in range(n)
        )


def shift_map_phi(Q: Quiver, v: Sequence[int]) -> ShiftMap:
    """e₀ ↦ e₀ + (−Σ δᵢuᵢ, u₁, …, u_r) with u = w₀ − Cv (δᵢ = 1 in type A)."""
    _check_dims(Q, v)
    R = affine_root_system(Q)
    delta = R.null_root
    w0 = affine_framing(Q)
    Cv = Q.apply_cartan(v)
    u = tuple(Fraction(a) - b for a, b in zip(w0, Cv))
    head = -sum((d * x for d, x in zip(delta[1:], u[1:])), Fraction(0))
    return ShiftMap(delta, (head,) + u[1:])


def shifted_genuine_walls(Q: Quiver, v: Sequence[int]) -> list[IntVec]:
    """Genuine walls of nδ transported to the stability space of v by the shift map."""
    n = num_points(Q, v)
    phi = shift_map_phi(Q, v)
    return canonical_walls(phi.push_normal(r) for r in genuine_walls_affine(Q, n))


@dataclass(frozen=True)
class CornerFiber:
    tau: int
    sign: int  # +1 for the τ + k > 0 branch, −1 otherwise
    beta: IntVec
    ell: int
    framing_dim: int  # w_ℓ
    fiber_dim: int  # the fiber is Gr(ℓ, w_ℓ) ≅ ℙ^{fiber_dim}
    divisorial: bool

    def framing_at(self, ell: int) -> int:
        """w_ℓ = ±k + 2ℓ for an arbitrary ℓ on this branch."""
        return self.framing_dim - 2 * self.ell + 2 * ell


def _pad_finite(Q: Quiver, alpha: Sequence[int]) -> IntVec:
    if len(alpha) == Q.n_vertices - 1:
        return (0, *map(int, alpha))
    if len(alpha) == Q.n_vertices and int(alpha[0]) == 0:
        return tuple(map(int, alpha))
    raise QuiverError("alpha must be a finite root (no affine component)")


def corner_fiber_data(Q: Quiver, v: Sequence[int], alpha: Sequence[int], k: int) -> CornerFiber:
    """Grassmannian fiber data over the wall ((τ+k)δ − α)⊥, τ = −αᵀCv."""
    R = affine_root_system(Q)
    delta = R.null_root
    a = _pad_finite(Q, alpha)
    if Q.pair(a, a) != 2:
        raise QuiverError(f"{tuple(alpha)} is not a real finite root")
    tau = int(-Q.pair(a, v))
    if tau + k > 0:
        sign = 1
        beta = tuple((tau + k) * d - x for d, x in zip(delta, a))
    else:
        sign = -1
        beta = tuple(-(tau + k) * d + x for d, x in zip(delta, a))
    sigma = sign * k
    ell = 1 if sigma >= 0 else 1 - sigma
    w = sigma + 2 * ell
    return CornerFiber(tau, sign, beta, ell, w, w - 1, w - 1 == 1)


def hecke_fiber_dim(
    Q: Quiver, v: Sequence[int], w: Sequence[int], i: int, r: int
) -> tuple[int, int]:
    """(ρᵢᵀ(w − Cv) + r − 1, r − 1)."""
    _check_dims(Q, v, w)
    u = Fraction(w[i]) - Q.apply_cartan(v)[i]
    return int(u) + r - 1, r - 1


def partitions(n: int, largest: int | None = None) -> Iterable[tuple[int, ...]]:
    """Partitions of n in reverse lexicographic order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first, *rest)


def strata_labels(n: int) -> list[tuple[tuple[int, ...], int]]:
    if n < 0:
        raise QuiverError("n must be non-negative")
    return [(lam, k) for k in range(n + 1) for lam in partitions(n - k)]
