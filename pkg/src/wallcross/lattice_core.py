"""Exact integral lattices, Mukai vectors and the standard lattice catalogue."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

Rational = Fraction
Vector = tuple[Fraction, ...]


class LatticeError(ValueError):
    pass


def as_fraction(x: object) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction. Floats are refused."""
    if isinstance(x, bool):
        raise LatticeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not re.fullmatch(r"[+-]?\d+(/[+-]?\d+)?", s):
            raise LatticeError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise LatticeError(f"cannot use {type(x).__name__} as an exact rational")


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable[object]) -> Vector:
    return tuple(as_fraction(x) for x in xs)


def add(x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
    if len(x) != len(y):
        raise LatticeError("dimension mismatch")
    return tuple(Fraction(a) + b for a, b in zip(x, y))


def sub(x: Sequence[Fraction], y: Sequence[Fraction]) -> Vector:
    if len(x) != len(y):
        raise LatticeError("dimension mismatch")
    return tuple(Fraction(a) - b for a, b in zip(x, y))


def scale(c: object, x: Sequence[Fraction]) -> Vector:
    c = as_fraction(c)
    return tuple(c * a for a in x)


def dot(x: Sequence[object], y: Sequence[object]) -> Fraction:
    """Euclidean dot product (used for wall normals against GIT parameters)."""
    if len(x) != len(y):
        raise LatticeError("dimension mismatch")
    return sum((Fraction(a) * Fraction(b) for a, b in zip(x, y)), Fraction(0))


def primitive_integer(x: Sequence[object], *, orient: bool = True) -> tuple[int, ...]:
    """Smallest integer vector on the ray (or line, if ``orient``) through x.

    With ``orient`` the first nonzero entry is made positive, which is the
    canonical form used for wall normals.
    """
    fr = [as_fraction(a) for a in x]
    if all(a == 0 for a in fr):
        raise LatticeError("zero vector has no primitive representative")
    from math import gcd, lcm

    den = lcm(*(a.denominator for a in fr))
    ints = [int(a * den) for a in fr]
    g = gcd(*ints)
    ints = [a // g for a in ints]
    if orient:
        lead = next(a for a in ints if a != 0)
        if lead < 0:
            ints = [-a for a in ints]
    return tuple(ints)


def solve_rational(matrix: Sequence[Sequence[object]], rhs: Sequence[object]) -> Vector:
    """Solve the square nonsingular system M x = b exactly by Gauss–Jordan."""
    n = len(matrix)
    rows = [[as_fraction(a) for a in row] + [as_fraction(b)] for row, b in zip(matrix, rhs)]
    if len(rhs) != n or any(len(r) != n + 1 for r in rows):
        raise LatticeError("solve_rational needs a square system")
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            raise LatticeError("singular system")
        rows[c], rows[p] = rows[p], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [a * inv for a in rows[c]]
        for i in range(n):
            if i != c and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return tuple(r[n] for r in rows)


def rational_sqrt(q: object) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if it is irrational."""
    from math import isqrt

    q = as_fraction(q)
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


@dataclass(frozen=True)
class IntegralLattice:
    gram: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None
    even: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        g = tuple(tuple(int(a) for a in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if n == 0:
            raise LatticeError("lattice must have positive rank")
        if any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise LatticeError("gram matrix must be symmetric")
        if self.even and any(g[i][i] % 2 for i in range(n)):
            raise LatticeError(f"lattice {self.name or ''} flagged even has an odd diagonal entry")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != n:
                raise LatticeError("one label per basis vector")
            object.__setattr__(self, "labels", labels)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        n = self.rank
        if len(x) != n or len(y) != n:
            raise LatticeError(f"dimension mismatch: expected length {n}")
        xs = [as_fraction(a) for a in x]
        ys = [as_fraction(b) for b in y]
        total = Fraction(0)
        for i, a in enumerate(xs):
            if a:
                row = self.gram[i]
                total += a * sum((row[j] * b for j, b in enumerate(ys) if b), Fraction(0))
        return total

    def norm(self, x: Sequence[object]) -> Fraction:
        return self.pair(x, x)

    def negated(self) -> IntegralLattice:
        return IntegralLattice(
            tuple(tuple(-a for a in row) for row in self.gram),
            self.labels,
            self.even,
            f"-{self.name}" if self.name else "",
        )

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(j == i)) for j in range(self.rank))

    def index(self, label: str) -> int:
        if self.labels is None or label not in self.labels:
            raise LatticeError(f"unknown basis label {label!r}")
        return self.labels.index(label)


def pairing(L: IntegralLattice, x: Sequence[object], y: Sequence[object]) -> Fraction:
    """Evaluate the Gram form xᵀ·G·y."""
    return L.pair(x, y)


def direct_sum(*lattices: IntegralLattice) -> IntegralLattice:
    n = sum(L.rank for L in lattices)
    rows: list[list[int]] = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                rows[off + i][off + j] = L.gram[i][j]
        off += L.rank
    return IntegralLattice(
        tuple(map(tuple, rows)),
        even=all(L.even for L in lattices),
        name="+".join(L.name for L in lattices),
    )


def reflect(
    L: IntegralLattice, alpha: Sequence[object], x: Sequence[object], *, integral: bool = False
) -> Vector:
    """Reflection x − (2(x·α)/(α·α))α in the hyperplane orthogonal to α."""
    a2 = L.norm(alpha)
    if a2 == 0:
        raise LatticeError("cannot reflect in an isotropic vector")
    coeff = 2 * L.pair(x, alpha) / a2
    if integral and coeff.denominator != 1:
        raise LatticeError("reflection does not preserve the integral lattice for this x")
    return sub(vec(x), scale(coeff, vec(alpha)))


def signature(L: IntegralLattice) -> tuple[int, int, int]:
    """(positive, negative, null) by symmetric Gaussian elimination over Q."""
    n = L.rank
    m = [[Fraction(a) for a in row] for row in L.gram]
    pos = neg = 0
    size = n
    k = 0
    while k < size:
        pivot = next((i for i in range(k, size) if m[i][i] != 0), None)
        if pivot is None:
            # all remaining diagonal entries vanish; find an off-diagonal entry
            hit = next(
                ((i, j) for i in range(k, size) for j in range(i + 1, size) if m[i][j] != 0), None
            )
            if hit is None:
                break
            i, j = hit
            # e_i <- e_i + e_j makes the (i,i) entry 2 m[i][j] != 0
            for c in range(size):
                m[i][c] += m[j][c]
            for r in range(size):
                m[r][i] += m[r][j]
            pivot = i
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            for row in m:
                row[k], row[pivot] = row[pivot], row[k]
        p = m[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, size):
            f = m[i][k] / p
            if f:
                for c in range(k, size):
                    m[i][c] -= f * m[k][c]
        for i in range(k + 1, size):
            m[k][i] = Fraction(0)
            m[i][k] = Fraction(0)
        k += 1
    return pos, neg, n - pos - neg


# ---------------------------------------------------------------------------
# Cartan matrices and the catalogue


def _cartan_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    m = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in edges:
        m[i][j] -= 1
        m[j][i] -= 1
    return tuple(map(tuple, m))


def cartan_matrix(kind: str, rank: int) -> tuple[tuple[int, ...], ...]:
    """Finite simply-laced Cartan matrix, Bourbaki labelling (D4 centre is node 2)."""
    if kind == "A" and rank >= 1:
        return _cartan_from_edges(rank, ((i, i + 1) for i in range(rank - 1)))
    if kind == "D" and rank >= 4:
        edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
        return _cartan_from_edges(rank, edges)
    if kind == "E" and rank in (6, 7, 8):
        # Bourbaki: 1-3-4-5-6-(7-(8)), with 2 attached to 4
        edges = [(0, 2), (2, 3), (1, 3)] + [(i, i + 1) for i in range(3, rank - 1)]
        return _cartan_from_edges(rank, edges)
    raise LatticeError(f"no simply-laced Cartan matrix {kind}{rank}")


def affine_cartan_matrix(kind: str, rank: int) -> tuple[tuple[int, ...], ...]:
    """Affine Cartan matrix with the affine node first (index 0)."""
    fin = cartan_matrix(kind, rank)
    if kind == "A" and rank == 1:
        return ((2, -2), (-2, 2))
    n = rank + 1
    m = [[0] * n for _ in range(n)]
    for i in range(rank):
        for j in range(rank):
            m[i + 1][j + 1] = fin[i][j]
    m[0][0] = 2
    # the affine node attaches to the nodes pairing negatively with the highest root
    from .root_systems import RootSystem  # local import: root systems depend on this module

    theta = RootSystem.finite(fin).highest_root()
    for j in range(rank):
        c = -sum(theta[i] * fin[i][j] for i in range(rank))
        m[0][j + 1] = c
        m[j + 1][0] = c
    return tuple(map(tuple, m))


_NAME = re.compile(r"^(affine-)?([ADE])(\d+)(-cartan)?$")

E8_GRAM = cartan_matrix("E", 8)
U_GRAM = ((0, 1), (1, 0))

_NAMED_LATTICES: dict[str, tuple[tuple[tuple[int, ...], ...], tuple[str, ...]]] = {
    "elliptic": (((0, 1), (1, -2)), ("F", "S0")),
    "elliptic-I2": (((-2, 2, 0), (2, -2, 1), (0, 1, -2)), ("C0", "C1", "S")),
    "elliptic-I3": (
        ((-2, 1, 1, 0), (1, -2, 1, 0), (1, 1, -2, 1), (0, 0, 1, -2)),
        ("C0", "C1", "C2", "S"),
    ),
}

CATALOGUE_NAMES = (
    "U",
    "E6",
    "E7",
    "E8",
    "Ak",
    "Dk",
    "affine-Ak",
    "affine-Dk",
    "affine-E6",
    "affine-E7",
    "affine-E8",
    "K3",
    "K3-H2",
    "elliptic",
    "elliptic-I2",
    "elliptic-I3",
)


def standard_lattice(name: str) -> IntegralLattice:
    """Look up a lattice by name.

    ``U``, ``K3`` (the full Mukai lattice U⁴ ⊕ −E8 ⊕ −E8), ``K3-H2``
    (U³ ⊕ −E8 ⊕ −E8), Cartan matrices ``A3``/``A3-cartan``/``D4``/``E6``...,
    affine Cartan matrices ``affine-A2`` etc., and the elliptic Picard lattices
    ``elliptic``, ``elliptic-I2``, ``elliptic-I3``.
    """
    if name == "U":
        return IntegralLattice(U_GRAM, ("e", "f"), even=True, name="U")
    if name in ("K3", "K3-H2"):
        copies = 4 if name == "K3" else 3
        u = standard_lattice("U")
        e8 = IntegralLattice(E8_GRAM, even=True, name="E8").negated()
        L = direct_sum(*([u] * copies), e8, e8)
        return IntegralLattice(L.gram, even=True, name=name)
    if name in _NAMED_LATTICES:
        gram, labels = _NAMED_LATTICES[name]
        return IntegralLattice(gram, labels, even=True, name=name)
    m = _NAME.match(name)
    if m:
        affine, kind, rank = bool(m.group(1)), m.group(2), int(m.group(3))
        try:
            gram = affine_cartan_matrix(kind, rank) if affine else cartan_matrix(kind, rank)
        except LatticeError as exc:
            raise LatticeError(f"unknown lattice {name!r}") from exc
        return IntegralLattice(gram, even=True, name=name)
    raise LatticeError(f"unknown lattice {name!r}")


# ---------------------------------------------------------------------------
# Surfaces and Mukai vectors


@dataclass(frozen=True)
class SurfaceConfig:
    """NS lattice with named simple −2 curves and contractible collections."""

    ns: IntegralLattice
    curves: Mapping[str, Vector] = field(default_factory=dict)
    collections: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    # a nonzero class in the closure of the positive cone (e.g. an elliptic fibre);
    # it singles out the component that contains the ample cone
    positive_class: Vector | None = None

    def __post_init__(self) -> None:
        if self.positive_class is not None:
            h = vec(self.positive_class)
            if len(h) != self.ns.rank or self.ns.norm(h) < 0 or not any(h):
                raise LatticeError("positive_class must be a nonzero class with h² ≥ 0")
            object.__setattr__(self, "positive_class", h)
        curves = {k: vec(v) for k, v in self.curves.items()}
        object.__setattr__(self, "curves", curves)
        object.__setattr__(
            self, "collections", {k: tuple(v) for k, v in self.collections.items()}
        )
        for name, c in curves.items():
            if len(c) != self.ns.rank:
                raise LatticeError(f"curve {name} has wrong length")
            if self.ns.norm(c) != -2:
                raise LatticeError(f"curve {name} is not a -2 class")
        names = list(curves)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                p = self.ns.pair(curves[a], curves[b])
                if p not in (0, 1):
                    raise LatticeError(f"curves {a},{b} meet with multiplicity {p}")
        for cname, members in self.collections.items():
            for m in members:
                if m not in curves:
                    raise LatticeError(f"collection {cname} names unknown curve {m}")

    @property
    def rank(self) -> int:
        return self.ns.rank

    def collection(self, name: str | Sequence[str] | None) -> tuple[Vector, ...]:
        """Curve classes of a named collection (or of an explicit list of curve names)."""
        if name is None:
            return ()
        if isinstance(name, str):
            if name not in self.collections:
                raise LatticeError(f"unknown collection {name!r}")
            members = self.collections[name]
        else:
            members = tuple(name)
        return tuple(self.curves[m] for m in members)

    def intersection(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        return self.ns.pair(x, y)

    def kac_moody_pairing(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        """The negated intersection form used on the Lie algebra side."""
        return -self.ns.pair(x, y)


def surface_from_dict(data: Mapping[str, object]) -> SurfaceConfig:
    if "gram" not in data:
        raise LatticeError("surface config needs a 'gram' field")
    gram = data["gram"]
    if not isinstance(gram, list) or not all(isinstance(r, list) for r in gram):
        raise LatticeError("'gram' must be a list of integer rows")
    labels = data.get("labels")
    ns = IntegralLattice(tuple(tuple(r) for r in gram), tuple(labels) if labels else None, even=True)
    curves = {str(k): vec(v) for k, v in dict(data.get("curves", {})).items()}
    cols = {str(k): tuple(v) for k, v in dict(data.get("collections", {})).items()}
    h = data.get("positive_class")
    return SurfaceConfig(ns, curves, cols, vec(h) if h is not None else None)


def load_surface_config(path: str | Path) -> SurfaceConfig:
    return surface_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def standard_surface(name: str) -> SurfaceConfig:
    """Surface configurations for the elliptic K3 Picard lattices."""
    if name == "elliptic":
        ns = standard_lattice("elliptic")
        return SurfaceConfig(ns, {"S0": (0, 1)}, {"A1": ("S0",)}, (1, 0))
    if name == "elliptic-I2":
        # C0·C1 = 2 violates the transversality assumption, so only C1 and S are simple curves here
        ns = standard_lattice("elliptic-I2")
        curves = {"C1": (0, 1, 0), "S": (0, 0, 1)}
        return SurfaceConfig(ns, curves, {"A1": ("S",), "A2": ("C1", "S")}, (1, 1, 0))
    if name == "elliptic-I3":
        ns = standard_lattice("elliptic-I3")
        curves = {"C0": (1, 0, 0, 0), "C1": (0, 1, 0, 0), "C2": (0, 0, 1, 0), "S": (0, 0, 0, 1)}
        return SurfaceConfig(
            ns, curves, {"A1": ("S",), "A2": ("C0", "C1"), "A2S": ("C2", "S")}, (1, 1, 1, 0)
        )
    raise LatticeError(f"unknown surface {name!r}")


@dataclass(frozen=True)
class MukaiVector:
    r: Fraction
    c1: Vector
    s: Fraction

    def __init__(self, r: object, c1: Iterable[object], s: object) -> None:
        object.__setattr__(self, "r", as_fraction(r))
        object.__setattr__(self, "c1", vec(c1))
        object.__setattr__(self, "s", as_fraction(s))

    def __add__(self, other: MukaiVector) -> MukaiVector:
        return MukaiVector(self.r + other.r, add(self.c1, other.c1), self.s + other.s)

    def __sub__(self, other: MukaiVector) -> MukaiVector:
        return MukaiVector(self.r - other.r, sub(self.c1, other.c1), self.s - other.s)

    def __neg__(self) -> MukaiVector:
        return MukaiVector(-self.r, scale(-1, self.c1), -self.s)

    def __rmul__(self, c: object) -> MukaiVector:
        c = as_fraction(c)
        return MukaiVector(c * self.r, scale(c, self.c1), c * self.s)

    def is_zero(self) -> bool:
        return self.r == 0 and self.s == 0 and all(a == 0 for a in self.c1)

    def as_tuple(self) -> tuple[Fraction, ...]:
        return (self.r, *self.c1, self.s)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.as_tuple())

    def __repr__(self) -> str:
        c = ",".join(format_rational(a) for a in self.c1)
        return f"MukaiVector({format_rational(self.r)}, ({c}), {format_rational(self.s)})"


def mukai_pairing(S: SurfaceConfig, v: MukaiVector, w: MukaiVector) -> Fraction:
    """⟨(r,c,s),(r',c',s')⟩ = c·c' − rs' − r's."""
    if len(v.c1) != S.rank or len(w.c1) != S.rank:
        raise LatticeError("Mukai vectors do not live on this surface")
    return S.ns.pair(v.c1, w.c1) - v.r * w.s - w.r * v.s


def classify(S: SurfaceConfig, v: MukaiVector) -> str:
    sq = mukai_pairing(S, v, v)
    if sq == -2:
        return "spherical"
    if sq == 0 and not v.is_zero():
        return "isotropic"
    if sq > 0:
        return "positive"
    return "other"


def hilbert_vector(S: SurfaceConfig, n: int) -> MukaiVector:
    """Mukai vector (1, 0, 1−n) of the ideal sheaf of n points."""
    return MukaiVector(1, (0,) * S.rank, 1 - n)
