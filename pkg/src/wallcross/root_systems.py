"""Simply-laced finite and affine root systems, Weyl orbits and alcoves."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterable, Mapping, Sequence

from .feasibility import affine_box_feasible
from .lattice_core import IntegralLattice, LatticeError, as_fraction

IntVec = tuple[int, ...]


class RootSystemError(ValueError):
    pass


def _components(cartan: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(cartan)
    seen: set[int] = set()
    comps = []
    for s in range(n):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if j != i and cartan[i][j] != 0 and j not in seen:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class RootSystem:
    cartan: IntegralLattice
    kind: str  # "finite" or "affine"
    null_root: IntVec | None = None

    def __post_init__(self) -> None:
        g = self.cartan.gram
        n = self.cartan.rank
        for i in range(n):
            if g[i][i] != 2:
                raise RootSystemError("Cartan matrix needs 2 on the diagonal")
            for j in range(n):
                if i != j and g[i][j] not in (0, -1, -2):
                    raise RootSystemError("off-diagonal Cartan entries must lie in {0,-1,-2}")
        if self.kind not in ("finite", "affine"):
            raise RootSystemError(f"unknown kind {self.kind!r}")
        if self.kind == "affine":
            d = self.null_root
            if d is None or any(sum(g[i][j] * d[j] for j in range(n)) for i in range(n)):
                raise RootSystemError("affine Cartan matrix must annihilate the null root")

    @classmethod
    def finite(cls, cartan: Sequence[Sequence[int]]) -> RootSystem:
        return cls(IntegralLattice(tuple(map(tuple, cartan)), even=True), "finite")

    @classmethod
    def affine(cls, cartan: Sequence[Sequence[int]]) -> RootSystem:
        return cls(
            IntegralLattice(tuple(map(tuple, cartan)), even=True),
            "affine",
            affine_null_root(cartan),
        )

    @classmethod
    def from_name(cls, name: str) -> RootSystem:
        from .lattice_core import standard_lattice

        m = re.fullmatch(r"(affine-)?[ADE]\d+", name)
        if not m:
            raise RootSystemError(f"unknown root system {name!r}")
        try:
            L = standard_lattice(name)
        except LatticeError as exc:
            raise RootSystemError(str(exc)) from exc
        return cls.affine(L.gram) if m.group(1) else cls.finite(L.gram)

    @property
    def rank(self) -> int:
        return self.cartan.rank

    def pair(self, x: Sequence[object], y: Sequence[object]) -> Fraction:
        return self.cartan.pair(x, y)

    def simple_roots(self) -> list[IntVec]:
        n = self.rank
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def _require_finite(self) -> None:
        if self.kind != "finite":
            raise RootSystemError("operation needs a finite root system")

    def positive_roots(self) -> list[IntVec]:
        """Positive roots by closure: add simple roots while the norm stays 2."""
        self._require_finite()
        n = self.rank
        simple = self.simple_roots()
        found = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for r in frontier:
                for a in simple:
                    cand = tuple(x + y for x, y in zip(r, a))
                    if cand not in found and self.pair(cand, cand) == 2:
                        found.add(cand)
                        nxt.append(cand)
            frontier = nxt
            if len(found) > 4 * n * n + 200:
                raise RootSystemError("Cartan matrix is not of finite type")
        return sorted(found, key=lambda r: (sum(r), tuple(-x for x in r)))

    def roots(self) -> list[IntVec]:
        pos = self.positive_roots()
        return pos + [tuple(-x for x in r) for r in pos]

    def highest_root(self) -> IntVec:
        self._require_finite()
        if len(_components(self.cartan.gram)) != 1:
            raise RootSystemError("highest root needs an irreducible root system")
        pos = self.positive_roots()
        maximal = [
            r for r in pos if not any(s != r and all(a >= b for a, b in zip(s, r)) for s in pos)
        ]
        if len(maximal) != 1:
            raise RootSystemError("no unique dominance-maximal root")
        return maximal[0]

    def reflect(self, i: int, v: Sequence[object]) -> tuple[Fraction, ...]:
        a = self.simple_roots()[i]
        c = self.pair(v, a)  # simple roots have norm 2
        return tuple(as_fraction(x) - c * y for x, y in zip(v, a))

    def weyl_orbit(self, v: Sequence[object], bound: int) -> set[tuple[Fraction, ...]]:
        """Images of v under all words in simple reflections of length ≤ bound."""
        start = tuple(as_fraction(x) for x in v)
        orbit = {start}
        frontier = {start}
        for _ in range(bound):
            nxt = set()
            for w in frontier:
                for i in range(self.rank):
                    u = self.reflect(i, w)
                    if u not in orbit:
                        nxt.add(u)
            orbit |= nxt
            frontier = nxt
            if not frontier:
                break
        return orbit

    def affine_walls(self, m_max: int) -> list[IntVec]:
        """Normals δ and mδ+α (0 ≤ m < m_max, α finite root) in affine coordinates.

        The affine node is taken to be index 0; the finite system is the rest.
        """
        if self.kind != "affine":
            raise RootSystemError("affine walls need an affine root system")
        fin = finite_part(self)
        delta = self.null_root
        assert delta is not None
        out = [delta]
        for m in range(m_max):
            for a in fin.roots():
                out.append(tuple(m * d + x for d, x in zip(delta, (0, *a))))
        return out


def affine_null_root(cartan: Sequence[Sequence[int]]) -> IntVec:
    """Positive integer kernel vector of an affine Cartan matrix with entry 1 at node 0."""
    import sympy

    M = sympy.Matrix(cartan)
    ns = M.nullspace()
    if len(ns) != 1:
        raise RootSystemError("Cartan matrix is not of affine type (kernel rank != 1)")
    v = ns[0]
    if v[0] == 0:
        raise RootSystemError("null root vanishes at node 0")
    v = v / v[0]
    if any(x <= 0 or not x.is_integer for x in v):
        raise RootSystemError("Cartan matrix is not of affine type (null root not positive)")
    return tuple(int(x) for x in v)


def finite_part(R: RootSystem) -> RootSystem:
    """Finite root system on the non-affine nodes 1..r."""
    g = R.cartan.gram
    return RootSystem.finite([row[1:] for row in g[1:]])


@dataclass(frozen=True)
class Alcove:
    k: Mapping[IntVec, int]

    def vector(self, order: Iterable[IntVec]) -> tuple[int, ...]:
        return tuple(self.k[a] for a in order)


def root_values(R: RootSystem, x: Sequence[object]) -> dict[IntVec, Fraction]:
    """α(x) = (α, x) under the Cartan form, x written in the simple-root basis."""
    return {a: R.pair(a, x) for a in R.positive_roots()}


def alcove_of(R: RootSystem, x: Sequence[object]) -> Alcove:
    vals = root_values(R, x)
    for a, val in vals.items():
        if val.denominator == 1:
            raise RootSystemError(f"point lies on the affine wall alpha={a}, value {val}")
    return Alcove({a: floor(val) for a, val in vals.items()})


def alcove_is_consistent(R: RootSystem, alcove: Alcove) -> bool:
    """Exact feasibility of k_α < α(x) < k_α + 1 for all positive α."""
    n = R.rank
    constraints = []
    for a, k in alcove.k.items():
        f = tuple(R.pair(a, tuple(int(i == j) for j in range(n))) for i in range(n))
        constraints.append((f, Fraction(k), Fraction(k + 1)))
    return affine_box_feasible(constraints, n)


def point_with_root_values(R: RootSystem, simple_values: Sequence[object]) -> tuple[Fraction, ...]:
    """The point x (simple-root coordinates) with αᵢ(x) equal to the given values."""
    import sympy

    C = sympy.Matrix(R.cartan.gram)
    b = sympy.Matrix([sympy.Rational(str(as_fraction(v))) for v in simple_values])
    sol = C.LUsolve(b)
    return tuple(Fraction(int(s.p), int(s.q)) for s in sol)
