"""Lattice vertex algebra V_Λ = Fock space ⊗ ℚ[Λ]_ε, computed exactly.

States are finite combinations of p ⊗ e^γ where p is a polynomial in the
creation variables y_{i,k} = b_i(−k)|vac⟩ (b_i the lattice basis, k ≥ 1).
On such states

* h(−k) multiplies by Σ hᵢ y_{i,k},
* h(k) acts by k Σᵢ ⟨h, bᵢ⟩ ∂/∂y_{i,k},
* h(0) multiplies by ⟨h, γ⟩.

Mode convention: X(e^α, z) = exp(φ₋) e^α z^{α(0)} exp(φ₊) = Σ x_n(α) z^{−n−1}.
With this indexing the brackets [x_n(α), x_m(−α)] = ε(α,−α)(α(n+m) + n δ_{n+m,0})
hold and x_{−1}(α) vac = e^α.  L(0) acts on p ⊗ e^γ by deg p + ⟨γ,γ⟩/2 and the
degree operator is d = −L(0).

The pairing ⟨−,−⟩ is positive on roots: for surface lattices (NS-type
catalogue entries) it is the negated intersection form.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .lattice_core import IntegralLattice, LatticeError, format_rational, standard_lattice
from .parallel import pmap

Var = tuple[int, int]  # (mode k ≥ 1, basis index i)
Mono = tuple[tuple[Var, int], ...]
Poly = dict[Mono, mpq]  # gmpy2 rationals: exact, and much faster than Fraction
Marker = tuple[int, ...]
VAC: Mono = ()


class VOAError(ValueError):
    pass


# lattices whose catalogue form is an intersection form (negative on −2 curves)
SURFACE_LATTICES = ("U", "K3", "K3-H2", "elliptic", "elliptic-I2", "elliptic-I3")


def _mono_degree(m: Mono) -> int:
    return sum(k * e for (k, _), e in m)


def _mul_var(m: Mono, var: Var) -> Mono:
    d = dict(m)
    d[var] = d.get(var, 0) + 1
    return tuple(sorted(d.items()))


def _mul_mono(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _diff_var(m: Mono, var: Var) -> tuple[int, Mono]:
    d = dict(m)
    e = d.get(var, 0)
    if e == 0:
        return 0, m
    if e == 1:
        del d[var]
    else:
        d[var] = e - 1
    return e, tuple(sorted(d.items()))


def _add_into(acc: Poly, p: Mapping[Mono, mpq], c: mpq = mpq(1)) -> None:
    for m, a in p.items():
        v = acc.get(m, 0) + c * a
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


@lru_cache(maxsize=None)
def fock_basis(rank: int, degree: int) -> tuple[Mono, ...]:
    """Monomials of the given degree in canonical partition-colored order.

    A monomial is read as a multiset of parts (k, i); parts are listed in
    non-increasing order and monomials are sorted lexicographically on that
    list, largest first.
    """
    parts = [(k, i) for k in range(degree, 0, -1) for i in range(rank - 1, -1, -1)]

    def rec(rem: int, start: int) -> Iterable[list[Var]]:
        if rem == 0:
            yield []
            return
        for idx in range(start, len(parts)):
            k, i = parts[idx]
            if k <= rem:
                for rest in rec(rem - k, idx):
                    yield [(k, i), *rest]

    out = []
    for seq in rec(degree, 0):
        d: dict[Var, int] = {}
        for v in seq:
            d[v] = d.get(v, 0) + 1
        out.append(tuple(sorted(d.items())))
    return tuple(out)


@dataclass(frozen=True)
class VertexLattice:
    """Even lattice with the (positive on roots) pairing used by the vertex algebra."""

    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self) -> None:
        L = IntegralLattice(self.gram)
        if any(L.gram[i][i] % 2 for i in range(L.rank)):
            raise VOAError("the vertex algebra needs an even lattice")
        object.__setattr__(self, "gram", L.gram)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        return sum(x[i] * self.gram[i][j] * y[j] for i in range(self.rank) for j in range(self.rank)
                   if x[i] and y[j])

    def basis(self) -> list[Marker]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]


def vertex_lattice(name: str) -> VertexLattice:
    """Catalogue lattice with the sign convention of this module."""
    try:
        L = standard_lattice(name)
    except LatticeError as exc:
        raise VOAError(str(exc)) from exc
    if name in SURFACE_LATTICES:
        L = L.negated()
    return VertexLattice(L.gram, name)


@dataclass(frozen=True)
class Cocycle:
    """ε(bᵢ, bⱼ) = 1 for i ≤ j and (−1)^{⟨bᵢ,bⱼ⟩} for i > j, extended bimultiplicatively."""

    lattice: VertexLattice

    def __call__(self, a: Sequence[int], b: Sequence[int]) -> int:
        g = self.lattice.gram
        r = self.lattice.rank
        e = sum(a[i] * b[j] * g[i][j] for i in range(r) for j in range(i) if a[i] and b[j])
        return -1 if e % 2 else 1


def build_cocycle(lattice: VertexLattice) -> Cocycle:
    return Cocycle(lattice)


@dataclass
class VOAElement:
    """Finite combination of p ⊗ e^γ; ``lost`` records truncated-away terms."""

    terms: dict[tuple[Marker, Mono], Fraction] = field(default_factory=dict)
    truncation: int | None = None
    lost: bool = False

    @classmethod
    def vacuum(cls, rank: int, gamma: Sequence[int] | None = None, truncation: int | None = None):
        g = tuple(gamma) if gamma is not None else (0,) * rank
        return cls({(g, VAC): Fraction(1)}, truncation)

    def add_poly(self, gamma: Marker, p: Mapping[Mono, Fraction], c: Fraction = Fraction(1)) -> None:
        for m, a in p.items():
            if self.truncation is not None and _mono_degree(m) > self.truncation:
                if a:
                    self.lost = True
                continue
            key = (gamma, m)
            v = self.terms.get(key, 0) + Fraction(c * a)
            if v:
                self.terms[key] = v
            else:
                self.terms.pop(key, None)

    def by_marker(self) -> dict[Marker, Poly]:
        out: dict[Marker, Poly] = {}
        for (g, m), a in self.terms.items():
            out.setdefault(g, {})[m] = mpq(a.numerator, a.denominator)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VOAElement) and self.terms == other.terms

    def __add__(self, other: VOAElement) -> VOAElement:
        out = VOAElement(dict(self.terms), _min_trunc(self.truncation, other.truncation),
                         self.lost or other.lost)
        for (g, m), a in other.terms.items():
            out.add_poly(g, {m: a})
        return out

    def scaled(self, c: object) -> VOAElement:
        c = Fraction(c)
        return VOAElement({k: c * a for k, a in self.terms.items() if c}, self.truncation, self.lost)


def _min_trunc(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LatticeVOA:
    """Mode operators on V_Λ with memoized action on basis monomials."""

    def __init__(self, lattice: VertexLattice) -> None:
        self.lattice = lattice
        self.eps = build_cocycle(lattice)
        self._cache: dict[tuple, object] = {}

    @property
    def rank(self) -> int:
        return self.lattice.rank

    # Heisenberg

    def _heis_poly(self, h: Sequence[int], n: int, gamma: Marker, p: Mapping[Mono, Fraction]) -> Poly:
        out: Poly = {}
        r = self.rank
        if n < 0:
            for m, a in p.items():
                for i in range(r):
                    if h[i]:
                        _add_into(out, {_mul_var(m, (-n, i)): a}, mpq(h[i]))
        elif n > 0:
            coeffs = [n * self.lattice.pair(h, b) for b in self.lattice.basis()]
            for m, a in p.items():
                for i in range(r):
                    if coeffs[i]:
                        e, m2 = _diff_var(m, (n, i))
                        if e:
                            _add_into(out, {m2: a}, mpq(coeffs[i] * e))
        else:
            c = self.lattice.pair(h, gamma)
            if c:
                out = {m: c * a for m, a in p.items()}
        return out

    def heis_act(self, h: Sequence[int], n: int, x: VOAElement) -> VOAElement:
        out = VOAElement({}, x.truncation, x.lost)
        for g, p in x.by_marker().items():
            out.add_poly(g, self._heis_poly(h, n, g, p))
        return out

    # vertex operators

    def _annihilation(self, alpha: Marker, mono: Mono) -> list[Poly]:
        """A_j = coefficient of z^{−j} in exp(−Σ α(k) z^{−k}/k) applied to mono."""
        key = ("A", alpha, mono)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        neg_alpha = tuple(-a for a in alpha)
        zero = (0,) * self.rank
        A: list[Poly] = [{mono: mpq(1)}]
        for j in range(1, _mono_degree(mono) + 1):
            acc: Poly = {}
            for k in range(1, j + 1):
                if A[j - k]:
                    _add_into(acc, self._heis_poly(neg_alpha, k, zero, A[j - k]))
            A.append({m: a / j for m, a in acc.items()})
        self._cache[key] = A
        return A

    def _creation(self, alpha: Marker, i: int) -> Poly:
        """S_i = coefficient of z^i in exp(Σ α(−k) z^k/k) applied to the vacuum."""
        key = ("S", alpha)
        S = self._cache.setdefault(key, [{VAC: mpq(1)}])
        zero = (0,) * self.rank
        while len(S) <= i:
            l = len(S)
            acc: Poly = {}
            for k in range(1, l + 1):
                _add_into(acc, self._heis_poly(alpha, -k, zero, S[l - k]))
            S.append({m: a / l for m, a in acc.items()})
        return S[i]

    def _x_fock(self, alpha: Marker, shift: int, mono: Mono) -> Poly:
        """Fock part Σ_j S_{j−shift}(α)·A_j(mono), where shift = ⟨α,γ⟩ + n + 1."""
        key = ("X", alpha, shift, mono)
        out = self._cache.get(key)
        if out is None:
            out = {}
            for j, Aj in enumerate(self._annihilation(alpha, mono)):
                i = j - shift
                if i < 0 or not Aj:
                    continue
                for m1, a1 in self._creation(alpha, i).items():
                    for m2, a2 in Aj.items():
                        _add_into(out, {_mul_mono(m1, m2): a1 * a2})
            self._cache[key] = out
        return out

    def vertex_poly(self, alpha: Sequence[int], n: int, gamma: Marker, p: Mapping[Mono, mpq]):
        """x_n(α)(p ⊗ e^γ) = ε(α,γ) Σ_j S_{j−⟨α,γ⟩−n−1}(α) A_j(p) ⊗ e^{γ+α}."""
        alpha = tuple(alpha)
        shift = self.lattice.pair(alpha, gamma) + n + 1
        sign = mpq(self.eps(alpha, gamma))
        out: Poly = {}
        for m, a in p.items():
            q = self._x_fock(alpha, shift, m)
            if q:
                _add_into(out, q, sign * a)
        return tuple(x + g for x, g in zip(alpha, gamma)), out

    def vertex_mode(self, alpha: Sequence[int], n: int, x: VOAElement) -> VOAElement:
        out = VOAElement({}, x.truncation, x.lost)
        for g, p in x.by_marker().items():
            t, q = self.vertex_poly(alpha, n, g, p)
            out.add_poly(t, q)
        return out

    # gradings

    def L0(self, x: VOAElement) -> VOAElement:
        out = VOAElement({}, x.truncation, x.lost)
        for (g, m), a in x.terms.items():
            w = _mono_degree(m) + Fraction(self.lattice.pair(g, g), 2)
            out.add_poly(g, {m: a * w})
        return out

    def chevalley_act(self, gen: str, i: int, n: int, x: VOAElement) -> VOAElement:
        """e_i⊗tⁿ ↦ x_n(αᵢ), f_i⊗tⁿ ↦ x_n(−αᵢ), h_i⊗tⁿ ↦ αᵢ(n), c ↦ 1, d ↦ −L(0)."""
        b = self.lattice.basis()
        if gen == "c":
            return x
        if gen == "d":
            return self.L0(x).scaled(-1)
        if not 0 <= i < self.rank:
            raise VOAError(f"no simple root with index {i}")
        if gen == "e":
            return self.vertex_mode(b[i], n, x)
        if gen == "f":
            return self.vertex_mode(tuple(-a for a in b[i]), n, x)
        if gen == "h":
            return self.heis_act(b[i], n, x)
        raise VOAError(f"unknown generator {gen!r}")


def weight_decomposition(voa: LatticeVOA, x: VOAElement) -> dict[tuple[Marker, int], dict]:
    """Split x by (γ, Fock degree); each component reports its L(0) and d eigenvalues."""
    out: dict[tuple[Marker, int], dict] = {}
    for (g, m), a in sorted(x.terms.items()):
        k = _mono_degree(m)
        comp = out.setdefault((g, k), {"terms": {}, "L0": None, "d": None})
        comp["terms"][m] = a
        l0 = k + Fraction(voa.lattice.pair(g, g), 2)
        comp["L0"], comp["d"] = l0, -l0
    return out


# exhaustive relation checks on graded components


@dataclass(frozen=True)
class Component:
    gamma: Marker
    degree: int


def _markers(rank: int, radius: int) -> list[Marker]:
    return [tuple(x) for x in itertools.product(range(-radius, radius + 1), repeat=rank)]


Op = tuple  # ("x", alpha, n) or ("h", h, n)


def _apply_op(voa: LatticeVOA, op: Op, gamma: Marker, p: Poly) -> tuple[Marker, Poly]:
    if op[0] == "x":
        return voa.vertex_poly(op[1], op[2], gamma, p)
    return gamma, voa._heis_poly(op[1], op[2], gamma, p)


def _apply_word(voa: LatticeVOA, word: Sequence[Op], gamma: Marker, p: Poly):
    """Apply ops right to left (word[-1] first)."""
    for op in reversed(word):
        gamma, p = _apply_op(voa, op, gamma, p)
        if not p:
            break
    return gamma, p


def _apply_sum(voa: LatticeVOA, terms: Sequence[tuple[Fraction, Sequence[Op]]], gamma, mono):
    total: dict[Marker, Poly] = {}
    for c, word in terms:
        g, p = _apply_word(voa, word, gamma, {mono: mpq(1)})
        if p:
            _add_into(total.setdefault(g, {}), p, mpq(c))
    return {g: p for g, p in total.items() if p}


@dataclass(frozen=True)
class RelationCheck:
    relation: str
    lattice: str
    degree: int
    status: str
    checked: int
    witness: dict | None = None

    def to_dict(self) -> dict:
        d = {"relation": self.relation, "lattice": self.lattice, "degree": self.degree,
             "status": self.status, "checked": self.checked}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def _word_in_range(voa: LatticeVOA, word: Sequence[Op], gamma: Marker, k: int, N: int) -> bool:
    """True if every intermediate Fock degree of the word stays ≤ N (negative means the word vanishes)."""
    for op in reversed(word):
        if op[0] == "x":
            k = k - op[2] - 1 - voa.lattice.pair(op[1], gamma)
            gamma = _add(gamma, op[1])
        else:
            k = k - op[2]
        if k < 0:
            return True
        if k > N:
            return False
    return True


def _check_identity(voa, lhs, rhs, components, bound=None) -> tuple[int, dict | None]:
    """lhs − rhs = 0 on every basis vector of every component; returns (count, witness).

    With a bound, components whose words leave the degree ≤ bound range are skipped.
    """
    terms = list(lhs) + [(-c, w) for c, w in rhs]
    count = 0
    for comp in components:
        if bound is not None and not all(_word_in_range(voa, w, comp.gamma, comp.degree, bound)
                                         for _, w in terms):
            continue
        for mono in fock_basis(voa.rank, comp.degree):
            count += 1
            res = _apply_sum(voa, terms, comp.gamma, mono)
            if res:
                g, p = next(iter(res.items()))
                m, a = next(iter(p.items()))
                return count, {"gamma": list(comp.gamma), "source": _mono_str(mono),
                               "target_gamma": list(g), "term": _mono_str(m),
                               "residual": format_rational(a)}
    return count, None


def _mono_str(m: Mono) -> str:
    if not m:
        return "vac"
    return "*".join(f"b{i}(-{k})" + (f"^{e}" if e > 1 else "") for (k, i), e in m)


def _neg(a: Marker) -> Marker:
    return tuple(-x for x in a)


def _add(a: Marker, b: Marker) -> Marker:
    return tuple(x + y for x, y in zip(a, b))


def relation_instances(voa: LatticeVOA, modes: int, roots: Sequence[Marker] | None = None):
    """(name, lhs, rhs) triples for the bracket relations over ±basis pairs and modes |n| ≤ modes."""
    L = voa.lattice
    basis = L.basis()
    vecs = roots if roots is not None else basis + [_neg(b) for b in basis]
    rng = range(-modes, modes + 1)
    out = []
    for h in basis:
        for a in vecs:
            for n in rng:
                for m in rng:
                    lhs = [(1, [("h", h, n), ("x", a, m)]), (-1, [("x", a, m), ("h", h, n)])]
                    rhs = [(L.pair(h, a), [("x", a, n + m)])]
                    out.append(("hx", lhs, rhs))
    for a in vecs:
        for b in vecs:
            ab = L.pair(a, b)
            opposite = _add(a, b) == (0,) * L.rank
            if not (ab >= 0 or ab == -1 or (opposite and L.pair(a, a) == 2)):
                continue
            e = voa.eps(a, b)
            for n in rng:
                for m in rng:
                    lhs = [(1, [("x", a, n), ("x", b, m)]), (-1, [("x", b, m), ("x", a, n)])]
                    if opposite and L.pair(a, a) == 2:
                        rhs = [(e, [("h", a, n + m)])]
                        if n + m == 0 and n != 0:
                            rhs.append((e * n, []))
                    elif ab >= 0:
                        rhs = []
                    else:
                        rhs = [(e, [("x", _add(a, b), n + m)])]
                    out.append(("xx", lhs, rhs))
    return out


def serre_instances(voa: LatticeVOA, n: int = 0):
    """(ad x_n(±αᵢ))^{1−⟨αᵢ,αⱼ⟩} x_n(±αⱼ) = 0 for distinct norm-2 basis vectors."""
    L = voa.lattice
    basis = L.basis()
    out = []
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            if i == j or L.pair(a, a) != 2 or L.pair(b, b) != 2:
                continue
            aij = L.pair(a, b)
            if aij > 0:
                continue
            p = 1 - aij
            for sgn in (1, -1):
                xa = ("x", tuple(sgn * t for t in a), n)
                xb = ("x", tuple(sgn * t for t in b), n)
                # (ad X)^p Y = Σ_k (−1)^k C(p,k) X^{p−k} Y X^k
                from math import comb

                lhs = [((-1) ** k * comb(p, k), [xa] * (p - k) + [xb] + [xa] * k) for k in range(p + 1)]
                out.append(("serre", lhs, []))
    return out


def isotropic_instances(voa: LatticeVOA, F: Sequence[int], modes: int):
    F = tuple(F)
    if voa.lattice.pair(F, F) != 0:
        raise VOAError("the commuting check needs an isotropic class")
    out = []
    for n in range(-modes, modes + 1):
        for m in range(-modes, modes + 1):
            lhs = [(1, [("x", F, n), ("x", _neg(F), m)]), (-1, [("x", _neg(F), m), ("x", F, n)])]
            out.append(("isotropic", lhs, []))
    return out


@dataclass
class RelationReport:
    lattice: str
    truncation: int
    checks: list[RelationCheck]

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_json(self) -> str:
        data = {"lattice": self.lattice, "truncation": self.truncation, "ok": self.ok,
                "results": [c.to_dict() for c in self.checks]}
        return json.dumps(data, indent=1, sort_keys=True) + "\n"


def relation_suite(
    voa: LatticeVOA,
    truncation: int,
    *,
    modes: int = 2,
    marker_radius: int = 1,
    isotropic: Sequence[Sequence[int]] = (),
    in_range_only: bool = True,
    relations: Sequence[str] | None = None,
) -> RelationReport:
    """Check every relation on each component (γ, k) with |γᵢ| ≤ marker_radius and k ≤ truncation.

    Each check is an exact identity of rational matrices from a source
    component to its image.  With in_range_only, a check is asserted only when
    every operator word stays within Fock degree ≤ truncation; otherwise the
    words are evaluated exactly on the full space, whatever degree they reach.
    """
    name = voa.lattice.name or "lattice"
    instances = relation_instances(voa, modes) + serre_instances(voa)
    for F in isotropic:
        instances += isotropic_instances(voa, F, modes)
    if relations is not None:
        unknown = set(relations) - {"hx", "xx", "serre", "isotropic"}
        if unknown:
            raise VOAError(f"unknown relations {sorted(unknown)}")
        instances = [t for t in instances if t[0] in relations]
    markers = _markers(voa.rank, marker_radius)
    groups: dict[tuple[str, int], list] = {}
    for rel, lhs, rhs in instances:
        for k in range(truncation + 1):
            groups.setdefault((rel, k), []).append((lhs, rhs))

    def run(item):
        (rel, k), insts = item
        comps = [Component(g, k) for g in markers]
        total = 0
        for lhs, rhs in insts:
            cnt, wit = _check_identity(voa, lhs, rhs, comps, truncation if in_range_only else None)
            total += cnt
            if wit is not None:
                return RelationCheck(rel, name, k, "fail", total, wit)
        return RelationCheck(rel, name, k, "pass", total)

    checks = pmap(run, sorted(groups.items(), key=lambda kv: kv[0]))
    return RelationReport(name, truncation, checks)


def component_matrix(voa: LatticeVOA, word: Sequence[Op], gamma: Sequence[int], degree: int):
    """Dense matrix of a composed operator from component (γ, degree) to its image.

    Columns follow fock_basis(rank, degree); rows follow the target component's
    basis.  Returns (target γ, target degree or None, rows).
    """
    gamma = tuple(gamma)
    src = fock_basis(voa.rank, degree)
    cols = []
    target = None
    for mono in src:
        g, p = _apply_word(voa, word, gamma, {mono: mpq(1)})
        cols.append(p)
        if p:
            target = (g, _mono_degree(next(iter(p))))
    if target is None:
        return None, None, []
    tg, tk = target
    tb = fock_basis(voa.rank, tk)
    rows = [[Fraction(col.get(m, 0)) for col in cols] for m in tb]
    return tg, tk, rows


def matrix_csv(rows: Sequence[Sequence[Fraction]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([format_rational(a) for a in r])
    return buf.getvalue()
