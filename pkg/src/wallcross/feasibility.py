"""Exact feasibility of small systems of linear sign conditions.

A system is a list of (functional, sign) pairs with sign in {+1, -1, 0}; it asks
for a rational point x with sign(f·x) = sign for every pair.  Equalities are
eliminated by substitution, strict inequalities by Fourier–Motzkin.  The
systems here are homogeneous; affine conditions are homogenized by the caller
with an extra coordinate constrained to be positive.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = tuple[Fraction, ...]


def _reduce_equalities(
    eqs: list[Row], ineqs: list[Row], dim: int
) -> tuple[list[Row], int] | None:
    """Restrict strict inequalities to the solution space of the equalities.

    Returns the inequalities rewritten in free coordinates, or None when an
    inequality becomes the zero functional (hence infeasible).
    """
    rows = [list(r) for r in eqs]
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    # x_pivot = -sum(row[f] x_f); substitute into each inequality
    out: list[Row] = []
    for g in ineqs:
        new = []
        for f in free:
            val = g[f]
            for i, pc in enumerate(pivots):
                val -= g[pc] * rows[i][f]
            new.append(val)
        out.append(tuple(new))
    return out, len(free)


def _strict_feasible(ineqs: list[Row], dim: int) -> bool:
    """Is there x with g·x > 0 for all g?  Fourier–Motzkin elimination."""
    cur = [g for g in ineqs]
    for var in range(dim):
        if any(all(a == 0 for a in g) for g in cur):
            return False
        pos = [g for g in cur if g[var] > 0]
        neg = [g for g in cur if g[var] < 0]
        rest = [g for g in cur if g[var] == 0]
        combined = []
        for p in pos:
            for q in neg:
                a, b = p[var], -q[var]
                combined.append(tuple(b * x + a * y for x, y in zip(p, q)))
        cur = _dedupe(rest + combined)
        if not cur:
            return True
    return not cur


def _dedupe(rows: list[Row]) -> list[Row]:
    seen = {}
    for g in rows:
        lead = next((a for a in g if a != 0), None)
        key = g if lead is None else tuple(a / abs(lead) for a in g)
        seen.setdefault(key, key)
    return list(seen.values())


def feasible(system: Sequence[tuple[Sequence[Fraction], int]], dim: int) -> bool:
    """Decide whether some x in Q^dim realises every (functional, sign) pair."""
    eqs: list[Row] = []
    ineqs: list[Row] = []
    for f, s in system:
        row = tuple(Fraction(a) for a in f)
        if len(row) != dim:
            raise ValueError("functional has wrong length")
        if s == 0:
            eqs.append(row)
        elif s > 0:
            ineqs.append(row)
        else:
            ineqs.append(tuple(-a for a in row))
    reduced = _reduce_equalities(eqs, ineqs, dim)
    if reduced is None:
        return False
    rows, free_dim = reduced
    if not rows:
        return True
    return _strict_feasible(rows, free_dim)


def affine_box_feasible(
    constraints: Sequence[tuple[Sequence[Fraction], Fraction, Fraction]], dim: int
) -> bool:
    """Is there x with lo < f·x < hi for every (f, lo, hi)?  Homogenized with t > 0."""
    system: list[tuple[tuple[Fraction, ...], int]] = []
    for f, lo, hi in constraints:
        f = tuple(Fraction(a) for a in f)
        system.append((f + (-Fraction(lo),), 1))
        system.append((f + (-Fraction(hi),), -1))
    system.append(((Fraction(0),) * dim + (Fraction(1),), 1))
    return feasible(system, dim + 1)
