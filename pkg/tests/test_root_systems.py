from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from wallcross.lattice_core import affine_cartan_matrix, cartan_matrix
from wallcross.root_systems import (
    RootSystem,
    RootSystemError,
    affine_null_root,
    alcove_is_consistent,
    alcove_of,
    point_with_root_values,
    root_values,
)

COUNTS = {("A", 1): 1, ("A", 2): 3, ("A", 3): 6, ("A", 4): 10, ("D", 4): 12, ("D", 5): 20,
          ("E", 6): 36, ("E", 7): 63, ("E", 8): 120}


def brute_roots(cartan, bound=3):
    """Norm-2 vectors with coefficients of a single sign in a box (fine for small rank)."""
    n = len(cartan)
    out = []
    for c in itertools.product(range(bound + 1), repeat=n):
        if any(c) and sum(c[i] * cartan[i][j] * c[j] for i in range(n) for j in range(n)) == 2:
            out.append(c)
    return sorted(out)


@pytest.mark.parametrize("kind,rank", sorted(COUNTS))
def test_positive_root_counts(kind, rank):
    R = RootSystem.finite(cartan_matrix(kind, rank))
    roots = R.positive_roots()
    assert len(roots) == COUNTS[(kind, rank)]
    assert all(R.pair(a, a) == 2 for a in roots)


@pytest.mark.parametrize("kind,rank", [("A", 2), ("A", 3), ("D", 4), ("A", 4)])
def test_positive_roots_match_brute_force(kind, rank):
    C = cartan_matrix(kind, rank)
    assert sorted(RootSystem.finite(C).positive_roots()) == brute_roots(C)


def test_small_examples():
    A1 = RootSystem.from_name("A1")
    assert A1.positive_roots() == [(1,)]
    A2 = RootSystem.from_name("A2")
    assert sorted(A2.positive_roots()) == [(0, 1), (1, 0), (1, 1)]
    assert A2.highest_root() == (1, 1)
    D4 = RootSystem.from_name("D4")
    assert D4.highest_root() == (1, 2, 1, 1)
    with pytest.raises(RootSystemError):
        RootSystem.from_name("affine-A2").positive_roots()


def test_weyl_orbit():
    A1 = RootSystem.from_name("A1")
    assert A1.weyl_orbit((1,), 3) == {(1,), (-1,)}
    A2 = RootSystem.from_name("A2")
    orbit = A2.weyl_orbit((1, 0), 6)
    assert orbit == {tuple(map(Fraction, r)) for r in A2.roots()}
    assert A2.weyl_orbit((0, 0), 5) == {(0, 0)}


@pytest.mark.parametrize("name", ["A3", "D4", "E6"])
def test_weyl_orbit_of_root_is_root_set(name):
    R = RootSystem.from_name(name)
    orbit = R.weyl_orbit(R.simple_roots()[0], 20)
    assert orbit == {tuple(map(Fraction, r)) for r in R.roots()}


def test_affine_null_roots():
    assert affine_null_root(affine_cartan_matrix("A", 1)) == (1, 1)
    assert affine_null_root(affine_cartan_matrix("A", 2)) == (1, 1, 1)
    assert affine_null_root(affine_cartan_matrix("D", 4)) == (1, 1, 2, 1, 1)
    assert affine_null_root(affine_cartan_matrix("E", 8))[0] == 1
    with pytest.raises(RootSystemError):
        affine_null_root(cartan_matrix("A", 2))


def test_alcove_examples():
    A1 = RootSystem.from_name("A1")
    assert alcove_of(A1, point_with_root_values(A1, [Fraction(1, 2)])).k == {(1,): 0}
    assert alcove_of(A1, point_with_root_values(A1, [Fraction(-3, 2)])).k == {(1,): -2}
    A2 = RootSystem.from_name("A2")
    x = point_with_root_values(A2, [Fraction(1, 3), Fraction(1, 3)])
    assert alcove_of(A2, x).k == {(1, 0): 0, (0, 1): 0, (1, 1): 0}
    with pytest.raises(RootSystemError):
        alcove_of(A1, point_with_root_values(A1, [1]))


@pytest.mark.parametrize("name", ["A1", "A2", "A3"])
def test_zero_alcove_nonempty(name):
    R = RootSystem.from_name(name)
    # a point in the fundamental alcove: all simple values equal to 1/(h+1)
    h = sum(R.highest_root()) + 1
    x = point_with_root_values(R, [Fraction(1, h + 1)] * R.rank)
    al = alcove_of(R, x)
    assert set(al.k.values()) == {0}
    assert alcove_is_consistent(R, al)


def test_alcoves_consistent_random():
    rng = random.Random(7)
    for name, trials in [("A2", 40), ("A3", 40), ("D4", 6)]:
        R = RootSystem.from_name(name)
        for _ in range(trials):
            vals = [Fraction(rng.randint(-400, 400), rng.choice([7, 11, 13])) for _ in range(R.rank)]
            x = point_with_root_values(R, vals)
            if any(v.denominator == 1 for v in root_values(R, x).values()):
                continue
            assert alcove_is_consistent(R, alcove_of(R, x))


def test_inconsistent_alcove_detected():
    from wallcross.root_systems import Alcove

    A2 = RootSystem.from_name("A2")
    # α1, α2 in (0,1) force α1+α2 in (0,2); k = 5 is impossible
    bad = Alcove({(1, 0): 0, (0, 1): 0, (1, 1): 5})
    assert not alcove_is_consistent(A2, bad)


def test_affine_walls():
    R = RootSystem.affine(affine_cartan_matrix("A", 1))
    walls = R.affine_walls(2)
    assert walls[0] == (1, 1)
    assert set(walls[1:]) == {(0, 1), (0, -1), (1, 2), (1, 0)}
