from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wallcross.quiver_git import (
    CertificateError,
    Quiver,
    QuiverError,
    QuiverRepCertificate,
    affine_framing,
    bounded_positive_roots,
    canonical_normal,
    chamber_signature,
    corner_fiber_data,
    crawley_boevey,
    ext_quiver,
    genuine_walls_affine,
    hecke_fiber_dim,
    hilb_chamber_check,
    hilb_chamber_rep,
    is_generic,
    king_certificate_check,
    num_points,
    shift_map_phi,
    shifted_genuine_walls,
    strata_labels,
    theta_infinity,
)

A1 = Quiver.from_name("affine-A1")
A2 = Quiver.from_name("affine-A2")


def brute_roots(Q: Quiver, v):
    C = np.array(Q.cartan)
    out = set()
    for t in itertools.product(*(range(a + 1) for a in v)):
        x = np.array(t)
        if x.any() and int(x @ C @ x) <= 2:
            out.add(t)
    return out


def test_affine_a1_cartan():
    assert A1.cartan == ((2, -2), (-2, 2))


def test_bounded_positive_roots_examples():
    assert bounded_positive_roots(A1, (2, 2)) == [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]
    J = Quiver.from_name("jordan")
    assert bounded_positive_roots(J, (3,)) == [(1,), (2,), (3,)]
    assert bounded_positive_roots(A2, (0, 0, 0)) == []


@pytest.mark.parametrize("Q,v", [(A1, (3, 2)), (A2, (2, 2, 2)), (A2, (3, 1, 2)),
                                 (Quiver.from_name("affine-D4"), (1, 1, 2, 1, 1))])
def test_bounded_positive_roots_oracle(Q, v):
    roots = bounded_positive_roots(Q, v)
    assert set(roots) == brute_roots(Q, v)
    for r in roots:
        assert Q.pair(r, r) <= 2 and all(0 <= a <= b for a, b in zip(r, v))


def test_genuine_walls_examples():
    assert set(genuine_walls_affine(A1, 2)) == {(1, 1), (0, 1), (1, 0), (1, 2)}
    assert (2, 1) not in genuine_walls_affine(A1, 2)
    # n = 1 keeps only m = 0, so δ − α = (1, 0) is not among the walls
    assert set(genuine_walls_affine(A1, 1)) == {(1, 1), (0, 1)}
    assert len(genuine_walls_affine(A2, 3)) == 16


def test_genuine_walls_are_roots_or_delta():
    for n in range(1, 5):
        for w in genuine_walls_affine(A2, n):
            assert A2.pair(w, w) in (0, 2)


def test_chamber_signature():
    walls = genuine_walls_affine(A1, 2)
    assert chamber_signature((1, 1), walls) == (1, 1, 1, 1)
    assert is_generic((1, 1), walls)
    sig = chamber_signature((1, -1), walls)
    assert sig[walls.index((1, 1))] == 0 and not is_generic((1, -1), walls)
    assert chamber_signature((0, 0), walls) == (0, 0, 0, 0)


def test_hilb_chamber_rep():
    assert hilb_chamber_rep(A1, (2, 2)) == (Fraction(-7, 8), Fraction(1))
    th = hilb_chamber_rep(A2, (1, 1, 1))
    assert th[1] > 0 and th[2] > 0 and sum(th) > 0
    assert hilb_chamber_check(A2, (1, 1, 1), th)
    assert hilb_chamber_rep(Quiver.from_name("jordan"), (4,)) == (Fraction(1),)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hilb_chamber_rep_adjacent_to_face(n):
    v = (n, n, n)
    th = hilb_chamber_rep(A2, v)
    walls = [r for r in bounded_positive_roots(A2, v) if canonical_normal(r) != (1, 1, 1)]
    # moving θ towards the face C by shrinking its level never crosses a wall
    lvl = sum(th)
    for t in [Fraction(1, 2), Fraction(1, 10), Fraction(1, 1000)]:
        th_t = (th[0] - (1 - t) * lvl, th[1], th[2])
        assert chamber_signature(th_t, walls) == chamber_signature(th, walls)


def _rep_direct_sum():
    # A1 framed at vertex 0, v = (1,1), S = V at vertex 1 only
    zero = (Fraction(0),)
    return QuiverRepCertificate(
        v=(1, 1), w=(1, 0),
        edges=((0, 1, ((Fraction(0),),)), (1, 0, ((Fraction(0),),))),
        i_maps=(((Fraction(1),),), ((),)),
        j_maps=((zero,), ()),
        subspace=((), ((Fraction(1),),)),
    )


def test_king_certificate():
    rep = _rep_direct_sum()
    res = king_certificate_check(rep, (0, 1))
    assert res.verdict == "violates" and res.dim_s == (0, 1)
    res = king_certificate_check(rep, (1, -1))
    assert res.verdict == "respects"
    empty = QuiverRepCertificate(rep.v, rep.w, rep.edges, rep.i_maps, rep.j_maps, ((), ()))
    assert king_certificate_check(empty, (5, 5)).verdict == "respects"
    full = QuiverRepCertificate(rep.v, rep.w, rep.edges, rep.i_maps, rep.j_maps,
                                (((Fraction(1),),), ((Fraction(1),),)))
    res = king_certificate_check(full, (1, -1))
    assert res.verdict == "respects" and res.contains_image_of_i


def test_king_certificate_rejects_non_invariant():
    rep = QuiverRepCertificate(
        v=(1, 1), w=(0, 0),
        edges=((0, 1, ((Fraction(1),),)),),
        i_maps=(((),), ((),)), j_maps=((), ()),
        subspace=(((Fraction(1),),), ()),
    )
    with pytest.raises(CertificateError):
        king_certificate_check(rep, (1, 1))


def test_crawley_boevey():
    Qi, dims = crawley_boevey(A1, (1, 1), (1, 0))
    assert Qi.n_vertices == 3 and dims == (1, 1, 1)
    assert Qi.adjacency[0] == (0, 1, 0)
    Q0, _ = crawley_boevey(A1, (1, 1), (0, 0))
    assert Q0.adjacency[0] == (0, 0, 0)
    assert theta_infinity((2, 3), (1, 1)) == (-5, 2, 3)


def test_ext_quiver_jordan():
    Qi, total = crawley_boevey(A1, (1, 1), (1, 0))
    data = ext_quiver(Qi, total, [((0, 1, 1), 1)], (1, 0, 0))
    assert data.loops == (1,)
    assert data.framing == (1,)
    assert data.trivial_factor_dim == 0


def test_ext_quiver_real_roots():
    Qi, total = crawley_boevey(A2, (1, 1, 1), affine_framing(A2))
    data = ext_quiver(Qi, total, [((0, 0, 1, 0), 1), ((0, 1, 0, 1), 1)], (1, 0, 0, 0))
    assert data.loops == (0, 0)
    with pytest.raises(QuiverError):
        ext_quiver(Qi, total, [((0, 0, 1, 0), 1)], (1, 0, 0, 0))


def test_num_points():
    assert num_points(A1, (2, 2)) == 2
    assert num_points(A1, (1, 1)) == 1
    assert num_points(A1, (1, 0)) == 0


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))
def test_num_points_matches_quadratic_form(a, b, c):
    v = (a, b, c)
    n2 = 2 * a - A2.pair(v, v)
    if n2 < 0:
        with pytest.raises(QuiverError):
            num_points(A2, v)
    else:
        assert num_points(A2, v) * 2 == n2


def test_shift_map():
    phi = shift_map_phi(A1, (2, 2))
    assert phi.shift == (0, 0)
    phi = shift_map_phi(A1, (1, 2))
    assert phi((1, 0)) == (3, -2)
    for th in [(1, 0), (Fraction(3, 7), -2), (5, 5)]:
        assert phi.inverse(phi(th)) == tuple(map(Fraction, th))


@given(st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)))
def test_shift_map_transports_walls(theta):
    v = (3, 2, 2)
    phi = shift_map_phi(A2, v)
    n = num_points(A2, v)
    for r in genuine_walls_affine(A2, n):
        pushed = phi.push_normal(r)
        assert sum(a * b for a, b in zip(pushed, phi(theta))) == sum(a * b for a, b in zip(r, theta))
    assert len(shifted_genuine_walls(A2, v)) == len(genuine_walls_affine(A2, n))


def test_corner_fiber_examples():
    v = (2, 2)
    c = corner_fiber_data(A1, v, (1,), 0)
    assert (c.ell, c.framing_dim, c.fiber_dim, c.divisorial) == (1, 2, 1, True)
    c = corner_fiber_data(A1, v, (1,), 1)
    assert (c.ell, c.framing_dim, c.fiber_dim) == (1, 3, 2)
    # τ = 2 keeps τ + k > 0 at k = −1, the branch with ℓ = 1 − (−1)
    c = corner_fiber_data(A1, (2, 1), (1,), -1)
    assert c.tau == 2 and (c.ell, c.framing_dim, c.fiber_dim) == (2, 3, 2)


def test_hecke_fiber_dim():
    assert hecke_fiber_dim(A1, (0, 0), (1, 0), 0, 0) == (0, -1)
    assert hecke_fiber_dim(A1, (0, 0), (1, 0), 0, 1)[1] == 0
    assert hecke_fiber_dim(A1, (1, 1), (1, 0), 1, 0) == (-1, -1)


def test_strata_labels():
    assert strata_labels(0) == [((), 0)]
    assert set(strata_labels(2)) == {((2,), 0), ((1, 1), 0), ((1,), 1), ((), 2)}
    assert len(strata_labels(3)) == 7
    for n in range(6):
        assert all(sum(lam) + k == n for lam, k in strata_labels(n))
