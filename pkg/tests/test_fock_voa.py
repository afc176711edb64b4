from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from wallcross.fock_voa import (
    LatticeVOA,
    VertexLattice,
    VOAElement,
    VOAError,
    build_cocycle,
    component_matrix,
    fock_basis,
    matrix_csv,
    relation_suite,
    vertex_lattice,
    weight_decomposition,
)

A1 = LatticeVOA(vertex_lattice("A1"))
A2 = LatticeVOA(vertex_lattice("A2"))
a = (1,)


def state(voa, gamma, mono, trunc=None):
    return VOAElement({(tuple(gamma), mono): Fraction(1)}, trunc)


def y(k, i=0):
    return sp.Symbol(f"y_{k}_{i}")


def to_expr(poly):
    out = sp.Integer(0)
    for mono, c in poly.items():
        term = sp.Rational(int(Fraction(c).numerator), int(Fraction(c).denominator))
        for (k, i), e in mono:
            term *= y(k, i) ** e
        out += term
    return sp.expand(out)


def _trunc(expr, z, top):
    expr = sp.expand(expr)
    return sum(expr.coeff(z, i) * z ** i for i in range(top + 1))


def series_vertex(voa, alpha, n, gamma, mono):
    """x_n(α) by expanding ε z^{⟨α,γ⟩} exp(φ₋(z)) exp(φ₊(z)) as a series in z."""
    z = sp.Symbol("z")
    L = voa.lattice
    r = L.rank
    basis = L.basis()
    p = to_expr({mono: 1})
    deg = sum(k * e for (k, _), e in mono)

    def ann(k, q):
        return sp.expand(k * sum(L.pair(alpha, basis[i]) * sp.diff(q, y(k, i)) for i in range(r)))

    # exp(φ₊) p with φ₊ = −Σ α(k) z^{−k}/k; the sum stops once the degree is used up
    total, term = p, p
    for j in range(1, deg + 1):
        term = sp.expand(sum(-z ** (-k) * ann(k, term) / k for k in range(1, deg + 1)) / j)
        total += term
    shift = L.pair(alpha, gamma)
    top = -n - 1 - shift + deg
    if top < 0:
        return sp.Integer(0)
    u = sum(sum(alpha[i] * y(k, i) for i in range(r)) * z ** k / k for k in range(1, top + 1))
    expo, power = sp.Integer(1), sp.Integer(1)
    for j in range(1, top + 1):
        # powers of z above top can never reach z^{−n−1}
        power = _trunc(power * u, z, top)
        expo += power / sp.factorial(j)
    full = sp.expand(voa.eps(alpha, gamma) * z ** shift * expo * total)
    return sp.expand(full.coeff(z, -n - 1)) if full != 0 else sp.Integer(0)


def test_vertex_lattice_signs():
    ell = vertex_lattice("elliptic")
    assert ell.gram == ((0, -1), (-1, 2))
    assert vertex_lattice("A2").gram == ((2, -1), (-1, 2))
    with pytest.raises(VOAError):
        VertexLattice(((1,),))
    with pytest.raises(VOAError):
        vertex_lattice("nope")


def test_cocycle():
    eps = build_cocycle(vertex_lattice("A1"))
    assert eps(a, a) == 1
    eps2 = build_cocycle(vertex_lattice("A2"))
    assert eps2((1, 0), (0, 1)) == 1 and eps2((0, 1), (1, 0)) == -1


vec2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@given(vec2, vec2, vec2)
def test_cocycle_bimultiplicative_and_commutator(x, y_, w):
    L = vertex_lattice("A2")
    eps = build_cocycle(L)
    s = tuple(p + q for p, q in zip(x, y_))
    assert eps(s, w) == eps(x, w) * eps(y_, w)
    assert eps(w, s) == eps(w, x) * eps(w, y_)
    assert eps(x, y_) * eps(y_, x) == (-1) ** L.pair(x, y_)


def test_fock_basis_sizes():
    # partitions of k coloured by rank
    assert [len(fock_basis(1, k)) for k in range(7)] == [1, 1, 2, 3, 5, 7, 11]
    assert [len(fock_basis(2, k)) for k in range(5)] == [1, 2, 5, 10, 20]
    assert fock_basis(1, 0) == ((),)


def test_vertex_mode_on_vacuum():
    vac = VOAElement.vacuum(1)
    e_a = A1.vertex_mode(a, -1, vac)
    assert e_a.terms == {((1,), ()): 1}
    assert A1.vertex_mode(a, -2, vac).terms == {((1,), (((1, 0), 1),)): 1}
    third = A1.vertex_mode(a, -3, vac).terms
    assert third == {((1,), (((1, 0), 2),)): Fraction(1, 2), ((1,), (((2, 0), 1),)): Fraction(1, 2)}
    for n in range(0, 4):
        assert A1.vertex_mode(a, n, vac).is_zero()


def test_vertex_mode_lowering_to_vacuum():
    e_a = VOAElement.vacuum(1, (1,))
    eps = A1.eps((-1,), (1,))
    assert A1.vertex_mode((-1,), 1, e_a).terms == {((0,), ()): eps}
    assert A1.vertex_mode((-1,), 0, e_a).terms == {((0,), (((1, 0), 1),)): -eps}
    assert A1.vertex_mode((-1,), 2, e_a).is_zero()


def test_heisenberg():
    vac = VOAElement.vacuum(1)
    one = A1.heis_act(a, -1, vac)
    assert A1.heis_act(a, 1, one).terms == {((0,), ()): 2}
    assert A1.heis_act(a, 0, vac).is_zero()
    assert A1.heis_act(a, 0, VOAElement.vacuum(1, (3,))).terms == {((3,), ()): 6}


def test_truncation_records_loss():
    vac = VOAElement.vacuum(1, truncation=1)
    out = A1.heis_act(a, -2, vac)
    assert out.is_zero() and out.lost
    assert not A1.heis_act(a, -1, vac).lost


def test_series_oracle_spot_checks():
    rng = random.Random(11)
    for voa, roots in [(A1, [(1,), (-1,), (2,)]), (A2, [(1, 0), (0, -1), (1, 1), (-1, -1)])]:
        r = voa.rank
        for _ in range(25):
            alpha = rng.choice(roots)
            gamma = tuple(rng.randint(-1, 1) for _ in range(r))
            deg = rng.randint(0, 3)
            mono = rng.choice(fock_basis(r, deg))
            n = rng.randint(-4, 2)
            t, got = voa.vertex_poly(alpha, n, gamma, {mono: 1})
            assert t == tuple(p + q for p, q in zip(alpha, gamma))
            assert sp.expand(to_expr(got) - series_vertex(voa, alpha, n, gamma, mono)) == 0


def test_l0_commutator():
    rng = random.Random(5)
    for _ in range(30):
        gamma = (rng.randint(-2, 2), rng.randint(-2, 2))
        mono = rng.choice(fock_basis(2, rng.randint(0, 3)))
        alpha = rng.choice([(1, 0), (0, 1), (-1, -1), (1, 1)])
        n = rng.randint(-3, 2)
        x = state(A2, gamma, mono)
        lhs = A2.L0(A2.vertex_mode(alpha, n, x)) + A2.vertex_mode(alpha, n, A2.L0(x)).scaled(-1)
        assert lhs == A2.vertex_mode(alpha, n, x).scaled(-n)


def test_chevalley_act():
    x = state(A2, (1, 0), (((1, 1), 1),))
    assert A2.chevalley_act("c", 0, 0, x) == x
    assert A2.chevalley_act("d", 0, 0, x) == x.scaled(-2)
    assert A2.chevalley_act("e", 1, -1, x) == A2.vertex_mode((0, 1), -1, x)
    assert A2.chevalley_act("f", 0, 0, x) == A2.vertex_mode((-1, 0), 0, x)
    assert A2.chevalley_act("h", 0, 1, x) == A2.heis_act((1, 0), 1, x)
    with pytest.raises(VOAError):
        A2.chevalley_act("e", 2, 0, x)
    with pytest.raises(VOAError):
        A2.chevalley_act("k", 0, 0, x)


@settings(max_examples=30)
@given(vec2, st.integers(0, 3), st.integers(-3, 1), st.sampled_from([(1, 0), (0, 1), (-1, 0), (1, 1)]))
def test_weight_decomposition_eigenvectors(gamma, deg, n, alpha):
    x = A2.vertex_mode(alpha, n, A2.heis_act((1, 0), -1, state(A2, gamma, fock_basis(2, deg)[0])))
    parts = weight_decomposition(A2, x)
    total = VOAElement()
    for (g, k), comp in parts.items():
        piece = VOAElement({(g, m): c for m, c in comp["terms"].items()})
        assert A2.L0(piece) == piece.scaled(comp["L0"])
        assert comp["d"] == -comp["L0"]
        total = total + piece
    assert total == x


@pytest.mark.parametrize("N", [0, 2, 3])
def test_relation_suite_a1(N):
    rep = relation_suite(A1, N)
    assert rep.ok
    assert {c.relation for c in rep.checks} == {"hx", "xx"}
    assert all(c.checked > 0 for c in rep.checks)


def test_relation_suite_a2_small():
    rep = relation_suite(A2, 2, modes=1)
    assert rep.ok
    assert {c.relation for c in rep.checks} == {"hx", "xx", "serre"}


def test_relation_suite_isotropic():
    ell = LatticeVOA(vertex_lattice("elliptic"))
    rep = relation_suite(ell, 2, modes=1, isotropic=[(1, 0)], relations=["isotropic"])
    assert rep.ok and {c.relation for c in rep.checks} == {"isotropic"}
    with pytest.raises(VOAError):
        relation_suite(ell, 1, isotropic=[(0, 1)])
    with pytest.raises(VOAError):
        relation_suite(ell, 1, relations=["jacobi"])


def test_relation_suite_detects_wrong_cocycle():
    broken = LatticeVOA(vertex_lattice("A2"))
    broken.eps = lambda x, w: 1
    rep = relation_suite(broken, 1, modes=1, relations=["xx"])
    assert not rep.ok
    bad = [c for c in rep.checks if c.status == "fail"]
    assert bad and bad[0].witness["residual"] != "0"
    assert '"ok": false' in rep.to_json()


def test_component_matrix():
    tg, tk, rows = component_matrix(A1, [("x", a, -1)], (0,), 0)
    assert (tg, tk, rows) == ((1,), 0, [[1]])
    tg, tk, rows = component_matrix(A1, [("h", a, 1), ("h", a, -1)], (0,), 1)
    # α(1)α(−1) y = 2·2·y on the one-dimensional degree-1 space
    assert (tg, tk, rows) == ((0,), 1, [[4]])
    assert component_matrix(A1, [("x", a, 5)], (0,), 0) == (None, None, [])
    assert matrix_csv([[Fraction(1, 2), 0], [3, Fraction(-1, 3)]]) == "1/2,0\n3,-1/3\n"
