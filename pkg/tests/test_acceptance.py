from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from fractions import Fraction

import numpy as np
import sympy as sp

from wallcross.cli import run
from wallcross.cone_geometry import (
    HilbNSModel,
    affine_arrangement,
    arrangement_matches,
    contraction_point,
    ell_map,
    wall_normal,
    walls_through_symn_point,
)
from wallcross.fock_voa import LatticeVOA, relation_suite, vertex_lattice
from wallcross.k3_stability import (
    KahlerPoint,
    LimitParams,
    base_vector_m,
    central_charge,
    in_limit_region,
    on_wall,
    stable_factor_support,
    tensor_shift,
    tensor_shift_identity,
)
from wallcross.lattice_core import MukaiVector, hilbert_vector, mukai_pairing, standard_surface
from wallcross.quiver_git import (
    Quiver,
    affine_framing,
    bounded_positive_roots,
    corner_fiber_data,
    crawley_boevey,
    genuine_walls_affine,
    num_points,
)
from wallcross.root_systems import RootSystem

ELL = standard_surface("elliptic")
I3 = standard_surface("elliptic-I3")
S0 = (0, 1)


def test_criterion_1_quiver_walls(criterion):
    with criterion(1, "quiver walls for affine A1, v = (2,2)", 1):
        A1 = Quiver.from_name("affine-A1")
        C = np.array(A1.cartan)
        brute = {t for t in itertools.product(range(3), range(3))
                 if any(t) and int(np.array(t) @ C @ np.array(t)) <= 2}
        assert brute == {(0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)}
        assert set(bounded_positive_roots(A1, (2, 2))) == brute
        walls = set(genuine_walls_affine(A1, 2))
        assert walls == {(1, 1), (0, 1), (1, 0), (1, 2)}
        assert (2, 1) not in walls


def test_criterion_2_voa_relations(criterion):
    with criterion(2, "exact VOA relations on A1 (N=6), A2 (N=5), elliptic isotropic (N=6)", 60):
        a1 = relation_suite(LatticeVOA(vertex_lattice("A1")), 6)
        a2 = relation_suite(LatticeVOA(vertex_lattice("A2")), 5)
        ell = relation_suite(LatticeVOA(vertex_lattice("elliptic")), 6,
                             isotropic=[(1, 0)], relations=["isotropic"])
        for rep, rels in [(a1, {"hx", "xx"}), (a2, {"hx", "xx", "serre"}), (ell, {"isotropic"})]:
            bad = [c.to_dict() for c in rep.checks if c.status != "pass"]
            assert not bad, bad
            assert {c.relation for c in rep.checks} == rels
            assert all(c.checked > 0 for c in rep.checks)
        assert {c.degree for c in a1.checks} == set(range(7))
        assert {c.degree for c in a2.checks} == set(range(6))


def _wall_samples(n, lp):
    """Points β = y·S0 on W(v, (0, S0, k)): y² + k·y − (n − 1 + ω²/2) = 0, plus nearby off-wall points."""
    out = []
    for p in range(3, 40):
        for q in range(1, 6):
            w = (p, q)
            w2 = ELL.ns.norm(w)
            if p - 2 * q <= 0 or w2 <= 0:
                continue
            for k in range(-3, 4):
                disc = k * k + 4 * (n - 1) + 2 * w2
                r = sp.sqrt(disc)
                if not r.is_Integer:
                    continue
                for y in {Fraction(-k + int(r), 2), Fraction(-k - int(r), 2)}:
                    for dy in (0, Fraction(1, 7)):
                        kp = KahlerPoint((0, y + dy), w)
                        if in_limit_region(ELL, kp, lp):
                            out.append((kp, k if dy == 0 else None))
    return out


def test_criterion_3_ell_map_walls(criterion):
    with criterion(3, "on_wall agrees with ell_map . theta_v on >= 100 limit-region points", 10):
        lp = LimitParams(10_000, Fraction(1, 2), 10, "A1")
        rng = random.Random(2024)
        total = on_count = 0
        wall_point = KahlerPoint((0, -3), (9, 1))
        assert in_limit_region(ELL, wall_point, lp)
        for n in (2, 3):
            model = HilbNSModel(ELL, n)
            v = hilbert_vector(ELL, n)
            samples = _wall_samples(n, lp)
            while len(samples) < 120:
                kp = KahlerPoint((Fraction(rng.randint(-90, 30), 7), Fraction(rng.randint(-90, 0), 11)),
                                 (rng.randint(8, 40), rng.randint(1, 4)))
                if in_limit_region(ELL, kp, lp):
                    samples.append((kp, None))
            if n == 2:
                samples.append((wall_point, 0))
            for kp, expected in samples:
                ell = ell_map(model, kp)
                for k in range(-4, 5):
                    w = MukaiVector(0, S0, k)
                    lhs = on_wall(ELL, kp, v, w)
                    rhs = model.bb(ell, wall_normal(model, w)) == 0
                    assert lhs == rhs, (n, kp, k)
                    if k == expected:
                        assert lhs
                    on_count += lhs
                total += 1
        assert on_wall(ELL, wall_point, hilbert_vector(ELL, 2), MukaiVector(0, S0, 0))
        assert total >= 100 and on_count >= 10


def test_criterion_4_tensor_shift(criterion):
    with criterion(4, "Z(v . ch L) = Z_{beta - L}(v) on 200 random exact inputs", 5):
        rng = random.Random(4)

        def q():
            return Fraction(rng.randint(-60, 60), rng.randint(1, 9))

        for i in range(200):
            S = ELL if i % 2 else I3
            m = S.rank
            v = MukaiVector(rng.randint(-4, 4), tuple(q() for _ in range(m)), q())
            kp = KahlerPoint(tuple(q() for _ in range(m)), tuple(q() for _ in range(m)))
            L = tuple(q() for _ in range(m))
            assert tensor_shift_identity(S, kp, v, L)
            assert central_charge(S, kp, tensor_shift(S, v, L)) == central_charge(S, kp.shifted(L), v)
            assert tensor_shift(S, tensor_shift(S, v, L), tuple(-x for x in L)) == v


def test_criterion_5_arrangement_matching(criterion):
    with criterion(5, "face posets near Sym^n match the affine arrangement (A1 n=2..4, A2 n=2,3)", 30):
        for S, coll, rank, ns in [(ELL, "A1", 1, (2, 3, 4)), (I3, "A2", 2, (2, 3))]:
            x = (*contraction_point(S, coll), 0)
            for n in ns:
                model = HilbNSModel(S, n)
                walls = walls_through_symn_point(model, coll)
                res = arrangement_matches(model, walls, affine_arrangement("A", rank, n), x=x)
                assert res.matches, (coll, n, res.reason)


def _cb_framing(Q, v, beta, ell):
    """w_ℓ = −(β∞, β) on the Crawley–Boevey quiver, β∞ = (1, v − ℓβ)."""
    Qi, _ = crawley_boevey(Q, v, affine_framing(Q))
    Ci = np.array(Qi.cartan)
    b_inf = np.array([1, *(vi - ell * bi for vi, bi in zip(v, beta))])
    b = np.array([0, *beta])
    return int(-(b_inf @ Ci @ b))


def test_criterion_6_corner_fibers(criterion):
    with criterion(6, "corner fiber w_l = +-k + 2l against Crawley-Boevey pairings", 5):
        cases = [("affine-A1", [(2, 2), (2, 1), (3, 3), (3, 2), (4, 3)]),
                 ("affine-A2", [(1, 1, 1), (2, 2, 2), (2, 1, 1), (2, 2, 1), (3, 2, 2)])]
        for name, vs in cases:
            Q = Quiver.from_name(name)
            fin = RootSystem.finite([row[1:] for row in Q.cartan[1:]])
            for v in vs:
                assert num_points(Q, v) >= 1
                for alpha in fin.positive_roots():
                    divisorial = []
                    for k in range(-3, 4):
                        c = corner_fiber_data(Q, v, alpha, k)
                        for ell in range(1, 5):
                            w = _cb_framing(Q, v, c.beta, ell)
                            assert w == c.sign * k + 2 * ell == c.framing_at(ell), (v, alpha, k, ell)
                        assert c.framing_dim == _cb_framing(Q, v, c.beta, c.ell)
                        if c.divisorial:
                            divisorial.append(k)
                    assert divisorial == [0]


def _brute_base(S, v, cs, box):
    """Maximal positive vectors found by scanning a box; also returns the support size."""
    lin = [int(mukai_pairing(S, v, c)) for c in cs]
    g = [[int(mukai_pairing(S, a, b)) for b in cs] for a in cs]
    v2 = int(mukai_pairing(S, v, v))
    m = len(cs)
    sup, pos = [], []
    for t in itertools.product(range(-box, box + 1), repeat=m):
        norm = v2 + 2 * sum(a * b for a, b in zip(lin, t)) \
            + sum(g[i][j] * t[i] * t[j] for i in range(m) for j in range(m))
        if norm < -2:
            continue
        assert max(map(abs, t)) < box, "scan box too small"
        sup.append(t)
        if all(lin[i] + sum(t[j] * g[j][i] for j in range(m)) >= 0 for i in range(m)):
            pos.append(t)
    maximal = [p for p in pos
               if not any(u != p and all(x >= y for x, y in zip(u, p)) for u in pos)]
    return sup, maximal


def test_criterion_7_base_vector_uniqueness(criterion):
    with criterion(7, "unique maximal positive base vector for all generated configurations", 10):
        count = 0
        grids = [(ELL, "A1", [(a, b) for a in range(-2, 3) for b in range(-2, 3)], range(-4, 2),
                  range(-4, 5), 14),
                 (I3, "A2", [(a, b, 0, 0) for a in range(-1, 2) for b in range(-1, 2)], range(-3, 2),
                  range(-2, 3), 9)]
        for S, coll, Ds, ss, ks, box in grids:
            R = S.collection(coll)
            for D in Ds:
                for s in ss:
                    v = MukaiVector(1, D, s)
                    if mukai_pairing(S, v, v) < -2:
                        continue
                    for kk in itertools.product(ks, repeat=len(R)):
                        cs = [MukaiVector(0, C, k) for C, k in zip(R, kk)]
                        support = stable_factor_support(S, v, cs)
                        if len(support) > 50:
                            continue
                        sup, maximal = _brute_base(S, v, cs, box)
                        assert sorted(sup) == support
                        assert len(maximal) == 1
                        assert base_vector_m(S, v, cs) == maximal[0]
                        count += 1
        assert count > 1000


def _oracle_segments(extent):
    """Level-1 slice θ = (1−u−v, u, v): the wall mδ + α meets it in m + a₁u + a₂v = 0."""
    E = sp.Integer(extent)
    square = sp.Polygon((-E, -E), (E, -E), (E, E), (-E, E))
    lines = set()
    for a in [(1, 0), (0, 1), (1, 1)]:
        for sign in (1, -1):
            for m in range(3):
                coeffs = (sign * a[0], sign * a[1], m)
                if m == 0:
                    coeffs = (a[0], a[1], 0)
                lines.add(coeffs)
    out = Counter()
    for a1, a2, m in lines:
        if a2 != 0:
            p, q = sp.Point(0, sp.Rational(-m, a2)), sp.Point(1, sp.Rational(-m - a1, a2))
        else:
            p, q = sp.Point(sp.Rational(-m, a1), 0), sp.Point(sp.Rational(-m, a1), 1)
        pts = set()
        for obj in square.intersection(sp.Line(p, q)):
            pts |= {obj} if isinstance(obj, sp.Point) else set(obj.points)
        ends = sorted((Fraction(str(pt.x)), Fraction(str(pt.y))) for pt in pts)
        out[(ends[0], ends[-1])] += 1
    return out


def test_criterion_8_figure(criterion, tmp_path):
    with criterion(8, "plot of the affine A2, v = 3delta level-1 slice (15 lines, byte-identical)", 5):
        a, b = tmp_path / "one.svg", tmp_path / "two.svg"
        for path in (a, b):
            assert run(["plot", "--quiver", "affine-A2", "--v", "3delta", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()
        svg = a.read_text()
        got = Counter()
        for p0, p1 in re.findall(r'data-p0="([^"]+)" data-p1="([^"]+)"', svg):
            e0 = tuple(Fraction(x) for x in p0.split())
            e1 = tuple(Fraction(x) for x in p1.split())
            got[tuple(sorted((e0, e1)))] += 1
        assert sum(got.values()) == svg.count("<line") == 15
        assert "delta" not in svg
        assert got == _oracle_segments(3)
