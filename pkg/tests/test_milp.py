import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcpgraph.graph import cycle_graph, gen_erdos_renyi, path_graph, petersen_graph
from lcpgraph.lcp import LcpError, lcp_from_graph, lcp_from_qp
from lcpgraph.lp import HPolytope, lp_solve
from lcpgraph.milp import (
    alpha_via_ilp,
    beta_via_ilp,
    binary_points,
    branch_and_bound,
    frac_polytope,
    lcp_optimize_via_milp,
    maxis_polytope,
    milp_cross_check,
    milp_reformulate_lcp,
)
from lcpgraph.oracle import alpha_brute, beta_brute, enumerate_maximal_independent_sets

linprog = pytest.importorskip("scipy.optimize").linprog


def test_maxis_rows_path():
    p = maxis_polytope(path_graph(3))
    assert p.F.shape == (6, 3)
    assert p.b.tolist() == [1, 1, 1, -1, -2, -1]
    assert binary_points(p) == [(0, 1, 0), (1, 0, 1)]


def test_frac_binary_points_are_independent_sets():
    pts = binary_points(frac_polytope(path_graph(3)))
    assert len(pts) == 5 and (1, 1, 0) not in pts


def test_lp_against_scipy():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n, m = int(rng.integers(2, 7)), int(rng.integers(1, 8))
        F = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        u = rng.uniform(0.5, 3, size=n)
        c = rng.normal(size=n)
        poly = HPolytope(F, b, u)
        ours = lp_solve(c, "max", poly)
        ref = linprog(-c, A_ub=-F, b_ub=-b, bounds=list(zip(np.zeros(n), u)), method="highs")
        if ref.status == 2:
            assert ours.status == "infeasible"
            continue
        assert ours.optimal
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
        assert ours.dual_value == pytest.approx(ours.value, abs=1e-7)
        assert poly.contains(ours.x, 1e-7)


def test_lp_unbounded():
    poly = HPolytope(np.zeros((0, 2)), np.zeros(0), [np.inf, 1.0])
    assert lp_solve([1, 0], "max", poly).status == "unbounded"


def test_frac_lp_of_c5():
    assert lp_solve(np.ones(5), "max", frac_polytope(cycle_graph(5))).value == pytest.approx(2.5)


def test_polytope_dict_round_trip():
    p = HPolytope([[1.0, 2.0]], [1.0], [np.inf, 1.0], "raw")
    q = HPolytope.from_dict(p.to_dict())
    assert np.array_equal(p.F, q.F) and np.array_equal(p.u, q.u)


def test_ilp_named():
    for g, a, b in ((cycle_graph(8), 4, 3), (petersen_graph(), 4, 3), (cycle_graph(5), 2, 2)):
        ra, rb = alpha_via_ilp(g), beta_via_ilp(g)
        assert (ra.value, rb.value) == (a, b)
        assert ra.verified and rb.verified
    assert alpha_via_ilp(petersen_graph(), "edge").value == 4


def test_branch_and_bound_knapsack():
    # max 5x1 + 4x2 + 3x3  s.t.  2x1 + 3x2 + x3 <= 4, binary
    poly = HPolytope([[-2.0, -3.0, -1.0]], [-4.0], np.ones(3))
    res = branch_and_bound([5, 4, 3], "max", poly, [0, 1, 2])
    assert res.value == pytest.approx(8)
    assert np.allclose(res.x, [1, 0, 1])


def test_big_m_defaults():
    g = path_graph(3)
    model = milp_reformulate_lcp(lcp_from_graph(g))
    assert model.r.tolist() == [1, 1, 1] and model.r_prime.tolist() == [1, 2, 1]
    res = lcp_optimize_via_milp(model, np.ones(3), "max")
    assert res.value == pytest.approx(2)


def test_big_m_needs_bounds_off_graph():
    with pytest.raises(LcpError):
        milp_reformulate_lcp(lcp_from_qp(np.eye(2), [-1, -1]))


def test_big_m_qp_with_bounds():
    model = milp_reformulate_lcp(lcp_from_qp(np.eye(2), [-1, 2]), r=5, r_prime=5)
    chk = milp_cross_check(model, [1, 1], "max")
    assert chk.agree and chk.witness_ok and chk.milp_value == pytest.approx(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.floats(0, 1), st.integers(0, 2**32))
def test_ilp_matches_brute(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    assert alpha_via_ilp(g).value == alpha_brute(g)
    assert beta_via_ilp(g).value == beta_brute(g)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**32))
def test_maxis_binary_points_are_maximal_sets(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    assert set(binary_points(maxis_polytope(g))) == enumerate_maximal_independent_sets(g).indicators()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.integers(0, 2**32))
def test_big_m_matches_enumeration(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    c = np.random.default_rng(seed).normal(size=n)
    model = milp_reformulate_lcp(lcp_from_graph(g))
    for sense in ("max", "min"):
        chk = milp_cross_check(model, c, sense)
        assert chk.agree and chk.witness_ok
