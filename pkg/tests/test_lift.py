import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcpgraph.graph import complete_graph, cycle_graph, gen_erdos_renyi, path_graph
from lcpgraph.lift import (
    LiftError,
    degree_bound_polytope,
    lifted_sdp,
    ls_lift,
    max_l1_over_lifted,
    moment_matrix,
    pstar_transcription,
)
from lcpgraph.lp import HPolytope
from lcpgraph.milp import binary_points, frac_polytope, maxis_polytope
from lcpgraph.sdp import SdpInfeasible, sdp_solve


def test_moment_matrix_layout():
    L = moment_matrix([0.5, 0.25], [[0.5, 0.1], [0.1, 0.25]])
    assert L.tolist() == [[1, 0.5, 0.25], [0.5, 0.5, 0.1], [0.25, 0.1, 0.25]]


def test_lift_needs_unit_box():
    with pytest.raises(LiftError):
        ls_lift(HPolytope(np.zeros((0, 2)), np.zeros(0), [np.inf, 1.0]))
    with pytest.raises(LiftError):
        ls_lift(HPolytope(np.zeros((0, 2)), np.zeros(0), [2.0, 1.0]))


def test_lift_of_empty_polytope_is_infeasible():
    # x1 >= 2 inside the unit square
    with pytest.raises(SdpInfeasible):
        sdp_solve(lifted_sdp(ls_lift(HPolytope([[1.0, 0.0]], [2.0], [1.0, 1.0]))))


def test_lifted_edge_forces_zero_products():
    lp = ls_lift(frac_polytope(complete_graph(2)))
    # x = (1/2, 1/2) with w_12 = 0 is in the lift, w_12 = 1/4 is not
    assert lp.contains([0.5, 0.5], [[0.5, 0.0], [0.0, 0.5]])
    assert not lp.contains([0.5, 0.5], [[0.5, 0.25], [0.25, 0.5]])


def test_lifted_frac_of_triangle_reaches_clique_bound():
    res = max_l1_over_lifted(ls_lift(frac_polytope(complete_graph(3))))
    assert res.value == pytest.approx(1.0, abs=1e-6)


def test_lifted_sdp_dimensions():
    lp = ls_lift(maxis_polytope(path_graph(3)))
    prob = lifted_sdp(lp)
    assert prob.m == 4
    assert len(prob.eq_b) == 4 and len(prob.ineq_c) == lp.num_constraints


def test_maxis_reading_matches_generated_lift():
    for g in (cycle_graph(5), path_graph(4), gen_erdos_renyi(7, 0.4, 2)):
        assert pstar_transcription(g, "maxis").row_keys() == ls_lift(maxis_polytope(g)).row_keys()


def test_product_reading_is_lift_of_degree_bound_polytope():
    g = gen_erdos_renyi(6, 0.5, 1)
    assert pstar_transcription(g, "product").row_keys() == ls_lift(degree_bound_polytope(g)).row_keys()


def test_printed_reading_cuts_c5_sets_and_is_empty():
    g = cycle_graph(5)
    lp = pstar_transcription(g, "printed")
    pts = [np.array(p, dtype=float) for p in binary_points(maxis_polytope(g))]
    assert len(pts) == 5
    assert all(lp.slacks(x, np.outer(x, x)).min() < 0 for x in pts)
    with pytest.raises(SdpInfeasible):
        sdp_solve(lifted_sdp(lp))


def test_unknown_reading():
    with pytest.raises(ValueError):
        pstar_transcription(cycle_graph(5), "other")


def _cvxpy_lift_value(poly):
    # an independent formulation: products of the homogenised rows with x_i and 1 - x_i
    cp = pytest.importorskip("cvxpy")
    n = poly.dim
    Y = cp.Variable((n + 1, n + 1), symmetric=True)
    cons = [Y >> 0, Y[0, 0] == 1] + [Y[i + 1, i + 1] == Y[0, i + 1] for i in range(n)]
    rows = [np.concatenate([[-b], f]) for f, b in zip(poly.F, poly.b)]
    for j in range(n):
        e = np.zeros(n + 1)
        e[j + 1] = 1.0
        rows += [e, np.concatenate([[poly.u[j]], -np.eye(n)[j]])]
    for r in rows:
        for i in range(n):
            cons += [Y[i + 1, :] @ r >= 0, (Y[0, :] - Y[i + 1, :]) @ r >= 0]
    prob = cp.Problem(cp.Maximize(cp.sum(Y[0, 1:])), cons)
    prob.solve(solver="CLARABEL")
    return prob.value


@pytest.mark.parametrize("seed", [0, 3])
def test_lifted_values_match_cvxpy(seed):
    g = gen_erdos_renyi(7, 0.4, seed)
    for poly in (maxis_polytope(g), frac_polytope(g)):
        ours = max_l1_over_lifted(ls_lift(poly)).value
        assert ours == pytest.approx(_cvxpy_lift_value(poly), abs=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.floats(0, 1), st.integers(0, 2**32))
def test_binary_points_lift_with_outer_products(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    for poly in (maxis_polytope(g), frac_polytope(g)):
        lp = ls_lift(poly)
        for pt in binary_points(poly):
            x = np.array(pt, dtype=float)
            assert lp.contains(x, np.outer(x, x))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.floats(0, 1), st.integers(0, 2**32))
def test_lifted_points_project_into_source(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    poly = maxis_polytope(g)
    res = max_l1_over_lifted(ls_lift(poly))
    assert poly.contains(res.x, 1e-6)
    # products vanish on edges
    assert max((abs(res.W[i, j]) for i, j in itertools.combinations(range(n), 2) if g.adjacency[i, j]),
               default=0.0) <= 1e-6
