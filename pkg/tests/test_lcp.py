import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcpgraph.graph import (
    complete_graph,
    cycle_graph,
    empty_graph,
    gen_erdos_renyi,
    path_graph,
    petersen_graph,
    random_forest,
)
from lcpgraph.lcp import (
    LcpError,
    LcpInfeasible,
    LcpInstance,
    check_solution,
    enumerate_solution_faces,
    forest_support_structure,
    integer_solutions,
    lcp_from_bimatrix,
    lcp_from_graph,
    lcp_from_qp,
    max_weighted_norm,
    min_l1_norm,
    nash_from_lcp_solution,
    optimize_over_sol,
    w_residual_range,
)
from lcpgraph.oracle import alpha_brute, alpha_weighted_brute, beta_brute


def test_instance_of_path():
    inst = lcp_from_graph(path_graph(3))
    assert inst.M.tolist() == [[1, 1, 0], [1, 1, 1], [0, 1, 1]]
    assert inst.q.tolist() == [-1, -1, -1]


def test_check_examples():
    inst = lcp_from_graph(path_graph(3))
    assert check_solution(inst, [0, 1, 0])
    assert check_solution(inst, [1, 0, 1])
    rep = check_solution(inst, [1, 1, 0])
    assert not rep and rep.failed() == ["complementary"]
    assert not check_solution(inst, [0, 0, 0]).feasible


def test_check_dimension():
    with pytest.raises(LcpError):
        check_solution(lcp_from_graph(path_graph(3)), [1, 0])


def test_non_square_rejected():
    with pytest.raises(LcpError):
        LcpInstance(np.ones((2, 3)), np.ones(2))


def test_alpha_examples():
    assert max_weighted_norm(cycle_graph(5)).value == pytest.approx(2)
    assert max_weighted_norm(petersen_graph()).value == pytest.approx(4)
    assert max_weighted_norm(empty_graph(4)).value == pytest.approx(4)


def test_weighted_alpha_path():
    assert max_weighted_norm(path_graph(3), [1, 3, 1]).value == pytest.approx(3)


def test_m_examples():
    assert min_l1_norm(cycle_graph(8)).value == pytest.approx(8 / 3, abs=1e-9)
    assert min_l1_norm(complete_graph(4)).value == pytest.approx(1)
    assert min_l1_norm(petersen_graph()).value == pytest.approx(2.5)


def test_c8_minimiser_is_uniform_fractional():
    res = min_l1_norm(cycle_graph(8))
    assert check_solution(lcp_from_graph(cycle_graph(8)), res.x)
    assert res.value < beta_brute(cycle_graph(8))


def test_integer_solutions_path():
    assert integer_solutions(lcp_from_graph(path_graph(3))) == [(0, 1, 0), (1, 0, 1)]


def test_faces_include_fractional_edge():
    # On K2 every point of the segment x1 + x2 = 1 solves the LCP.
    faces = enumerate_solution_faces(lcp_from_graph(complete_graph(2)))
    assert {f.support for f in faces} == {(0,), (1,), (0, 1)}
    assert not [f for f in faces if f.support == (0, 1)][0].is_point


def test_raw_infeasible():
    with pytest.raises(LcpInfeasible):
        optimize_over_sol(LcpInstance(np.zeros((1, 1)), [-1.0]), [1.0])


def test_sense_validated():
    with pytest.raises(ValueError):
        optimize_over_sol(lcp_from_graph(path_graph(2)), [1, 1], "avg")


def test_qp_solution_matches_scipy():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(3)
    for _ in range(5):
        B = rng.normal(size=(4, 4))
        Q = B @ B.T + np.eye(4)
        c = rng.normal(size=4)
        res = optimize_over_sol(lcp_from_qp(Q, c), np.zeros(4), "max")
        ref = scipy_opt.minimize(
            lambda x: 0.5 * x @ Q @ x + c @ x, np.ones(4), jac=lambda x: Q @ x + c,
            bounds=[(0, None)] * 4, method="L-BFGS-B", options={"gtol": 1e-12, "ftol": 1e-15},
        )
        assert np.allclose(res.x, ref.x, atol=1e-5)


def test_qp_rejects_asymmetric():
    with pytest.raises(LcpError):
        lcp_from_qp([[1, 2], [0, 1]], [0, 0])


def test_bimatrix_matching_pennies():
    A = np.array([[1.0, 2.0], [2.0, 1.0]])
    inst = lcp_from_bimatrix(A, A.T.copy())
    faces = enumerate_solution_faces(inst)
    mixed = [f for f in faces if len(f.support) == 4]
    assert mixed
    x, y = nash_from_lcp_solution(mixed[0].point, 2, 2)
    assert np.allclose(x, 0.5) and np.allclose(y, 0.5)


def test_bimatrix_needs_positive_losses():
    with pytest.raises(LcpError):
        lcp_from_bimatrix([[0.0, 1.0]], [[1.0, 1.0]])


def test_forest_support_path():
    g = path_graph(4)
    fs = forest_support_structure(g, [0.5, 0.5, 0, 1])
    assert fs.singles == (3,) and fs.pairs == ((0, 1),)


def test_forest_support_rejects_cycles():
    with pytest.raises(LcpError):
        forest_support_structure(cycle_graph(4), [1, 0, 1, 0])


def test_c5_residual_range():
    rr = w_residual_range(lcp_from_graph(cycle_graph(5)))
    assert not rr.w_unique
    assert np.all(rr.lo >= -1e-9)


def test_c5_fractional_point():
    # x = e/3 is a solution of LCP(C5) and reaches the lower value 5/3.
    inst = lcp_from_graph(cycle_graph(5))
    assert check_solution(inst, np.full(5, 1 / 3))
    assert min_l1_norm(cycle_graph(5)).value == pytest.approx(5 / 3)


# -- properties -------------------------------------------------------------------

graphs = st.builds(
    gen_erdos_renyi,
    st.integers(1, 7),
    st.floats(0, 1),
    st.integers(0, 2**32),
)


def _sol_points(g, rng, k=4):
    inst = lcp_from_graph(g)
    for _ in range(k):
        c = rng.normal(size=g.n)
        for sense in ("max", "min"):
            yield optimize_over_sol(inst, c, sense).x


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 2**32))
def test_solutions_are_dominating_fractional_covers(g, seed):
    rng = np.random.default_rng(seed)
    A = g.adjacency
    for x in _sol_points(g, rng):
        cover = x + A @ x
        assert np.all(x >= -1e-9) and np.all(x <= 1 + 1e-9)
        assert np.all(cover >= 1 - 1e-9)
        assert np.all(np.abs(cover[x > 1e-9] - 1) <= 1e-9)
        pair_sums = (x[:, None] + x[None, :])[A.astype(bool)]
        assert np.all(pair_sums <= 1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(graphs, st.integers(0, 2**32))
def test_alpha_at_least_m_and_brute(g, seed):
    hi = max_weighted_norm(g).value
    lo = min_l1_norm(g).value
    assert hi == pytest.approx(alpha_brute(g), abs=1e-7)
    assert lo <= hi + 1e-9
    assert alpha_brute(g) >= beta_brute(g) >= lo - 1e-9
    w = np.random.default_rng(seed).random(g.n) * 3
    assert max_weighted_norm(g, w).value == pytest.approx(alpha_weighted_brute(g, w), abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32))
def test_forest_solutions_split_into_k1_and_k2(n, seed):
    rng = np.random.default_rng(seed)
    g = random_forest(n, rng)
    for x in _sol_points(g, rng, k=3):
        fs = forest_support_structure(g, x)
        assert len(fs.singles) + 2 * len(fs.pairs) == int(np.sum(x > 1e-7))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32))
def test_forest_minimum_is_domination_number(n, seed):
    g = random_forest(n, np.random.default_rng(seed))
    assert min_l1_norm(g).value == pytest.approx(beta_brute(g), abs=1e-7)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8, 9])
def test_cycles_regular_minimum(n):
    assert min_l1_norm(cycle_graph(n)).value == pytest.approx(n / 3, abs=1e-9)
    assert beta_brute(cycle_graph(n)) == math.ceil(n / 3)
