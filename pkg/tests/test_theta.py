import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lcpgraph.graph import complete_graph, cycle_graph, empty_graph, gen_erdos_renyi, petersen_graph
from lcpgraph.oracle import alpha_brute
from lcpgraph.theta import (
    ChainViolation,
    ThetaReport,
    compare_pstar_readings,
    format_table,
    theta,
    theta_frac,
    theta_lovasz,
    theta_prime,
    theta_row,
    theta_star,
    theta_star_witness,
    theta_table,
)

# Values from an independent cvxpy/CLARABEL formulation, frozen here:
# (theta, theta', theta*, theta_FRAC)
FROZEN = {
    ("er", 10, 0.5, 0): (4.0, 4.0, 4.0, 4.0),
    ("er", 10, 0.5, 1): (3.2360680, 3.2360680, 3.2360680, 3.0325765),
    ("er", 10, 0.5, 2): (4.0, 4.0, 4.0, 4.0),
    ("cycle", 7): (3.3176672, 3.3176672, 3.3176672, 3.0),
}


def _graph(key):
    return gen_erdos_renyi(*key[1:]) if key[0] == "er" else cycle_graph(key[1])


@pytest.mark.parametrize("key", list(FROZEN), ids=str)
def test_frozen_reference_values(key):
    g = _graph(key)
    got = [theta(g, v).value for v in ("lovasz", "prime", "star", "frac")]
    assert got == pytest.approx(FROZEN[key], abs=1e-6)


@pytest.mark.parametrize("n", [5, 7, 9, 11])
def test_odd_cycle_closed_form(n):
    c = math.cos(math.pi / n)
    assert theta_lovasz(cycle_graph(n)).value == pytest.approx(n * c / (1 + c), abs=1e-6)


def test_named_graphs():
    assert theta_lovasz(petersen_graph()).value == pytest.approx(4, abs=1e-6)
    assert theta_lovasz(complete_graph(5)).value == pytest.approx(1, abs=1e-6)
    assert theta_lovasz(empty_graph(4)).value == pytest.approx(4, abs=1e-6)
    assert theta_frac(cycle_graph(5)).value == pytest.approx(2, abs=1e-6)


def test_c5_all_lifted_bounds_equal_sqrt5():
    g = cycle_graph(5)
    for f in (theta_lovasz, theta_prime, theta_star):
        assert f(g).value == pytest.approx(math.sqrt(5), abs=1e-6)


def test_strict_separation_of_star_and_prime():
    g = gen_erdos_renyi(15, 0.4, 8)
    star, prime = theta_star(g).value, theta_prime(g).value
    assert star == pytest.approx(4.214825, abs=1e-5)
    assert prime == pytest.approx(4.215596, abs=1e-5)
    assert star < prime - 1e-4


def test_star_witness_edges_and_source():
    g = gen_erdos_renyi(10, 0.4, 3)
    rep, W = theta_star_witness(g)
    assert max(abs(W[i, j]) for i, j in g.edges) <= 1e-6
    assert rep.residuals["source_violation"] <= 1e-6
    assert rep.constraints > 0 and rep.iterations > 0


def test_live_cvxpy_theta():
    cp = pytest.importorskip("cvxpy")
    g = gen_erdos_renyi(9, 0.3, 21)
    n = g.n
    X = cp.Variable((n, n), symmetric=True)
    cons = [X >> 0, cp.trace(X) == 1] + [X[i, j] == 0 for i, j in g.edges]
    ref = cp.Problem(cp.Maximize(cp.sum(X)), cons)
    ref.solve(solver="CLARABEL")
    assert theta_lovasz(g).value == pytest.approx(ref.value, abs=1e-5)
    cons += [X[i, j] >= 0 for i, j in itertools.combinations(range(n), 2) if not g.adjacency[i, j]]
    ref = cp.Problem(cp.Maximize(cp.sum(X)), cons)
    ref.solve(solver="CLARABEL")
    assert theta_prime(g).value == pytest.approx(ref.value, abs=1e-5)


def test_report_json_round_trip():
    rep = theta_lovasz(cycle_graph(5))
    back = ThetaReport.from_dict(json.loads(rep.to_json()))
    assert back == rep


def test_unknown_variant_and_size_limit():
    with pytest.raises(ValueError):
        theta(cycle_graph(5), "other")
    with pytest.raises(ValueError):
        theta_lovasz(empty_graph(31))


def test_pstar_reading_comparison_on_c5():
    cmp = compare_pstar_readings(cycle_graph(5))
    assert cmp.same_rows == {"maxis": True, "product": False, "printed": False}
    assert cmp.cut_binary_points == {"maxis": 0, "product": 0, "printed": 5}
    assert cmp.values["printed"] == "infeasible"
    assert cmp.values["maxis"] == pytest.approx(cmp.values["generated"], abs=1e-7)


def test_table_rows_and_format():
    rows = theta_table([(8, 0.5, 0), (8, 0.3, 1)])
    assert all(r.chain_ok and not r.failures for r in rows)
    text = format_table(rows)
    assert "th_FRAC" in text and "(8,0.5)" in text.replace(" ", "")
    assert len(text.strip().splitlines()) == 4


def test_row_alpha_matches_oracle():
    row = theta_row(10, 0.5, 1)
    assert row.alpha == alpha_brute(gen_erdos_renyi(10, 0.5, 1))
    assert isinstance(ChainViolation("x"), AssertionError)


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 8), st.floats(0.1, 0.9), st.integers(0, 2**32))
def test_chain_property(n, p, seed):
    g = gen_erdos_renyi(n, p, seed)
    chain = [alpha_brute(g), theta_star(g).value, theta_prime(g).value, theta_lovasz(g).value]
    assert all(a <= b + 1e-6 for a, b in zip(chain, chain[1:]))
    assert alpha_brute(g) <= theta_frac(g).value + 1e-6
    assert np.isfinite(chain).all()
