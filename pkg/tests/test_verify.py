import json

import numpy as np
import pytest

from lcpgraph.verify import (
    WEIGHT_LEVELS,
    PropertyResult,
    all_labeled_graphs,
    random_forests,
    random_graphs,
    random_weights,
    suite_lemmas,
    suite_theta_chain,
    suite_thm1,
    suite_thm2,
    suite_wellcovered,
)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 8), (4, 64)])
def test_labeled_graph_counts(n, count):
    graphs = list(all_labeled_graphs(n))
    assert len(graphs) == count
    assert len({g.adjacency.tobytes() for g in graphs}) == count


def test_generators_are_reproducible():
    a = [g.edges for g in random_graphs(10, 8, np.random.default_rng(1))]
    b = [g.edges for g in random_graphs(10, 8, np.random.default_rng(1))]
    assert a == b
    assert all(1 <= g.n <= 6 for g in random_forests(30, 6, np.random.default_rng(2)))
    w = random_weights(50, np.random.default_rng(3))
    assert set(w.tolist()) <= set(WEIGHT_LEVELS)


def test_counterexamples_are_capped():
    prop = PropertyResult("p")
    for k in range(9):
        prop.record(False, k)
    assert (prop.checked, prop.failed, prop.counterexamples) == (9, 9, [0, 1, 2, 3, 4])
    assert not prop.passed


def test_suites_pass_and_serialise():
    for res in (
        suite_thm1(max_n=4, exhaustive=True, weights_per_graph=2),
        suite_thm2(forests=30),
        suite_lemmas(max_n=4),
        suite_wellcovered(forests=30),
        suite_theta_chain(n=8, p=0.5, count=3),
    ):
        assert res.passed, res.to_dict()
        json.dumps(res.to_dict())


def test_theta_chain_values_are_ordered():
    res = suite_theta_chain(n=9, p=0.4, count=2, seed=5)
    for vals in res.values.values():
        assert all(a <= b + 1e-4 for a, b in zip(vals, vals[1:]))
