"""Property suites that compare the LCP, ILP and SDP routes against the oracles.

Every suite is a pure function of its arguments and a seed; graphs are
visited in a fixed order and each property keeps the first few
counterexamples it meets.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import (
    Graph,
    cycle_graph,
    complete_graph,
    gen_erdos_renyi,
    petersen_graph,
    random_forest,
    to_edge_list,
)
from .lcp import (
    check_solution,
    integer_solutions,
    lcp_from_graph,
    max_weighted_norm,
    min_l1_norm,
    optimize_over_sol,
    w_residual_range,
)
from .milp import binary_points, maxis_polytope
from .oracle import (
    alpha_brute,
    alpha_weighted_brute,
    beta_brute,
    enumerate_maximal_independent_sets,
    is_well_covered,
)
from .sdp import SdpError
from .theta import theta_lovasz, theta_prime, theta_star_witness

WEIGHT_LEVELS = (0.0, 0.5, 1.0, 2.0, 3.5)
MAX_COUNTEREXAMPLES = 5
SUITES = ("thm1", "thm2", "lemmas", "theta-chain", "wellcovered")


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failed: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, detail=None):
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                self.counterexamples.append(detail)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class SuiteResult:
    suite: str
    properties: list
    values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "properties": [p.to_dict() for p in self.properties],
            "values": self.values,
        }


def _describe(g: Graph) -> str:
    return to_edge_list(g)


def all_labeled_graphs(n: int):
    """All ``2^(n(n-1)/2)`` simple graphs on vertices ``0..n-1``, by edge bitmask."""
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        a = np.zeros((n, n), dtype=np.int64)
        for k, (i, j) in enumerate(pairs):
            if code >> k & 1:
                a[i, j] = a[j, i] = 1
        yield Graph(a)


def random_graphs(count: int, max_n: int, rng: np.random.Generator, min_n: int = 1):
    """``G(n, p)`` with ``n`` uniform in ``[min_n, max_n]`` and ``p`` uniform in ``[0, 1]``."""
    for _ in range(count):
        n = int(rng.integers(min_n, max_n + 1))
        p = float(rng.random())
        yield gen_erdos_renyi(n, p, int(rng.integers(2**63)))


def random_forests(count: int, max_n: int, rng: np.random.Generator):
    for _ in range(count):
        yield random_forest(int(rng.integers(1, max_n + 1)), rng)


def random_weights(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(WEIGHT_LEVELS, size=n)


# -- suites ------------------------------------------------------------------------

def suite_thm1(max_n: int = 5, exhaustive: bool = False, count: int = 200, seed: int = 0,
               weights_per_graph: int = 10, tol: float = 1e-6) -> SuiteResult:
    """``max w @ x`` over SOL(G) against the brute-force weighted independence number."""
    rng = np.random.default_rng(seed)
    graphs = all_labeled_graphs(max_n) if exhaustive else random_graphs(count, max_n, rng)
    unweighted = PropertyResult("max e.x over SOL = alpha")
    weighted = PropertyResult("max w.x over SOL = alpha_w")
    for g in graphs:
        v = max_weighted_norm(g, np.ones(g.n)).value
        a = alpha_brute(g)
        unweighted.record(abs(v - a) <= tol, {"graph": _describe(g), "lcp": v, "brute": a})
        for _ in range(weights_per_graph):
            w = random_weights(g.n, rng)
            vw = max_weighted_norm(g, w).value
            aw = alpha_weighted_brute(g, w)
            weighted.record(
                abs(vw - aw) <= tol * (1 + aw),
                {"graph": _describe(g), "w": w.tolist(), "lcp": vw, "brute": aw},
            )
    return SuiteResult("thm1", [unweighted, weighted])


def suite_thm2(forests: int = 200, max_n: int = 12, seed: int = 0, tol: float = 1e-6) -> SuiteResult:
    """On forests the minimum l1 norm over SOL(G) equals the independent domination number."""
    rng = np.random.default_rng(seed)
    prop = PropertyResult("min e.x over SOL = beta on forests")
    for g in random_forests(forests, max_n, rng):
        m = min_l1_norm(g).value
        b = beta_brute(g)
        prop.record(abs(m - b) <= tol, {"graph": _describe(g), "lcp": m, "brute": b})
    return SuiteResult("thm2", [prop])


def regular_test_graphs() -> dict[str, Graph]:
    return {
        "cycle:4": cycle_graph(4),
        "cycle:5": cycle_graph(5),
        "cycle:8": cycle_graph(8),
        "complete:4": complete_graph(4),
        "petersen": petersen_graph(),
    }


def _binary_sets_agree(g: Graph):
    lcp_pts = set(integer_solutions(lcp_from_graph(g)))
    poly_pts = set(binary_points(maxis_polytope(g)))
    mis_pts = enumerate_maximal_independent_sets(g).indicators()
    return lcp_pts == poly_pts == mis_pts


def suite_lemmas(max_n: int = 5, seed: int = 0, count: int = 50, tol: float = 1e-7) -> SuiteResult:
    """Closed forms on regular graphs, the C8 gap, and the three-way binary-set equality."""
    regular = PropertyResult("m(G) = n/(d+1) on regular graphs")
    values = {}
    for name, g in regular_test_graphs().items():
        m = min_l1_norm(g).value
        d = int(g.degrees[0])
        values[name] = m
        regular.record(abs(m - g.n / (d + 1)) <= tol, {"graph": name, "m": m, "expected": g.n / (d + 1)})

    gap = PropertyResult("m(C8) = 8/3 < beta(C8) = 3")
    c8 = cycle_graph(8)
    m8, b8 = min_l1_norm(c8).value, beta_brute(c8)
    gap.record(abs(m8 - 8 / 3) <= 1e-8 and b8 == 3 and m8 < b8, {"m": m8, "beta": b8})

    petersen = PropertyResult("beta(Petersen) = 3 >= n/(d+1)")
    bp = beta_brute(petersen_graph())
    petersen.record(bp == 3 and bp >= 10 / 4, {"beta": bp})

    lattice = PropertyResult("binary SOL = binary MAXIS = maximal independent sets")
    zero = PropertyResult("zero vector is not a solution")
    graphs = list(itertools.chain.from_iterable(all_labeled_graphs(n) for n in range(1, min(max_n, 5) + 1)))
    if max_n > 5:
        graphs += list(random_graphs(count, max_n, np.random.default_rng(seed), min_n=6))
    for g in graphs:
        lattice.record(_binary_sets_agree(g), {"graph": _describe(g)})
        zero.record(not check_solution(lcp_from_graph(g), np.zeros(g.n)), {"graph": _describe(g)})
    return SuiteResult("lemmas", [regular, gap, petersen, lattice, zero], values)


def suite_theta_chain(n: int = 10, p: float = 0.5, count: int = 10, seed: int = 0,
                      tol: float = 1e-4, edge_tol: float = 1e-6, gap_tol: float = 1e-6) -> SuiteResult:
    """alpha <= th* <= th' <= th on ``G(n, p)`` with seeds ``seed .. seed + count - 1``."""
    chain = PropertyResult("alpha <= th* <= th' <= th")
    edges = PropertyResult("|w_ik| small on edges at the th* optimum")
    gaps = PropertyResult("relative duality gap within tolerance")
    values = {}
    for k in range(count):
        g = gen_erdos_renyi(n, p, seed + k)
        a = alpha_brute(g)
        try:
            star, W = theta_star_witness(g)
            prime, lov = theta_prime(g), theta_lovasz(g)
        except SdpError as exc:
            chain.record(False, {"seed": seed + k, "error": str(exc)})
            continue
        vals = [a, star.value, prime.value, lov.value]
        values[str(seed + k)] = vals
        chain.record(all(x <= y + tol for x, y in zip(vals, vals[1:])), {"seed": seed + k, "values": vals})
        worst = max((abs(W[i, j]) for i, j in g.edges), default=0.0)
        edges.record(worst <= edge_tol, {"seed": seed + k, "max_edge_w": worst})
        for r in (star, prime, lov):
            gaps.record(r.rel_gap <= gap_tol, {"seed": seed + k, "variant": r.variant, "gap": r.gap})
    return SuiteResult("theta-chain", [chain, edges, gaps], values)


def suite_wellcovered(forests: int = 100, max_n: int = 12, seed: int = 0, tol: float = 1e-6) -> SuiteResult:
    """Well-coveredness against the LCP: C5, and forests in both directions."""
    c5 = cycle_graph(5)
    c5_prop = PropertyResult("C5 well-covered but LCP(C5) not w-unique")
    rr = w_residual_range(lcp_from_graph(c5))
    c5_prop.record(is_well_covered(c5) and not rr.w_unique, {"w_unique": rr.w_unique})

    equiv = PropertyResult("forest well-covered iff max = min of e.x over SOL")
    half = PropertyResult("well-covered forests without isolated vertices: all maximal IS have size n/2")
    rng = np.random.default_rng(seed)
    for g in random_forests(forests, max_n, rng):
        inst = lcp_from_graph(g)
        hi = optimize_over_sol(inst, np.ones(g.n), "max").value
        lo = optimize_over_sol(inst, np.ones(g.n), "min").value
        wc = is_well_covered(g)
        equiv.record(wc == (abs(hi - lo) <= tol), {"graph": _describe(g), "max": hi, "min": lo, "well_covered": wc})
        if wc and g.n and int(g.degrees.min()) > 0:
            sizes = set(enumerate_maximal_independent_sets(g).sizes())
            half.record(sizes == {g.n // 2} and g.n % 2 == 0, {"graph": _describe(g), "sizes": sorted(sizes)})
    return SuiteResult("wellcovered", [c5_prop, equiv, half])
