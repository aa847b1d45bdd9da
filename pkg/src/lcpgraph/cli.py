"""``lcpgraph`` command line: invariants, theta bounds, verification suites, tables.

Exit codes: 0 success, 1 verification failure or cross-check disagreement,
2 input error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, GraphError, gen_erdos_renyi, is_forest, named_graph, parse_graph
from .lcp import LcpError, lcp_from_graph, integer_solutions, optimize_over_sol, w_residual_range
from .milp import (
    alpha_via_ilp,
    beta_via_ilp,
    branch_and_bound,
    lcp_optimize_via_milp,
    maxis_polytope,
    milp_reformulate_lcp,
)
from .oracle import (
    OracleSizeError,
    alpha_brute,
    alpha_weighted_brute,
    beta_brute,
    enumerate_maximal_independent_sets,
    is_well_covered,
)
from .sdp import SdpInfeasible, SdpNotConverged
from .theta import VARIANTS, ChainViolation, format_table, theta, theta_table
from . import verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

QUANTITIES = ("alpha", "alpha-weighted", "beta", "m", "M", "well-covered", "w-unique")
METHODS = ("lcp-enum", "milp", "ilp", "brute")

# which methods can compute which quantity; the first entry is the default
APPLICABLE = {
    "alpha": ("lcp-enum", "milp", "ilp", "brute"),
    "alpha-weighted": ("lcp-enum", "milp", "ilp", "brute"),
    "beta": ("brute", "ilp", "lcp-enum"),
    "m": ("lcp-enum", "milp"),
    "M": ("lcp-enum", "milp"),
    "well-covered": ("brute", "ilp", "lcp-enum"),
    "w-unique": ("lcp-enum",),
}


class InputError(ValueError):
    pass


@dataclass
class RunReport:
    command: str
    source: str
    quantity: str
    value: object
    witness: object = None
    wall_time: float = 0.0
    tolerances: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


# -- graph sources -----------------------------------------------------------------

def _parse_er(text: str) -> tuple[int, float]:
    try:
        n, p = text.split(",")
        return int(n), float(p)
    except ValueError as exc:
        raise InputError(f"--er expects N,P, got {text!r}") from exc


def load_graph(args) -> tuple[Graph, str]:
    given = [s for s in (args.input, args.named, args.er) if s is not None]
    if len(given) != 1:
        raise InputError("give exactly one of --input, --named, --er")
    if args.input is not None:
        try:
            with open(args.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from exc
        return parse_graph(text), f"file:{args.input}"
    if args.named is not None:
        return named_graph(args.named), f"named:{args.named}"
    n, p = _parse_er(args.er)
    return gen_erdos_renyi(n, p, args.seed), f"er:{n},{p},seed={args.seed}"


def _weights(args, g: Graph) -> np.ndarray:
    if args.weights is None:
        return g.weights
    try:
        w = np.array([float(v) for v in args.weights.split(",")])
    except ValueError as exc:
        raise InputError(f"bad --weights {args.weights!r}") from exc
    if len(w) != g.n or np.any(w < 0):
        raise InputError(f"--weights needs {g.n} non-negative entries")
    return w


# -- invariants --------------------------------------------------------------------

def _vec(x):
    return None if x is None else [float(v) for v in x]


def _binary_opt(g, c, sense):
    res = branch_and_bound(c, sense, maxis_polytope(g), list(range(g.n)))
    return float(res.value), res.x


def _best_mis(g, w, sense):
    fam = enumerate_maximal_independent_sets(g)
    sets = fam.as_vertex_sets()
    score = [sum(w[i] for i in s) for s in sets]
    k = int(np.argmax(score) if sense == "max" else np.argmin(score))
    x = np.zeros(g.n)
    x[list(sets[k])] = 1.0
    return float(score[k]), x


def compute(quantity: str, method: str, g: Graph, w: np.ndarray):
    """``(value, witness)`` of ``quantity`` on ``g`` by ``method``."""
    if method not in APPLICABLE[quantity]:
        raise InputError(f"method {method!r} does not apply to {quantity!r}; use one of {APPLICABLE[quantity]}")
    e = np.ones(g.n)
    inst = lcp_from_graph(g)
    if quantity in ("alpha", "alpha-weighted", "M"):
        c = e if quantity == "alpha" else w
        if method == "lcp-enum":
            r = optimize_over_sol(inst, c, "max")
            return r.value, r.x
        if method == "milp":
            r = lcp_optimize_via_milp(milp_reformulate_lcp(inst), c, "max")
            return r.value, r.x
        if method == "ilp":
            if quantity == "alpha":
                r = alpha_via_ilp(g)
                return float(r.value), r.x
            return _binary_opt(g, c, "max")
        v = alpha_brute(g) if quantity == "alpha" else alpha_weighted_brute(g, c)
        return float(v), _best_mis(g, c, "max")[1]
    if quantity == "beta":
        if method == "lcp-enum":
            if not is_forest(g):
                raise InputError("the LCP route to beta is exact on forests only")
            r = optimize_over_sol(inst, e, "min")
            return r.value, r.x
        if method == "ilp":
            r = beta_via_ilp(g)
            return float(r.value), r.x
        return float(beta_brute(g)), _best_mis(g, e, "min")[1]
    if quantity == "m":
        if method == "lcp-enum":
            r = optimize_over_sol(inst, e, "min")
            return r.value, r.x
        r = lcp_optimize_via_milp(milp_reformulate_lcp(inst), e, "min")
        return r.value, r.x
    if quantity == "well-covered":
        if method == "brute":
            return is_well_covered(g), None
        if method == "ilp":
            return alpha_via_ilp(g).value == beta_via_ilp(g).value, None
        # binary LCP solutions are exactly the maximal independent sets
        sizes = {sum(x) for x in integer_solutions(inst)}
        return len(sizes) == 1, None
    rr = w_residual_range(inst)
    return rr.w_unique, {"lo": _vec(rr.lo), "hi": _vec(rr.hi)}


def _agree(a, b, tol) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    return abs(a - b) <= tol


def cmd_invariant(args) -> tuple[RunReport, int]:
    g, source = load_graph(args)
    w = _weights(args, g)
    method = args.method or APPLICABLE[args.command][0]
    t0 = time.perf_counter()
    value, witness = compute(args.command, method, g, w)
    stats = {"method": method, "n": g.n, "edges": g.num_edges}
    code = EXIT_OK
    if args.cross_check:
        others = {}
        for m in APPLICABLE[args.command]:
            if m == method or (args.command == "beta" and m == "lcp-enum" and not is_forest(g)):
                continue
            others[m] = compute(args.command, m, g, w)[0]
        stats["cross_check"] = others
        if not all(_agree(value, v, args.tol) for v in others.values()):
            code = EXIT_FAIL
    if isinstance(witness, np.ndarray):
        witness = _vec(witness)
    value = value if isinstance(value, bool) else float(value)
    rep = RunReport(args.command, source, args.command, value, witness,
                    time.perf_counter() - t0, {"tol": args.tol}, stats)
    return rep, code


def cmd_theta(args) -> tuple[RunReport, int]:
    g, source = load_graph(args)
    t0 = time.perf_counter()
    r = theta(g, args.variant)
    stats = {k: v for k, v in r.to_dict().items() if k not in ("value", "witness")}
    rep = RunReport("theta", source, f"theta-{args.variant}", r.value, r.witness,
                    time.perf_counter() - t0, {"gap": 1e-6}, stats)
    return rep, EXIT_OK


def cmd_verify(args) -> tuple[RunReport, int]:
    t0 = time.perf_counter()
    suite = args.suite
    if suite == "thm1":
        res = verify.suite_thm1(max_n=args.max_n or 5, exhaustive=args.exhaustive,
                                count=args.count or 200, seed=args.seed, tol=args.tol)
    elif suite == "thm2":
        res = verify.suite_thm2(forests=args.forests or args.count or 200, max_n=args.max_n or 12,
                                seed=args.seed, tol=args.tol)
    elif suite == "lemmas":
        res = verify.suite_lemmas(max_n=args.max_n or 5, seed=args.seed, count=args.count or 50)
    elif suite == "theta-chain":
        n, p = _parse_er(args.er) if args.er else (10, 0.5)
        res = verify.suite_theta_chain(n, p, count=args.count or 10, seed=args.seed)
    else:
        res = verify.suite_wellcovered(forests=args.forests or args.count or 100,
                                       max_n=args.max_n or 12, seed=args.seed, tol=args.tol)
    d = res.to_dict()
    rep = RunReport("verify", f"suite:{suite},seed={args.seed}", suite, d["passed"],
                    None, time.perf_counter() - t0, {"tol": args.tol},
                    {"properties": d["properties"], "values": d["values"]})
    return rep, EXIT_OK if res.passed else EXIT_FAIL


def _parse_table_spec(items) -> list[tuple[int, float, int]]:
    out = []
    for item in items:
        parts = item.split(",")
        if len(parts) != 3:
            raise InputError(f"table entries are N,P,SEED, got {item!r}")
        try:
            out.append((int(parts[0]), float(parts[1]), int(parts[2])))
        except ValueError as exc:
            raise InputError(f"bad table entry {item!r}") from exc
    return out


def cmd_table(args) -> tuple[RunReport, int]:
    specs = _parse_table_spec(args.rows)
    t0 = time.perf_counter()
    try:
        rows = theta_table(specs)
    except ChainViolation as exc:
        return RunReport("table", ";".join(args.rows), "theta-table", None, None, time.perf_counter() - t0,
                         {"chain": 1e-4}, {"error": str(exc)}), EXIT_FAIL
    text = format_table(rows)
    failed = any(r.failures for r in rows)
    rep = RunReport("table", ";".join(args.rows), "theta-table", [r.to_dict() for r in rows],
                    None, time.perf_counter() - t0, {"chain": 1e-4}, {"text": text})
    return rep, EXIT_SOLVER if failed else EXIT_OK


# -- entry point -------------------------------------------------------------------

def _add_source(p):
    p.add_argument("--input", help="graph file, edge list or DIMACS (auto-detected)")
    p.add_argument("--named", help="FAMILY:PARAMS, e.g. cycle:8, petersen")
    p.add_argument("--er", help="N,P for a seeded G(n, p)")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--json", action="store_true", help="print the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcpgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for q in QUANTITIES:
        p = sub.add_parser(q, help=f"compute {q}")
        _add_source(p)
        _add_common(p)
        p.add_argument("--method", choices=METHODS)
        p.add_argument("--cross-check", action="store_true", help="compare every applicable method")
        p.add_argument("--weights", help="comma-separated vertex weights")
    p = sub.add_parser("theta", help="an SDP upper bound on alpha")
    _add_source(p)
    _add_common(p)
    p.add_argument("--variant", choices=VARIANTS, default="lovasz")
    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=verify.SUITES)
    _add_common(p)
    p.add_argument("--er", help="N,P for the theta-chain suite")
    p.add_argument("--max-n", type=int)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--forests", type=int)
    p.add_argument("--count", type=int)
    p = sub.add_parser("table", help="theta comparison table over seeded G(n, p)")
    p.add_argument("rows", nargs="*", help="N,P,SEED entries")
    _add_common(p)
    return parser


def _human(rep: RunReport) -> str:
    if rep.command == "table":
        return rep.stats.get("text", rep.stats.get("error", ""))
    if rep.command == "verify":
        lines = []
        for prop in rep.stats["properties"]:
            mark = "PASS" if prop["passed"] else "FAIL"
            lines.append(f"{mark}  {prop['name']}  ({prop['checked']} checked, {prop['failed']} failed)")
            for ce in prop["counterexamples"]:
                lines.append(f"      counterexample: {json.dumps(ce)}")
        return "\n".join(lines)
    v = rep.value
    text = f"{rep.quantity} = {v:.6f}" if isinstance(v, float) else f"{rep.quantity} = {str(v).lower()}"
    if isinstance(rep.witness, list):
        text += "\nwitness x = [" + ", ".join(f"{x:.6f}" for x in rep.witness) + "]"
    return text


_COMMANDS = {"theta": cmd_theta, "verify": cmd_verify, "table": cmd_table}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = _COMMANDS.get(args.command, cmd_invariant)
    try:
        rep, code = handler(args)
    except (InputError, GraphError, OracleSizeError, LcpError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SdpNotConverged, SdpInfeasible) as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(rep.to_json() if args.json else _human(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
