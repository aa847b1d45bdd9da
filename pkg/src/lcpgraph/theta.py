"""Four SDP upper bounds on the independence number and a comparison table.

* ``lovasz``: ``max <J, X>`` with ``tr X = 1``, ``X_ij = 0`` on edges, ``X`` PSD.
* ``prime``: the same with ``X_ij >= 0`` on non-edges.
* ``star``: ``max e @ x`` over the N+ lift of MAXIS(G).
* ``frac``: ``max e @ x`` over the N+ lift of the edge relaxation FRAC(G).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, gen_erdos_renyi
from .lift import (
    PSTAR_READINGS,
    LinearizedPolytope,
    ls_lift,
    max_l1_over_lifted,
    pstar_transcription,
)
from .lp import HPolytope
from .milp import alpha_via_ilp, binary_points, frac_polytope, maxis_polytope
from .sdp import SdpError, SdpInfeasible, SdpProblem, SdpResult, sdp_solve

MAX_THETA_N = 30
VARIANTS = ("lovasz", "prime", "star", "frac")
CHAIN_TOL = 1e-4


@dataclass
class ThetaReport:
    variant: str
    value: float
    gap: float
    iterations: int
    n: int
    constraints: int
    witness: list | None = None
    residuals: dict = field(default_factory=dict)

    @property
    def rel_gap(self) -> float:
        return self.gap / (1.0 + abs(self.value))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_n(g: Graph):
    if g.n > MAX_THETA_N:
        raise ValueError(f"theta variants are limited to n <= {MAX_THETA_N}, got {g.n}")


def _unit(n, i, j):
    E = np.zeros((n, n))
    E[i, j] += 0.5
    E[j, i] += 0.5
    return E


def _float_residuals(res: SdpResult) -> dict:
    out = {k: float(v) for k, v in res.residuals.items()}
    out["dual_value"] = float(res.dual_value)
    out["elastic"] = float(res.reduced.get("elastic", 0.0))
    return out


def lovasz_sdp(g: Graph, nonnegative: bool = False) -> SdpProblem:
    """The theta SDP; with ``nonnegative`` the non-edge entries are also kept >= 0."""
    n = g.n
    eq_A = [np.eye(n)] + [_unit(n, i, j) for i, j in g.edges]
    eq_b = [1.0] + [0.0] * g.num_edges
    B, c = [], []
    if nonnegative:
        A = g.adjacency
        for i, j in zip(*np.triu_indices(n, 1)):
            if not A[i, j]:
                B.append(_unit(n, i, j))
                c.append(0.0)
    return SdpProblem(np.ones((n, n)), np.array(eq_A), np.array(eq_b), np.array(B).reshape(-1, n, n), np.array(c))


def _matrix_report(variant: str, g: Graph, prob: SdpProblem, **opts) -> ThetaReport:
    res = sdp_solve(prob, **opts)
    return ThetaReport(
        variant,
        float(res.value),
        float(res.gap),
        int(res.iterations),
        g.n,
        prob.num_constraints,
        None,
        _float_residuals(res),
    )


def theta_lovasz(g: Graph, **opts) -> ThetaReport:
    _check_n(g)
    return _matrix_report("lovasz", g, lovasz_sdp(g), **opts)


def theta_prime(g: Graph, **opts) -> ThetaReport:
    _check_n(g)
    return _matrix_report("prime", g, lovasz_sdp(g, nonnegative=True), **opts)


def lifted_report(variant: str, lp: LinearizedPolytope, source: HPolytope | None = None, **opts):
    """Maximise ``e @ x`` over ``lp``; returns the report and the optimal ``W``.

    The witness is checked against the lifted rows and, if given, the rows of
    ``source``; the worst violations go into ``residuals``.
    """
    opt = max_l1_over_lifted(lp, **opts)
    res = opt.result
    resid = _float_residuals(res)
    W = opt.W
    slack = lp.slacks(opt.x, W)
    resid["lifted_violation"] = float(max(0.0, -slack.min())) if slack.size else 0.0
    resid["diag_link"] = float(np.max(np.abs(np.diag(W) - opt.x), initial=0.0))
    if source is not None:
        x = opt.x
        viol = np.concatenate([source.b - source.F @ x, -x, x - source.u])
        resid["source_violation"] = float(max(0.0, viol.max()))
    rep = ThetaReport(
        variant,
        float(opt.value),
        float(res.gap),
        int(res.iterations),
        lp.n,
        lp.num_constraints + lp.n + 1,
        [float(v) for v in opt.x],
        resid,
    )
    return rep, W


def theta_star_witness(g: Graph, **opts):
    """``(report, W)`` for the MAXIS lift; ``W`` is needed to inspect edge entries."""
    _check_n(g)
    poly = maxis_polytope(g)
    return lifted_report("star", ls_lift(poly), poly, **opts)


def theta_star(g: Graph, **opts) -> ThetaReport:
    _check_n(g)
    poly = maxis_polytope(g)
    return lifted_report("star", ls_lift(poly), poly, **opts)[0]


def theta_frac(g: Graph, **opts) -> ThetaReport:
    _check_n(g)
    poly = frac_polytope(g)
    return lifted_report("frac", ls_lift(poly), poly, **opts)[0]


_DISPATCH = {
    "lovasz": theta_lovasz,
    "prime": theta_prime,
    "star": theta_star,
    "frac": theta_frac,
}


def theta(g: Graph, variant: str, **opts) -> ThetaReport:
    if variant not in _DISPATCH:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return _DISPATCH[variant](g, **opts)


# -- P* readings ---------------------------------------------------------------------

@dataclass
class ReadingComparison:
    """How the transcribed P* readings relate to the generated lift of MAXIS(G)."""

    values: dict
    same_rows: dict
    cut_binary_points: dict

    def to_dict(self) -> dict:
        return asdict(self)


def compare_pstar_readings(g: Graph, solve: bool = True, **opts) -> ReadingComparison:
    """Compare each transcription reading against ``ls_lift(maxis_polytope(g))``.

    ``same_rows[r]`` tells whether reading ``r`` spans the same constraint set
    (up to scaling and reordering) as the generated lift, ``cut_binary_points[r]``
    counts maximal-independent-set indicators ``x`` for which ``(x, x x')``
    violates some row, and ``values[r]`` holds the max-l1 value of each reading
    (or ``"infeasible"`` when its lifted set is empty).
    """
    poly = maxis_polytope(g)
    generated = ls_lift(poly)
    gen_keys = generated.row_keys()
    pts = [np.array(p, dtype=float) for p in binary_points(poly)]
    values = {"generated": max_l1_over_lifted(generated, **opts).value if solve else None}
    same, cut = {}, {}
    for reading in PSTAR_READINGS:
        lp = pstar_transcription(g, reading)
        same[reading] = lp.row_keys() == gen_keys
        cut[reading] = sum(1 for x in pts if lp.slacks(x, np.outer(x, x)).min() < -1e-9)
        if solve:
            try:
                values[reading] = max_l1_over_lifted(lp, **opts).value
            except SdpInfeasible:
                values[reading] = "infeasible"
            except SdpError:
                values[reading] = "not converged"
    return ReadingComparison(values, same, cut)


# -- comparison table ----------------------------------------------------------------

TABLE_COLUMNS = ("alpha", "frac", "star", "prime", "lovasz")
_HEADERS = {"alpha": "alpha", "frac": "th_FRAC", "star": "th*", "prime": "th'", "lovasz": "th"}


@dataclass
class TableRow:
    n: int
    p: float
    seed: int
    alpha: int
    cells: dict
    failures: dict
    chain_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


class ChainViolation(AssertionError):
    pass


def theta_row(n: int, p: float, seed: int, **opts) -> TableRow:
    """One graph ``G(n, p)`` with the given seed: alpha and the four bounds.

    A variant that fails to converge is recorded under ``failures`` and its
    cell left as ``None``. The chain alpha <= th* <= th' <= th must hold
    among the cells that converged; otherwise ``ChainViolation`` is raised.
    """
    g = gen_erdos_renyi(n, p, seed)
    alpha = int(alpha_via_ilp(g).value)
    cells, failures = {}, {}
    for variant in ("frac", "star", "prime", "lovasz"):
        try:
            cells[variant] = theta(g, variant, **opts).value
        except SdpError as exc:
            cells[variant] = None
            failures[variant] = str(exc)
    chain = [alpha] + [cells[v] for v in ("star", "prime", "lovasz")]
    known = [v for v in chain if v is not None]
    ok = all(a <= b + CHAIN_TOL for a, b in zip(known, known[1:]))
    if cells["frac"] is not None:
        ok = ok and alpha <= cells["frac"] + CHAIN_TOL
    row = TableRow(n, p, seed, alpha, cells, failures, ok)
    if not ok:
        raise ChainViolation(f"theta chain broken on G({n}, {p}) seed {seed}: {row.cells}, alpha={alpha}")
    return row


def theta_table(specs, **opts) -> list[TableRow]:
    return [theta_row(int(n), float(p), int(s), **opts) for n, p, s in specs]


def format_table(rows: list[TableRow]) -> str:
    """Fixed-width text table, values to four decimals; ``n/c`` marks a solve that failed."""
    head = f"{'(n,p)':<12}" + "".join(f"{_HEADERS[c]:>10}" for c in TABLE_COLUMNS)
    lines = [head, "-" * len(head)]
    for r in rows:
        label = f"({r.n},{r.p:g})"
        parts = [f"{r.alpha:>10d}"]
        for c in TABLE_COLUMNS[1:]:
            v = r.cells.get(c)
            parts.append(f"{'n/c':>10}" if v is None else f"{v:>10.4f}")
        lines.append(f"{label:<12}" + "".join(parts))
    return "\n".join(lines)
