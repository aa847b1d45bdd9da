"""Polytopes of a graph, a small branch-and-bound, and the big-M MILP for LCPs.

``MAXIS(G) = {0 <= x <= e : 0 <= (A+I)x - e <= (D-I)(e-x)}`` has exactly the
indicator vectors of maximal independent sets as its binary points, so
maximising (minimising) ``e @ x`` over them gives alpha (beta).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .lcp import LcpError, LcpInstance, check_solution, optimize_over_sol
from .lp import HPolytope, lp_solve

INT_TOL = 1e-6
MAX_BNB_N = 40


def maxis_polytope(g: Graph) -> HPolytope:
    """Rows ``(A+I)x >= e`` then ``-(A+D)x >= -d`` (the upper inequality rearranged)."""
    A, d = g.adjacency.astype(float), g.degrees.astype(float)
    n = g.n
    lower = A + np.eye(n)
    upper = -(A + np.diag(d))
    F = np.vstack([lower, upper])
    b = np.concatenate([np.ones(n), -d])
    return HPolytope(F, b, np.ones(n), "maxis")


def frac_polytope(g: Graph) -> HPolytope:
    """Edge relaxation ``x_i + x_j <= 1`` of the stable set polytope."""
    n = g.n
    F = np.zeros((g.num_edges, n))
    for k, (i, j) in enumerate(g.edges):
        F[k, i] = F[k, j] = -1.0
    return HPolytope(F, -np.ones(g.num_edges), np.ones(n), "frac")


def binary_points(p: HPolytope) -> list[tuple[int, ...]]:
    """Every 0/1 vector of ``p`` (2^n scan, exact for integral data)."""
    n = p.dim
    if n > 22:
        raise ValueError("binary scan limited to n <= 22")
    codes = np.arange(1 << n)
    X = ((codes[:, None] >> np.arange(n)) & 1).astype(float)
    ok = np.all(X <= p.u + 1e-12, axis=1) & np.all(X @ p.F.T >= p.b - 1e-12, axis=1)
    return sorted(tuple(int(v) for v in row) for row in X[ok])


# -- branch and bound ------------------------------------------------------------

@dataclass
class IlpResult:
    value: float
    x: np.ndarray
    nodes: int
    gap: float = 0.0
    verified: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "x": self.x.tolist(),
            "node_count": self.nodes,
            "gap": self.gap,
            "verified": self.verified,
        }


class InfeasibleIlp(ValueError):
    pass


def _node_lp(c, sense, poly, eq, fixed):
    u = poly.u.copy()
    rows, rhs = [], []
    for j, v in fixed.items():
        if v == 0:
            u[j] = 0.0
        else:
            r = np.zeros(poly.dim)
            r[j] = 1.0
            rows.append(r)
            rhs.append(float(v))
    eq_A, eq_b = eq
    if rows:
        eq_A = np.vstack([eq_A, rows])
        eq_b = np.concatenate([eq_b, rhs])
    node_poly = HPolytope(poly.F, poly.b, u, poly.kind)
    return lp_solve(c, sense, node_poly, eq_A, eq_b)


def branch_and_bound(
    c,
    sense: str,
    poly: HPolytope,
    binary: list[int],
    eq=None,
    integral_objective: bool = False,
) -> IlpResult:
    """Optimise over ``poly`` with the ``binary`` coordinates restricted to {0, 1}.

    LP-relaxation bounds, most-fractional branching, depth-first search that
    dives into the child with the better bound first. Node order is fully
    deterministic.
    """
    c = np.asarray(c, dtype=float)
    n = poly.dim
    if eq is None:
        eq = (np.zeros((0, n)), np.zeros(0))
    maximize = sense == "max"
    binary = list(binary)

    def prunable(bound, best):
        if best is None:
            return False
        if integral_objective:
            bound = np.floor(bound + INT_TOL) if maximize else np.ceil(bound - INT_TOL)
        return bound <= best + 1e-9 if maximize else bound >= best - 1e-9

    nodes = 0
    best_val, best_x = None, None
    root = _node_lp(c, sense, poly, eq, {})
    nodes += 1
    if root.status == "infeasible":
        raise InfeasibleIlp("relaxation is infeasible")
    if root.status == "unbounded":
        raise ValueError("relaxation is unbounded")
    stack = [({}, root)]
    while stack:
        fixed, res = stack.pop()
        if prunable(res.value, best_val):
            continue
        x = res.x
        frac = [(abs(x[j] - np.round(x[j])), j) for j in binary if j not in fixed]
        frac = [(f, j) for f, j in frac if f > INT_TOL]
        if not frac:
            xr = x.copy()
            xr[binary] = np.round(xr[binary])
            val = float(c @ xr)
            if best_val is None or (val > best_val if maximize else val < best_val):
                best_val, best_x = val, xr
            continue
        # most fractional; ties to the lowest index
        j = min(frac, key=lambda t: (abs(t[0] - 0.5), t[1]))[1]
        children = []
        for v in (0, 1):
            child = dict(fixed)
            child[j] = v
            r = _node_lp(c, sense, poly, eq, child)
            nodes += 1
            if r.status == "optimal" and not prunable(r.value, best_val):
                children.append((r.value, v, child, r))
        # push the weaker child first so the stronger one is explored next
        children.sort(key=lambda t: (t[0] if maximize else -t[0], -t[1]))
        for _, _, child, r in children:
            stack.append((child, r))
    if best_val is None:
        raise InfeasibleIlp("no integer point")
    return IlpResult(best_val, best_x, nodes)


# -- independence number via ILP ---------------------------------------------------

def _verify_maxis(g: Graph, x) -> bool:
    xi = [int(round(v)) for v in x]
    if any(v not in (0, 1) for v in xi):
        return False
    A = g.adjacency.tolist()
    d = [int(v) for v in g.degrees]
    for i in range(g.n):
        closed = xi[i] + sum(A[i][j] * xi[j] for j in range(g.n))
        if not 0 <= closed - 1 <= (d[i] - 1) * (1 - xi[i]):
            return False
    return True


def _verify_edges(g: Graph, x) -> bool:
    xi = [int(round(v)) for v in x]
    return all(v in (0, 1) for v in xi) and all(xi[i] + xi[j] <= 1 for i, j in g.edges)


def _check_n(g: Graph):
    if g.n > MAX_BNB_N:
        raise ValueError(f"n={g.n} exceeds the branch-and-bound limit {MAX_BNB_N}")


def alpha_via_ilp(g: Graph, formulation: str = "maxis") -> IlpResult:
    """Independence number from the compact ILP over MAXIS(G), or the edge ILP."""
    _check_n(g)
    if formulation == "maxis":
        poly, verify = maxis_polytope(g), _verify_maxis
    elif formulation == "edge":
        poly, verify = frac_polytope(g), _verify_edges
    else:
        raise ValueError(f"unknown formulation {formulation!r}")
    res = branch_and_bound(np.ones(g.n), "max", poly, list(range(g.n)), integral_objective=True)
    res.value = int(round(res.value))
    res.verified = verify(g, res.x) and sum(int(round(v)) for v in res.x) == res.value
    res.extra["formulation"] = formulation
    return res


def beta_via_ilp(g: Graph) -> IlpResult:
    """Independent domination number: the smallest binary point of MAXIS(G)."""
    _check_n(g)
    res = branch_and_bound(np.ones(g.n), "min", maxis_polytope(g), list(range(g.n)), integral_objective=True)
    res.value = int(round(res.value))
    res.verified = _verify_maxis(g, res.x) and sum(int(round(v)) for v in res.x) == res.value
    return res


# -- big-M reformulation of an LCP -------------------------------------------------

@dataclass(frozen=True)
class MilpModel:
    """Variables ``(x, z)``: ``0 <= x <= r z`` and ``0 <= Mx + q <= r'(e - z)``."""

    inst: LcpInstance
    r: np.ndarray
    r_prime: np.ndarray
    poly: HPolytope

    @property
    def n(self) -> int:
        return self.inst.n

    def to_dict(self) -> dict:
        d = self.poly.to_dict()
        d["r"] = self.r.tolist()
        d["r_prime"] = self.r_prime.tolist()
        return d


def milp_reformulate_lcp(inst: LcpInstance, r=None, r_prime=None) -> MilpModel:
    """Big-M model; graph instances default to ``r = 1`` and ``r'_i = d_i``."""
    n = inst.n
    if r is None or r_prime is None:
        if inst.provenance != "graph" or inst.graph is None:
            raise LcpError("bounds r, r' are required for non-graph instances")
        r = np.ones(n) if r is None else r
        r_prime = inst.graph.degrees.astype(float) if r_prime is None else r_prime
    r = np.broadcast_to(np.asarray(r, dtype=float), (n,)).copy()
    r_prime = np.broadcast_to(np.asarray(r_prime, dtype=float), (n,)).copy()
    if np.any(r < 0) or np.any(r_prime < 0):
        raise LcpError("bounds must be non-negative")
    M, q = inst.M, inst.q
    I = np.eye(n)
    F = np.vstack(
        [
            np.hstack([-I, np.diag(r)]),  # r z - x >= 0
            np.hstack([M, np.zeros((n, n))]),  # Mx >= -q
            np.hstack([-M, -np.diag(r_prime)]),  # r'(1 - z) - (Mx + q) >= 0
        ]
    )
    b = np.concatenate([np.zeros(n), -q, q - r_prime])
    u = np.concatenate([r, np.ones(n)])
    return MilpModel(inst, r, r_prime, HPolytope(F, b, u, "milp"))


@dataclass
class MilpResult:
    value: float
    x: np.ndarray
    z: np.ndarray
    nodes: int


def lcp_optimize_via_milp(model: MilpModel, c, sense: str = "max") -> MilpResult:
    n = model.n
    obj = np.concatenate([np.asarray(c, dtype=float), np.zeros(n)])
    res = branch_and_bound(obj, sense, model.poly, list(range(n, 2 * n)))
    x, z = res.x[:n], res.x[n:]
    return MilpResult(float(obj @ res.x), x, z, res.nodes)


@dataclass
class MilpCrossCheck:
    milp_value: float
    enum_value: float
    agree: bool
    witness_ok: bool


def milp_cross_check(model: MilpModel, c, sense: str = "max", tol: float = 1e-6) -> MilpCrossCheck:
    """Compare the MILP optimum with support enumeration; disagreement flags bad bounds."""
    milp = lcp_optimize_via_milp(model, c, sense)
    enum = optimize_over_sol(model.inst, c, sense)
    ok = bool(check_solution(model.inst, milp.x, 1e-7))
    return MilpCrossCheck(milp.value, enum.value, abs(milp.value - enum.value) <= tol, ok)
