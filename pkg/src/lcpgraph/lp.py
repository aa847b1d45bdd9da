"""Dense two-phase tableau simplex for small LPs over ``{Fx >= b, 0 <= x <= u}``.

Pricing is Dantzig's rule until the solve has made ``10 * n`` degenerate
pivots, after which Bland's rule takes over for the rest of the solve, so
the method cannot cycle. Ratio-test ties go to the basic variable with the
smallest column index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
COST_TOL = 1e-9
FEAS_TOL = 1e-7


@dataclass(frozen=True)
class HPolytope:
    """``{x : F x >= b, 0 <= x <= u}``; ``u`` may hold ``inf`` for unbounded coordinates."""

    F: np.ndarray
    b: np.ndarray
    u: np.ndarray
    kind: str = "raw"

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        u = np.asarray(self.u, dtype=float).reshape(-1)
        if F.size == 0:
            F = F.reshape(0, len(u))
        if F.shape != (len(b), len(u)):
            raise ValueError(f"inconsistent shapes F{F.shape} b{b.shape} u{u.shape}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return len(self.u)

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.u)))

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= -tol)
            and np.all(x <= self.u + tol)
            and np.all(self.F @ x >= self.b - tol)
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "F": self.F.tolist(),
            "b": self.b.tolist(),
            "u": [None if not np.isfinite(v) else float(v) for v in self.u],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HPolytope":
        u = [np.inf if v is None else v for v in d["u"]]
        F = np.array(d["F"], dtype=float).reshape(len(d["b"]), len(u))
        return cls(F, d["b"], u, d.get("kind", "raw"))


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float = float("nan")
    x: np.ndarray | None = None
    dual: dict = field(default_factory=dict)
    dual_value: float = float("nan")
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, A, rhs, basis, n_struct):
        m, N = A.shape
        self.T = np.zeros((m + 1, N + 1))
        self.T[:m, :N] = A
        self.T[:m, N] = rhs
        self.basis = list(basis)
        self.m, self.N = m, N
        self.n_struct = n_struct
        self.pivots = 0
        self.degenerate = 0

    def set_cost(self, c):
        # reduced-cost row: c - c_B B^{-1} A, stored so that T[-1, -1] = -objective
        T = self.T
        T[-1, :] = 0.0
        T[-1, : len(c)] = c
        for r, j in enumerate(self.basis):
            if T[-1, j] != 0.0:
                T[-1, :] -= T[-1, j] * T[r, :]

    def pivot(self, r, k):
        T = self.T
        T[r, :] /= T[r, k]
        col = T[:, k].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r, :])
        self.basis[r] = k
        self.pivots += 1

    def run(self, allowed):
        """Minimise the current cost row over columns in ``allowed``."""
        T, m = self.T, self.m
        bland = False
        limit = 10 * max(self.n_struct, 1)
        while True:
            red = T[-1, :-1]
            cand = np.flatnonzero((red < -COST_TOL) & allowed)
            if cand.size == 0:
                return "optimal"
            k = int(cand[0]) if bland else int(cand[np.argmin(red[cand])])
            col = T[:m, k]
            pos = np.flatnonzero(col > PIVOT_TOL)
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12]
            r = int(min(ties, key=lambda i: self.basis[i]))
            if best <= 1e-12:
                self.degenerate += 1
                if self.degenerate > limit:
                    bland = True
            self.pivot(r, k)

    def solution(self):
        x = np.zeros(self.N)
        for r, j in enumerate(self.basis):
            x[j] = self.T[r, -1]
        return x


class PreparedLp:
    """Standard-form tableau over a fixed feasible region, after phase 1.

    ``solve`` runs phase 2 from a copy of the feasible basis, so one region
    can be optimised for many objectives without repeating phase 1.
    """

    def __init__(self, polytope: HPolytope, eq_A=None, eq_b=None):
        n = polytope.dim
        F, b, u = polytope.F, polytope.b, polytope.u
        if eq_A is None:
            eq_A, eq_b = np.zeros((0, n)), np.zeros(0)
        eq_A = np.atleast_2d(np.asarray(eq_A, dtype=float)).reshape(-1, n)
        eq_b = np.asarray(eq_b, dtype=float).reshape(-1)
        if len(eq_b) != eq_A.shape[0]:
            raise ValueError("equality rows and right-hand side differ in length")
        ub = np.flatnonzero(np.isfinite(u))
        m1, m2, m3 = len(b), len(ub), len(eq_b)
        m = m1 + m2 + m3
        n_slack = m1 + m2
        N0 = n + n_slack

        A = np.zeros((m, N0))
        rhs = np.zeros(m)
        A[:m1, :n] = F
        A[:m1, n : n + m1] = -np.eye(m1)
        rhs[:m1] = b
        for k, j in enumerate(ub):
            A[m1 + k, j] = 1.0
            A[m1 + k, n + m1 + k] = 1.0
        rhs[m1 : m1 + m2] = u[ub]
        A[m1 + m2 :, :n] = eq_A
        rhs[m1 + m2 :] = eq_b
        self.A, self.rhs = A.copy(), rhs.copy()
        self.n, self.N0 = n, N0
        self.m1, self.m2, self.m3 = m1, m2, m3

        flip = rhs < 0
        A[flip] *= -1
        rhs[flip] *= -1

        # rows whose slack column is +1 after flipping start with that slack basic
        basis = [-1] * m
        for i in range(n_slack):
            if A[i, n + i] == 1.0:
                basis[i] = n + i
        need = [i for i in range(m) if basis[i] < 0]
        n_art = len(need)
        A_full = np.zeros((m, N0 + n_art))
        A_full[:, :N0] = A
        for k, i in enumerate(need):
            A_full[i, N0 + k] = 1.0
            basis[i] = N0 + k

        tab = _Tableau(A_full, rhs, basis, n)
        self.allowed = np.ones(N0 + n_art, dtype=bool)
        self.feasible = True
        if n_art:
            cost1 = np.zeros(N0 + n_art)
            cost1[N0:] = 1.0
            tab.set_cost(cost1)
            tab.run(self.allowed)
            if -tab.T[-1, -1] > FEAS_TOL:
                self.feasible = False
            else:
                self._purge_artificials(tab, N0)
            self.allowed[N0:] = False
        self.tab = tab
        self.phase1_pivots = tab.pivots

    @staticmethod
    def _purge_artificials(tab, N0):
        # drive zero-level artificials out of the basis; drop redundant rows
        keep = []
        for r in range(tab.m):
            if tab.basis[r] >= N0:
                nz = np.flatnonzero(np.abs(tab.T[r, :N0]) > PIVOT_TOL)
                if nz.size:
                    tab.pivot(r, int(nz[0]))
                    keep.append(r)
            else:
                keep.append(r)
        if len(keep) < tab.m:
            tab.T = np.vstack([tab.T[keep], tab.T[-1:]])
            tab.basis = [tab.basis[r] for r in keep]
            tab.m = len(keep)

    def feasible_point(self) -> np.ndarray:
        return np.clip(self.tab.solution()[: self.n], 0.0, None)

    def solve(self, c, sense: str = "min", duals: bool = True) -> LpResult:
        if sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
        c = np.asarray(c, dtype=float).reshape(-1)
        n = self.n
        if c.shape != (n,):
            raise ValueError(f"objective has length {len(c)}, problem dimension is {n}")
        if not self.feasible:
            return LpResult("infeasible", pivots=self.phase1_pivots)
        tab = _Tableau.__new__(_Tableau)
        tab.__dict__.update(self.tab.__dict__)
        tab.T = self.tab.T.copy()
        tab.basis = list(self.tab.basis)
        tab.pivots = 0
        tab.degenerate = 0
        sign = 1.0 if sense == "min" else -1.0
        cost = np.zeros(len(self.allowed))
        cost[:n] = sign * c
        tab.set_cost(cost)
        status = tab.run(self.allowed)
        pivots = self.phase1_pivots + tab.pivots
        if status == "unbounded":
            return LpResult("unbounded", pivots=pivots)
        x = np.clip(tab.solution()[:n], 0.0, None)
        value = float(c @ x)
        if not duals:
            return LpResult("optimal", value, x, pivots=pivots)
        # multipliers of the unflipped system: any y with y B = c_B (redundant
        # rows do not change reduced costs or the dual objective)
        B = self.A[:, tab.basis]
        y, *_ = np.linalg.lstsq(B.T, cost[tab.basis], rcond=None)
        dual_value = sign * float(y @ self.rhs)
        y = sign * y
        m1, m2 = self.m1, self.m2
        dual = {"ineq": y[:m1], "upper": y[m1 : m1 + m2], "eq": y[m1 + m2 :]}
        return LpResult("optimal", value, x, dual, dual_value, pivots)


def lp_solve(c, sense: str, polytope: HPolytope, eq_A=None, eq_b=None) -> LpResult:
    """Optimise ``c @ x`` over ``polytope`` intersected with ``eq_A x = eq_b``.

    ``sense`` is ``"min"`` or ``"max"``. Infeasible and unbounded problems are
    reported through ``status``. The dual certificate holds multipliers for
    the ``F`` rows (``ineq``, non-negative), the upper bounds (``upper``,
    non-positive) and the equalities (``eq``, free).
    """
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (polytope.dim,):
        raise ValueError(f"objective has length {len(c)}, polytope dimension is {polytope.dim}")
    return PreparedLp(polytope, eq_A, eq_b).solve(c, sense)
