"""Linear complementarity problems and linear optimisation over their solution sets.

``SOL(M, q)`` is the union over supports ``S`` of the polyhedra

    {x >= 0 : x_i = 0 (i not in S), (Mx + q)_i = 0 (i in S), Mx + q >= 0},

so exact optimisation over ``SOL`` runs one small LP per non-empty face.
When ``M[S, S]`` is nonsingular the face is at most a single point and is
solved directly instead of through the simplex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, connected_components, induced_subgraph, is_forest
from .lp import HPolytope, PreparedLp

ENUM_LIMIT = 22
CHECK_TOL = 1e-8
FACE_TOL = 1e-9


class LcpError(ValueError):
    pass


class LcpInfeasible(LcpError):
    """The instance has an empty solution set."""


class LcpUnbounded(LcpError):
    """A face LP is unbounded; supply a bounding box for raw instances."""


@dataclass(frozen=True, eq=False)
class LcpInstance:
    M: np.ndarray
    q: np.ndarray
    provenance: str = "raw"  # graph | qp | bimatrix | raw
    box: np.ndarray | None = None
    graph: Graph | None = field(default=None, repr=False)
    _faces: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=float))
        q = np.asarray(self.q, dtype=float).reshape(-1)
        if M.shape != (len(q), len(q)):
            raise LcpError(f"M must be {len(q)}x{len(q)}, got {M.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q", q)
        if self.box is not None:
            box = np.asarray(self.box, dtype=float).reshape(-1)
            if box.shape != q.shape:
                raise LcpError("box must match the dimension of q")
            object.__setattr__(self, "box", box)

    @property
    def n(self) -> int:
        return len(self.q)

    def residual(self, x) -> np.ndarray:
        return self.M @ np.asarray(x, dtype=float) + self.q

    def to_dict(self) -> dict:
        return {"M": self.M.tolist(), "q": self.q.tolist(), "provenance": self.provenance}

    @classmethod
    def from_dict(cls, d: dict) -> "LcpInstance":
        return cls(np.array(d["M"], dtype=float), np.array(d["q"], dtype=float), d.get("provenance", "raw"))


@dataclass(frozen=True)
class SolutionFace:
    support: tuple[int, ...]
    point: np.ndarray
    is_point: bool

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.support)

    def to_dict(self) -> dict:
        return {"support": [i + 1 for i in self.support], "witness": self.point.tolist()}


@dataclass(frozen=True)
class LcpSolution:
    x: np.ndarray
    y: np.ndarray
    support: tuple[int, ...]

    @classmethod
    def of(cls, inst: LcpInstance, x, tol: float = CHECK_TOL) -> "LcpSolution":
        x = np.asarray(x, dtype=float)
        return cls(x, inst.residual(x), tuple(int(i) for i in np.flatnonzero(x > tol)))


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    nonnegative: bool
    feasible: bool
    complementary: bool
    min_x: float
    min_y: float
    max_product: float

    def __bool__(self):
        return self.ok

    def failed(self) -> list[str]:
        names = ["nonnegative", "feasible", "complementary"]
        return [k for k in names if not getattr(self, k)]


@dataclass(frozen=True)
class OptResult:
    value: float
    x: np.ndarray
    support: tuple[int, ...]
    faces: int


# -- constructors ------------------------------------------------------------

def lcp_from_graph(g: Graph) -> LcpInstance:
    """``LCP(A + I, -e)``; its solutions live in the unit box."""
    n = g.n
    return LcpInstance(g.adjacency + np.eye(n), -np.ones(n), "graph", np.ones(n), g)


def lcp_from_qp(Q, c, A=None, b=None) -> LcpInstance:
    """KKT system of ``min 1/2 x'Qx + c'x  s.t.  Ax >= b, x >= 0`` in ``(x, lambda)``."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    c = np.asarray(c, dtype=float).reshape(-1)
    n = len(c)
    if Q.shape != (n, n):
        raise LcpError(f"Q must be {n}x{n}")
    if not np.allclose(Q, Q.T):
        raise LcpError("Q must be symmetric")
    A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float).reshape(-1)
    if A.size == 0:
        A = A.reshape(0, n)
    if A.shape[1] != n or A.shape[0] != len(b):
        raise LcpError("constraint dimensions do not match")
    m = len(b)
    M = np.block([[Q, -A.T], [A, np.zeros((m, m))]])
    return LcpInstance(M, np.concatenate([c, -b]), "qp")


def lcp_from_bimatrix(A, B) -> LcpInstance:
    """``M = [[0, A], [B', 0]]``, ``q = -e`` for positive ``m x n`` loss matrices."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape != B.shape:
        raise LcpError("A and B must have the same shape")
    if np.any(A <= 0) or np.any(B <= 0):
        raise LcpError("bimatrix reduction needs strictly positive entries")
    m, n = A.shape
    M = np.block([[np.zeros((m, m)), A], [B.T, np.zeros((n, n))]])
    return LcpInstance(M, -np.ones(m + n), "bimatrix")


def nash_from_lcp_solution(sol: LcpSolution | np.ndarray, m: int, n: int):
    """Normalise the two blocks of a bimatrix LCP solution onto their simplices."""
    x = sol.x if isinstance(sol, LcpSolution) else np.asarray(sol, dtype=float)
    if len(x) != m + n:
        raise LcpError(f"expected a vector of length {m + n}")
    first, second = x[:m], x[m:]
    if first.sum() <= 0 or second.sum() <= 0:
        raise LcpError("cannot normalise a zero block")
    return first / first.sum(), second / second.sum()


# -- checks ------------------------------------------------------------------

def check_solution(inst: LcpInstance, x, tol: float = CHECK_TOL) -> CheckReport:
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise LcpError(f"expected a vector of length {inst.n}")
    y = inst.residual(x)
    min_x, min_y = float(x.min()), float(y.min())
    prod = float(np.max(np.abs(x * y)))
    nonneg, feas, comp = min_x >= -tol, min_y >= -tol, prod <= tol
    return CheckReport(nonneg and feas and comp, nonneg, feas, comp, min_x, min_y, prod)


# -- face enumeration --------------------------------------------------------

def _face_region(inst: LcpInstance, S, bounds) -> PreparedLp:
    C = [i for i in range(inst.n) if i not in set(S)]
    M, q = inst.M, inst.q
    u = np.full(len(S), np.inf) if bounds is None else bounds[S]
    poly = HPolytope(M[np.ix_(C, S)], -q[C], u, "face")
    return PreparedLp(poly, M[np.ix_(S, S)], -q[S])


def _point_face(inst: LcpInstance, S, bounds):
    """Solve a face whose equality block is nonsingular. Returns (status, x)."""
    Mss = inst.M[np.ix_(S, S)]
    U, s, Vt = np.linalg.svd(Mss)
    if s[-1] <= 1e-10 * max(s[0], 1.0):
        return "singular", None
    xs = Vt.T @ ((U.T @ -inst.q[S]) / s)
    if xs.min() < -FACE_TOL:
        return "empty", None
    xs = np.clip(xs, 0.0, None)
    x = np.zeros(inst.n)
    x[S] = xs
    if inst.residual(x).min() < -FACE_TOL:
        return "empty", None
    if bounds is not None and np.any(xs > bounds[S] + FACE_TOL):
        return "empty", None
    return "point", x


def _classify_face(inst: LcpInstance, S, bounds):
    """Returns ``(status, point, region)`` with status in point | face | empty."""
    if not S:
        if inst.q.min() >= -FACE_TOL:
            return "point", np.zeros(inst.n), None
        return "empty", None, None
    status, x = _point_face(inst, S, bounds)
    if status != "singular":
        return status, x, None
    region = _face_region(inst, S, bounds)
    if not region.feasible:
        return "empty", None, None
    x = np.zeros(inst.n)
    x[S] = region.feasible_point()
    return "face", x, region


def _bounds(inst: LcpInstance, bounds):
    if bounds is not None:
        return np.asarray(bounds, dtype=float).reshape(-1)
    return inst.box


def enumerate_solution_faces(inst: LcpInstance, bounds=None, limit: int = ENUM_LIMIT) -> list[SolutionFace]:
    """All non-empty faces of ``SOL(inst)``, sorted by support bitmask."""
    if inst.n > limit:
        raise LcpError(f"n={inst.n} exceeds the enumeration limit {limit}")
    box = _bounds(inst, bounds)
    key = None if box is None else box.tobytes()
    if key in inst._faces:
        return inst._faces[key]
    faces, regions = [], {}
    for k in range(inst.n + 1):
        for S in itertools.combinations(range(inst.n), k):
            status, x, region = _classify_face(inst, list(S), box)
            if status == "empty":
                continue
            faces.append(SolutionFace(S, x, status == "point"))
            if region is not None:
                regions[S] = region
    faces.sort(key=lambda f: f.mask)
    inst._faces[key] = faces
    inst._faces[("regions", key)] = regions
    return faces


def optimize_over_sol(inst: LcpInstance, c, sense: str = "max", bounds=None) -> OptResult:
    """Exact optimum of ``c @ x`` over ``SOL(inst)``; every face LP is solved."""
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.shape != (inst.n,):
        raise LcpError(f"objective must have length {inst.n}")
    box = _bounds(inst, bounds)
    faces = enumerate_solution_faces(inst, box)
    regions = inst._faces[("regions", None if box is None else box.tobytes())]
    if not faces:
        raise LcpInfeasible("LCP has no solution")
    best = None
    better = (lambda a, b: a > b) if sense == "max" else (lambda a, b: a < b)
    for face in faces:
        if face.is_point:
            x = face.point
        else:
            S = list(face.support)
            res = regions[face.support].solve(c[S], sense, duals=False)
            if res.status == "unbounded":
                raise LcpUnbounded(f"face {[i + 1 for i in S]} is unbounded")
            x = np.zeros(inst.n)
            x[S] = res.x
        v = float(c @ x)
        if best is None or better(v, best[0] + (1e-12 if sense == "max" else -1e-12)):
            best = (v, x, face.support)
    return OptResult(best[0], best[1], best[2], len(faces))


def solution_set_supports(inst: LcpInstance, bounds=None) -> set[int]:
    return {f.mask for f in enumerate_solution_faces(inst, bounds)}


# -- graph invariants through SOL(G) -----------------------------------------

def max_weighted_norm(g: Graph, w=None) -> OptResult:
    """``M_w(G)``: the maximum of ``w @ x`` over ``SOL(G)``."""
    w = g.weights if w is None else np.asarray(w, dtype=float)
    return optimize_over_sol(lcp_from_graph(g), w, "max")


def min_l1_norm(g: Graph) -> OptResult:
    """``m(G)``: the minimum of ``e @ x`` over ``SOL(G)``."""
    return optimize_over_sol(lcp_from_graph(g), np.ones(g.n), "min")


def integer_solutions(inst: LcpInstance, chunk: int = 1 << 14) -> list[tuple[int, ...]]:
    """Binary solutions of the LCP by a vectorised scan of ``{0, 1}^n``."""
    n = inst.n
    if n > 25:
        raise LcpError("integer scan limited to n <= 25")
    M, q = inst.M, inst.q
    bits = 1 << np.arange(n)
    out = []
    for start in range(0, 1 << n, chunk):
        codes = np.arange(start, min(start + chunk, 1 << n))
        X = ((codes[:, None] & bits) > 0).astype(float)
        Y = X @ M.T + q
        ok = (Y.min(axis=1) >= -1e-12) & (np.abs(X * Y).max(axis=1) <= 1e-12)
        out.extend(tuple(int(v) for v in row) for row in X[ok])
    return sorted(out)


@dataclass(frozen=True)
class ForestSupport:
    singles: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...]


def forest_support_structure(g: Graph, x, tol: float = 1e-7) -> ForestSupport:
    """Split the support of ``x`` in ``SOL(G)`` into isolated vertices and matched pairs.

    Raises ``LcpError`` if ``g`` is not a forest or if the support induces any
    component other than K1 (value 1) or K2 (values summing to 1).
    """
    if not is_forest(g):
        raise LcpError("graph is not a forest")
    x = np.asarray(x, dtype=float)
    S = [int(i) for i in np.flatnonzero(x > tol)]
    if not S:
        raise LcpError("zero vector is not a solution")
    sub = induced_subgraph(g, S)
    singles, pairs = [], []
    for comp in connected_components(sub):
        verts = [S[i] for i in comp]
        if len(verts) == 1 and abs(x[verts[0]] - 1) <= tol:
            singles.append(verts[0])
        elif (
            len(verts) == 2
            and abs(x[verts].sum() - 1) <= tol
            and np.all((x[verts] > 0) & (x[verts] < 1))
        ):
            pairs.append(tuple(verts))
        else:
            raise LcpError(f"support component {[v + 1 for v in verts]} is neither K1 nor K2")
    return ForestSupport(tuple(singles), tuple(pairs))


@dataclass(frozen=True)
class ResidualRange:
    lo: np.ndarray
    hi: np.ndarray
    w_unique: bool


def w_residual_range(inst: LcpInstance, tol: float = 1e-7) -> ResidualRange:
    """Range of each residual coordinate ``(Mx + q)_i`` over ``SOL``."""
    lo, hi = np.zeros(inst.n), np.zeros(inst.n)
    for i in range(inst.n):
        row = inst.M[i]
        lo[i] = optimize_over_sol(inst, row, "min").value + inst.q[i]
        hi[i] = optimize_over_sol(inst, row, "max").value + inst.q[i]
    return ResidualRange(lo, hi, bool(np.all(hi - lo <= tol)))
