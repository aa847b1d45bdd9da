"""Dense primal-dual interior-point solver for small SDPs with one PSD block.

Problems are stated as

    maximize   <C, X>
    subject to <A_k, X> = b_k,   <B_k, X> >= c_k,   X PSD.

Equalities are eliminated up front by writing ``svec(X) = s0 + T u`` with an
orthonormal nullspace basis ``T``. Opposite inequality pairs (implicit
equalities) are folded into that parameterisation as well, and vectors in
the common kernel of the affine map ``u -> X(u)`` are projected out of the
PSD block. What remains is an LMI problem in ``u`` with a strictly feasible
interior in the cases of interest; it is solved with an infeasible-start
HKM predictor-corrector method whose inequalities form a nonnegative-orthant
block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_BLOCK = 35
MAX_ITER = 100
GAP_TOL = 1e-8
ACCEPT_TOL = 1e-7
PENALTY = 1e2
PENALTY_ROUNDS = 3
ELASTIC_TOL = 1e-9
_NULL_TOL = 1e-10
_PAIR_TOL = 1e-9
_KEY_SCALE = 1e7


class SdpError(RuntimeError):
    pass


class SdpInfeasible(SdpError):
    pass


class SdpNotConverged(SdpError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass
class SdpProblem:
    """``max <C, X>`` over ``X`` PSD with equality and ``>=`` inequality rows."""

    C: np.ndarray
    eq_A: np.ndarray = None
    eq_b: np.ndarray = None
    ineq_B: np.ndarray = None
    ineq_c: np.ndarray = None

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        m = C.shape[0]
        if C.shape != (m, m):
            raise ValueError("objective must be square")
        self.C = C
        self.eq_A, self.eq_b = _stack(self.eq_A, self.eq_b, m)
        self.ineq_B, self.ineq_c = _stack(self.ineq_B, self.ineq_c, m)
        for name, mats in (("C", C[None]), ("equality", self.eq_A), ("inequality", self.ineq_B)):
            if mats.size and not np.allclose(mats, mats.transpose(0, 2, 1), atol=1e-12):
                raise ValueError(f"{name} matrices must be symmetric")

    @property
    def m(self) -> int:
        return self.C.shape[0]

    @property
    def num_constraints(self) -> int:
        return len(self.eq_b) + len(self.ineq_c)


def _stack(mats, rhs, m):
    if mats is None or len(mats) == 0:
        return np.zeros((0, m, m)), np.zeros(0)
    mats = np.asarray(mats, dtype=float).reshape(-1, m, m)
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if len(rhs) != len(mats):
        raise ValueError("constraint matrices and right-hand sides differ in number")
    return mats, rhs


@dataclass
class SdpResult:
    status: str
    value: float
    dual_value: float
    X: np.ndarray
    iterations: int
    gap: float
    residuals: dict = field(default_factory=dict)
    reduced: dict = field(default_factory=dict)

    @property
    def rel_gap(self) -> float:
        return self.gap / (1.0 + abs(self.value))


# -- symmetric vectorisation -------------------------------------------------------

class _Svec:
    def __init__(self, m):
        self.m = m
        self.iu = np.triu_indices(m)
        self.w = np.where(self.iu[0] == self.iu[1], 1.0, np.sqrt(2.0))

    def vec(self, A):
        return A[..., self.iu[0], self.iu[1]] * self.w

    def mat(self, v):
        v = np.asarray(v)
        out = np.zeros(v.shape[:-1] + (self.m, self.m))
        out[..., self.iu[0], self.iu[1]] = v / self.w
        out[..., self.iu[1], self.iu[0]] = v / self.w
        return out


def _nullspace(A, tol=_NULL_TOL):
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    scale = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(scale, 1.0)))
    return vt[rank:].T


def _affine_solve(A, b, what):
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ x - b) > 1e-8 * (1.0 + np.linalg.norm(b)):
        raise SdpInfeasible(f"{what} are inconsistent")
    return x


# -- preprocessing -----------------------------------------------------------------

def _normalized_rows(G, h):
    """Scale rows to unit norm, drop trivial rows and keep the tightest duplicate."""
    norms = np.linalg.norm(G, axis=1)
    trivial = norms <= 1e-10
    if np.any(h[trivial] < -1e-8):
        raise SdpInfeasible("an inequality reduces to a negative constant")
    G, h = G[~trivial] / norms[~trivial, None], h[~trivial] / norms[~trivial]
    keys = np.round(G * _KEY_SCALE)
    best = {}
    for i, key in enumerate(map(bytes, keys.astype(np.int64))):
        if key not in best or h[i] < h[best[key]]:
            best[key] = i
    idx = np.array(sorted(best.values()), dtype=int)
    return G[idx], h[idx], keys[idx]


def _opposite_pairs(G, h, keys):
    """Rows ``g u + h >= 0`` and ``-g u - h' >= 0`` with ``h + h' = 0`` pin ``g u = -h``."""
    index = {bytes(k.astype(np.int64)): i for i, k in enumerate(keys)}
    eq_rows = []
    for i, k in enumerate(keys):
        j = index.get(bytes((-k).astype(np.int64)))
        if j is None or j <= i:
            continue
        slack = h[i] + h[j]
        if slack < -1e-7:
            raise SdpInfeasible("opposite inequalities leave an empty slab")
        if slack <= _PAIR_TOL:
            eq_rows.append(i)
    return eq_rows


def _implicit_rows(G, h):
    """Rows of ``G u + h >= 0`` that hold with equality on the whole feasible set.

    Row ``i`` is implicit exactly when some ``lam >= 0`` with ``lam_i > 0``
    satisfies ``G' lam = 0`` and ``h' lam = 0``. The interior-point path ends at
    the analytic centre of the optimal face of ``min lam_0`` over
    ``{G' lam = 0, h' lam = 0, sum(lam) + lam_0 = 1, lam >= 0}``, whose
    support is the largest such certificate.
    """
    p, K = G.shape
    if p == 0:
        return []
    Al = np.zeros((K + 2, p + 1))
    Al[:K, :p] = G.T
    Al[K, :p] = h
    Al[K + 1, :] = 1.0
    b = np.zeros(K + 2)
    b[K + 1] = 1.0
    Cl = np.zeros(p + 1)
    Cl[p] = 1.0
    _, _, lam, _, _, _ = _ipm(np.zeros((0, 0)), Cl, np.zeros((K + 2, 0, 0)), Al, b, 1e-12, 80)
    lam = lam[:p]
    top = lam.max()
    if top < 1e-8:
        return []
    return [int(i) for i in np.flatnonzero(lam > 1e-4 * top)]


@dataclass
class _Reduced:
    s_base: np.ndarray
    T: np.ndarray
    Q: np.ndarray
    G: np.ndarray
    h: np.ndarray


def _common_kernel_complement(sv, s_base, T):
    # vectors annihilated by every matrix of the affine family lie in the kernel
    # of all feasible X, so they can be projected out of the PSD block
    m = sv.m
    mats = sv.mat(np.column_stack([s_base, T]).T)
    kernel = _nullspace(mats.reshape(-1, m), 1e-9)
    return _nullspace(kernel.T, 1e-9) if kernel.shape[1] else np.eye(m)


def _reduce(prob: SdpProblem, sv: _Svec, max_rounds: int = 50) -> _Reduced:
    m = prob.m
    D = m * (m + 1) // 2
    Aeq = sv.vec(prob.eq_A)
    s_base = _affine_solve(Aeq, prob.eq_b, "equality constraints") if len(Aeq) else np.zeros(D)
    T = _nullspace(Aeq) if len(Aeq) else np.eye(D)
    Bsv = sv.vec(prob.ineq_B)
    rounds = 0
    while True:
        G = Bsv @ T
        h = Bsv @ s_base - prob.ineq_c
        if G.shape[0]:
            G, h, keys = _normalized_rows(G, h)
        else:
            G, h, keys = np.zeros((0, T.shape[1])), np.zeros(0), np.zeros((0, T.shape[1]))
        Q = _common_kernel_complement(sv, s_base, T)
        if T.shape[1] == 0 or rounds >= max_rounds:
            break
        rounds += 1
        rows = _opposite_pairs(G, h, keys) or _implicit_rows(G, h)
        if not rows:
            break
        E, e = G[rows], -h[rows]
        u0 = _affine_solve(E, e, "implicit equalities")
        s_base = s_base + T @ u0
        T = T @ _nullspace(E)
    return _Reduced(s_base, T, Q, G, h)


# -- interior point core -------------------------------------------------------------

def _psd_step(X, dX):
    if X.size == 0:
        return np.inf
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(Li @ dX @ Li.T)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _lp_step(x, dx):
    neg = dx < 0
    return np.min(-x[neg] / dx[neg]) if np.any(neg) else np.inf


def _sym(A):
    return 0.5 * (A + A.T)


def _solve_spd(M, r):
    # symmetric diagonal scaling first: the orthant block spreads M's diagonal
    # over many orders of magnitude near the optimum
    d = np.sqrt(np.maximum(np.diag(M), 1e-300))
    Ms = M / np.outer(d, d)
    rs = r / d
    try:
        L = np.linalg.cholesky(Ms)
        x = np.linalg.solve(L.T, np.linalg.solve(L, rs))
        # one round of iterative refinement
        x = x + np.linalg.solve(L.T, np.linalg.solve(L, rs - Ms @ x))
    except np.linalg.LinAlgError:
        x = np.linalg.lstsq(Ms, rs, rcond=None)[0]
    return x / d


def _ipm(Cs, Cl, As, Al, b, tol, max_iter):
    """Standard form ``min <C, X>`` s.t. ``A(X) = b``, X in PSD x orthant, with its dual.

    Returns ``(y, X, x, iterations, converged, stats)``.
    """
    m, p, K = Cs.shape[0], len(Cl), len(b)
    As_vec = As.reshape(K, m * m)
    nb, nc = np.linalg.norm(b), np.sqrt(np.sum(Cs * Cs) + Cl @ Cl)

    normA_s = np.linalg.norm(As_vec, axis=1)
    normA_l = np.linalg.norm(Al, axis=1) if p else np.zeros(K)
    xi = max(10.0, np.sqrt(m), m * np.max((1 + np.abs(b)) / (1 + normA_s)))
    eta = max(10.0, np.sqrt(m), np.max(normA_s), np.linalg.norm(Cs))
    X, S = xi * np.eye(m), eta * np.eye(m)
    if p:
        xi_l = max(1.0, np.max((1 + np.abs(b)) / (1 + normA_l)))
        eta_l = max(1.0, np.max(normA_l), np.linalg.norm(Cl))
        x, s = np.full(p, xi_l), np.full(p, eta_l)
    else:
        x, s = np.zeros(0), np.zeros(0)
    y = np.zeros(K)
    nu = m + p
    stats = {}
    best = None

    for it in range(max_iter + 1):
        rp = b - As_vec @ X.ravel() - Al @ x
        Rs = Cs - S - (As_vec.T @ y).reshape(m, m)
        rl = Cl - s - Al.T @ y
        pobj = float(np.sum(Cs * X) + Cl @ x)
        dobj = float(b @ y)
        comp = float(np.sum(X * S) + x @ s)
        mu = comp / nu
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        pinf = np.linalg.norm(rp) / (1 + nb)
        dinf = np.sqrt(np.sum(Rs * Rs) + rl @ rl) / (1 + nc)
        stats = {"pobj": pobj, "dobj": dobj, "relgap": relgap, "pinf": pinf, "dinf": dinf,
                 "comp": comp / (1 + abs(pobj) + abs(dobj))}
        score = max(relgap, stats["comp"], pinf, dinf)
        if best is None or score < best[0]:
            best = (score, y.copy(), X.copy(), x.copy(), it, dict(stats))
        if score < tol:
            return y, X, x, it, True, stats
        if it == max_iter or (it - best[4] >= 5 and best[0] < ACCEPT_TOL):
            break
        if not np.all(np.isfinite([pobj, dobj])) or max(abs(pobj), abs(dobj)) > 1e12:
            raise SdpInfeasible("iterates diverged; the problem looks infeasible or unbounded")

        try:
            with np.errstate(over="raise", divide="raise", invalid="raise"):
                X, x, y, S, s = _ipm_step(Cs, Cl, As_vec, Al, b, X, x, y, S, s, Rs, rl, mu, nu)
        except (np.linalg.LinAlgError, FloatingPointError):
            # the iterates are too close to the boundary to continue; keep the best one
            break

    score, y, X, x, it, stats = best
    return y, X, x, it, score < ACCEPT_TOL, stats


def _ipm_step(Cs, Cl, As_vec, Al, b, X, x, y, S, s, Rs, rl, mu, nu):
    """One Mehrotra predictor-corrector step with the HKM direction."""
    m, p = Cs.shape[0], len(Cl)
    Sinv = _sym(np.linalg.inv(S)) if m else S
    M = As_vec @ np.kron(X, Sinv) @ As_vec.T
    if p:
        M += (Al * (x / s)) @ Al.T
    M = _sym(M)
    XRS = X @ Rs @ Sinv
    base = b + As_vec @ XRS.ravel() + (Al @ (x * rl / s) if p else 0.0)
    AsSinv = As_vec @ Sinv.ravel() + (Al @ (1.0 / s) if p else 0.0)

    def direction(sigma, corr_s, corr_l):
        rhs = base - sigma * mu * AsSinv
        if corr_s is not None:
            rhs = rhs + As_vec @ corr_s.ravel() + (Al @ corr_l if p else 0.0)
        dy = _solve_spd(M, rhs)
        dS = Rs - (As_vec.T @ dy).reshape(m, m)
        ds = rl - Al.T @ dy
        dX = -X + sigma * mu * Sinv - X @ dS @ Sinv
        dx = -x + sigma * mu / s - x * ds / s if p else np.zeros(0)
        if corr_s is not None:
            dX = dX - corr_s
            dx = dx - corr_l
        return dy, _sym(dX), _sym(dS), dx, ds

    dy, dX, dS, dx, ds = direction(0.0, None, None)
    ap = min(1.0, _psd_step(X, dX), _lp_step(x, dx))
    ad = min(1.0, _psd_step(S, dS), _lp_step(s, ds))
    mu_aff = (np.sum((X + ap * dX) * (S + ad * dS)) + (x + ap * dx) @ (s + ad * ds)) / nu
    sigma = min(1.0, max(0.0, mu_aff / mu) ** 3)
    corr_s = dX @ dS @ Sinv
    corr_l = dx * ds / s if p else np.zeros(0)
    dy, dX, dS, dx, ds = direction(sigma, corr_s, corr_l)

    ap = _psd_step(X, dX)
    ap = min(ap, _lp_step(x, dx))
    ad = min(_psd_step(S, dS), _lp_step(s, ds))
    tau = 0.9 + 0.09 * min(1.0, ap, ad)
    ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
    X = _sym(X + ap * dX)
    S = _sym(S + ad * dS)
    new = (X, x + ap * dx, y + ad * dy, S, s + ad * ds)
    if not all(np.all(np.isfinite(v)) for v in new):
        raise FloatingPointError("non-finite step")
    return new


# -- public entry point ---------------------------------------------------------------

def sdp_solve(prob: SdpProblem, tol: float = GAP_TOL, max_iter: int = MAX_ITER, strict: bool = True) -> SdpResult:
    """Solve ``prob``; raise ``SdpNotConverged`` (carrying the best iterate) if ``strict``."""
    m = prob.m
    if m > MAX_BLOCK:
        raise ValueError(f"PSD block of size {m} exceeds the limit {MAX_BLOCK}")
    sv = _Svec(m)
    red = _reduce(prob, sv)
    Q, T, s_base = red.Q, red.T, red.s_base
    K = T.shape[1]
    cvec = sv.vec(prob.C)
    c0 = float(cvec @ s_base)
    f = T.T @ cvec

    F0 = Q.T @ sv.mat(s_base) @ Q
    Fk = Q.T @ sv.mat(T.T) @ Q if K else np.zeros((0,) + F0.shape)
    info = {"variables": K, "block": Q.shape[1], "inequalities": len(red.h)}

    if K == 0:
        X = sv.mat(s_base)
        value = float(np.sum(prob.C * X))
        res = SdpResult("optimal", value, value, X, 0, 0.0, reduced=info)
        res.residuals = _residuals(prob, X, sv)
        if res.residuals["psd_min_eig"] < -1e-8 or res.residuals["ineq"] > 1e-7:
            raise SdpInfeasible("the constraints admit a single point that is not feasible")
        return res

    # Elastic form: maximise f u - R t subject to F(u) + t I >= 0, G u + h + t >= 0,
    # t >= 0. It always has a strictly feasible point and bounds the dual by
    # tr Z + sum z <= R; once R exceeds the size of an optimal dual, t = 0 and
    # the optimum is unchanged.
    mr, p = F0.shape[0], len(red.h)
    F_el = np.concatenate([Fk, np.eye(mr)[None]])
    G_el = np.zeros((p + 1, K + 1))
    G_el[:p, :K] = red.G
    G_el[:p, K] = 1.0
    G_el[p, K] = 1.0
    h_el = np.concatenate([red.h, [0.0]])
    R = PENALTY * (1.0 + np.max(np.abs(f)))
    total_it = 0
    diverged = None
    for _ in range(PENALTY_ROUNDS):
        f_el = np.concatenate([f, [-R]])
        try:
            y, Z, z, it, ok, stats = _ipm(F0, h_el, -F_el, -G_el.T, f_el, tol, max_iter)
        except SdpInfeasible as exc:
            # an unbounded elastic problem means the penalty is below the dual size
            diverged = exc
            R *= 100.0
            continue
        diverged = None
        total_it += it
        elastic = float(y[K])
        if elastic <= ELASTIC_TOL:
            break
        R *= 100.0
    else:
        if diverged is not None:
            raise diverged
        ok = False
    u = y[:K]
    X = sv.mat(s_base + T @ u)
    value = float(np.sum(prob.C * X))
    dual_value = c0 + float(np.sum(F0 * Z) + h_el @ z)
    info["penalty"] = R
    info["elastic"] = elastic
    res = SdpResult(
        "optimal" if ok else "max_iter",
        value,
        dual_value,
        X,
        total_it,
        abs(dual_value - value),
        reduced=info,
    )
    res.residuals = _residuals(prob, X, sv)
    res.residuals["dual_infeasibility"] = stats["pinf"]
    res.residuals["primal_infeasibility"] = stats["dinf"]
    if not ok and strict:
        raise SdpNotConverged(f"no convergence in {max_iter} iterations (gap {res.gap:.2e})", res)
    return res


def _residuals(prob: SdpProblem, X, sv) -> dict:
    eq = np.einsum("kij,ij->k", prob.eq_A, X) - prob.eq_b
    ineq = prob.ineq_c - np.einsum("kij,ij->k", prob.ineq_B, X)
    return {
        "eq": float(np.max(np.abs(eq))) if eq.size else 0.0,
        "ineq": float(max(0.0, np.max(ineq))) if ineq.size else 0.0,
        "psd_min_eig": float(np.linalg.eigvalsh(X)[0]),
    }
