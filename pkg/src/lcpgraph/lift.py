"""Lovász–Schrijver N+ lift of a polytope inside the unit cube.

Every row ``r(x) = a @ x - b >= 0`` of ``P`` (box rows included) is
multiplied by ``x_i`` and by ``1 - x_i``; the quadratic terms are linearised
with ``x_i^2 -> x_i`` and ``x_i x_j -> w_ij``. Lifted variables are ordered
``y = (x_1..x_n, w_12, w_13, ..., w_{n-1,n})`` with ``w`` in upper-triangle
row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .lp import HPolytope
from .sdp import SdpProblem, SdpResult, sdp_solve

_KEY_DIGITS = 9


class LiftError(ValueError):
    pass


def _pair_index(n: int) -> np.ndarray:
    """``idx[i, j]`` is the position of ``w_ij`` among the pair variables (-1 on the diagonal)."""
    idx = -np.ones((n, n), dtype=int)
    iu = np.triu_indices(n, 1)
    idx[iu] = np.arange(len(iu[0]))
    idx[iu[1], iu[0]] = idx[iu]
    return idx


@dataclass(frozen=True)
class LinearizedPolytope:
    """Rows ``G @ y + h >= 0`` over ``y = (x, w)``; ``origins[k] = (i, factor, row)``.

    ``factor`` is ``"x"`` or ``"1-x"`` and names the multiplier ``x_i`` or
    ``1 - x_i`` applied to source row ``row`` (box rows follow the ``F`` rows:
    first ``x_j >= 0`` then ``u_j - x_j >= 0``). With ``diag_link`` the
    constraint ``diag(W) = x`` is part of the set.
    """

    n: int
    G: np.ndarray
    h: np.ndarray
    origins: tuple = ()
    diag_link: bool = True

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def num_constraints(self) -> int:
        return len(self.h)

    def lifted_vector(self, x, W) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        W = np.asarray(W, dtype=float)
        return np.concatenate([x, W[np.triu_indices(self.n, 1)]])

    def slacks(self, x, W) -> np.ndarray:
        return self.G @ self.lifted_vector(x, W) + self.h

    def contains(self, x, W, tol: float = 1e-9) -> bool:
        x, W = np.asarray(x, dtype=float), np.asarray(W, dtype=float)
        if self.diag_link and np.max(np.abs(np.diag(W) - x), initial=0.0) > tol:
            return False
        L = moment_matrix(x, W)
        return bool(np.all(self.slacks(x, W) >= -tol) and np.linalg.eigvalsh(L)[0] >= -tol)

    def row_keys(self) -> set:
        """Scale-free fingerprints of the rows, for comparing constraint sets."""
        return {_row_key(g, c) for g, c in zip(self.G, self.h)}


def moment_matrix(x, W) -> np.ndarray:
    """``L(x, W) = [[1, x'], [x, W]]``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    L = np.empty((n + 1, n + 1))
    L[0, 0] = 1.0
    L[0, 1:] = L[1:, 0] = x
    L[1:, 1:] = W
    return L


def _row_key(g, c):
    v = np.concatenate([g, [c]])
    return tuple(np.round(v / np.linalg.norm(v), _KEY_DIGITS) + 0.0)


def _dedup(G, h, origins):
    norms = np.abs(G).sum(axis=1)
    keep_nontrivial = norms > 1e-12
    # rows that linearise to a constant: 0 >= 0 (or c >= 0) carry no information
    bad = (~keep_nontrivial) & (h < -1e-12)
    if np.any(bad):
        raise LiftError("a lifted row reduces to a negative constant; the polytope is empty")
    seen, keep = set(), []
    for k in np.flatnonzero(keep_nontrivial):
        key = _row_key(G[k], h[k])
        if key not in seen:
            seen.add(key)
            keep.append(k)
    keep = np.array(keep, dtype=int)
    return G[keep], h[keep], tuple(origins[k] for k in keep)


def linearize_products(n: int, quad: np.ndarray, lin: np.ndarray, const: np.ndarray):
    """Linearise ``x' Q x + l' x + c`` row-wise; ``quad`` has shape (rows, n, n)."""
    iu = np.triu_indices(n, 1)
    Gx = lin + np.einsum("kii->ki", quad)
    Gw = quad[:, iu[0], iu[1]] + quad[:, iu[1], iu[0]]
    return np.hstack([Gx, Gw]), np.asarray(const, dtype=float).copy()


def ls_lift(p: HPolytope) -> LinearizedPolytope:
    """Lift every row of ``p`` (and its box) by ``x_i`` and ``1 - x_i``, then linearise."""
    n = p.dim
    if not p.bounded:
        raise LiftError("the lift needs finite box bounds 0 <= x <= u")
    if np.any(p.u > 1.0 + 1e-12) or np.any(p.u < 0):
        raise LiftError("the lift is defined for polytopes inside the unit cube")
    # source rows a @ x + a0 >= 0
    A = np.vstack([p.F, np.eye(n), -np.eye(n)])
    a0 = np.concatenate([-p.b, np.zeros(n), p.u])
    r = len(a0)
    idx = _pair_index(n)
    nw = n * (n - 1) // 2
    blocks_G, blocks_h, origins = [], [], []
    for i in range(n):
        Gx = np.zeros((r, n))
        Gx[:, i] = A[:, i] + a0
        Gw = np.zeros((r, nw))
        others = [j for j in range(n) if j != i]
        Gw[:, idx[i, others]] = A[:, others]
        times_x = np.hstack([Gx, Gw])
        times_comp = np.hstack([A - Gx, -Gw])
        blocks_G += [times_x, times_comp]
        blocks_h += [np.zeros(r), a0]
        origins += [(i, "x", k) for k in range(r)] + [(i, "1-x", k) for k in range(r)]
    G, h, origins = _dedup(np.vstack(blocks_G), np.concatenate(blocks_h), origins)
    return LinearizedPolytope(n, G, h, origins, True)


# -- SDP over the lifted set -------------------------------------------------------------

def lifted_sdp(lp: LinearizedPolytope, c=None) -> SdpProblem:
    """``max c @ x`` over ``{(x, W) in lp, diag(W) = x, L(x, W) PSD}`` as an ``SdpProblem``."""
    n = lp.n
    m = n + 1
    c = np.ones(n) if c is None else np.asarray(c, dtype=float)
    C = np.zeros((m, m))
    C[0, 1:] = C[1:, 0] = c / 2.0

    eq_A, eq_b = [], []
    E = np.zeros((m, m))
    E[0, 0] = 1.0
    eq_A.append(E)
    eq_b.append(1.0)
    if lp.diag_link:
        for i in range(1, m):
            E = np.zeros((m, m))
            E[i, i] = 1.0
            E[0, i] = E[i, 0] = -0.5
            eq_A.append(E)
            eq_b.append(0.0)

    iu = np.triu_indices(n, 1)
    B = np.zeros((lp.num_constraints, m, m))
    B[:, 0, 1:] = B[:, 1:, 0] = lp.G[:, :n] / 2.0
    half = lp.G[:, n:] / 2.0
    B[:, iu[0] + 1, iu[1] + 1] = half
    B[:, iu[1] + 1, iu[0] + 1] = half
    return SdpProblem(C, np.array(eq_A), np.array(eq_b), B, -lp.h)


@dataclass
class LiftedOptimum:
    value: float
    x: np.ndarray
    W: np.ndarray
    result: SdpResult


def max_l1_over_lifted(lp: LinearizedPolytope, c=None, **solver_opts) -> LiftedOptimum:
    """Maximise ``e @ x`` (or ``c @ x``) over the N+ set of ``lp``."""
    res = sdp_solve(lifted_sdp(lp, c), **solver_opts)
    X = res.X
    return LiftedOptimum(res.value, X[0, 1:].copy(), X[1:, 1:].copy(), res)


# -- the P* families written out row by row ------------------------------------------------

PSTAR_READINGS = ("maxis", "product", "printed")


def pstar_transcription(g: Graph, reading: str = "maxis") -> LinearizedPolytope:
    """The seven P* families over all ordered pairs (i, j), written directly in (x, W).

    ``reading`` selects the last two families:

    * ``"maxis"``: lift of the MAXIS upper row ``(d_j - 1)(1 - x_j) - C_j(x) + 1``,
      giving ``d_j (x_i - w_ij) - sum_k a_jk w_ik`` and
      ``d_j (1 + w_ij - x_i - x_j) + sum_k a_jk (w_ik - x_k)``;
    * ``"product"``: lift of ``d_j (1 - x_j) - C_j(x) + 1`` with factor ``d_j + 1``;
    * ``"printed"``: as ``"product"`` but summing ``a_ik`` in place of ``a_jk``.
    """
    if reading not in PSTAR_READINGS:
        raise ValueError(f"reading must be one of {PSTAR_READINGS}")
    n = g.n
    A = g.adjacency.astype(float)
    d = g.degrees.astype(float)
    rows_q, rows_l, rows_c, origins = [], [], [], []

    def add(q, l, c, tag):
        rows_q.append(q)
        rows_l.append(l)
        rows_c.append(c)
        origins.append(tag)

    for i in range(n):
        for j in range(n):
            Eij = np.zeros((n, n))
            Eij[i, j] = 1.0
            ei, ej = np.eye(n)[i], np.eye(n)[j]
            add(Eij, np.zeros(n), 0.0, (i, j, "w>=0"))
            add(-Eij, ei, 0.0, (i, j, "x_i>=w"))
            add(Eij, -ei - ej, 1.0, (i, j, "w+1>=x_i+x_j"))
            # x_i (C_j(x) - 1) >= 0 and (1 - x_i)(C_j(x) - 1) >= 0
            Qc = np.zeros((n, n))
            Qc[i, j] += 1.0
            Qc[i, :] += A[j]
            add(Qc, -ei, 0.0, (i, j, "x*closed"))
            add(-Qc, ej + A[j] + ei, -1.0, (i, j, "(1-x)*closed"))
            nbr = A[i] if reading == "printed" else A[j]
            f = d[j] if reading == "maxis" else d[j] + 1.0
            Qd = np.zeros((n, n))
            Qd[i, j] -= f
            Qd[i, :] -= nbr
            add(Qd, f * ei, 0.0, (i, j, "x*degree"))
            add(-Qd, -f * ei - f * ej - nbr, f, (i, j, "(1-x)*degree"))
    G, h = linearize_products(n, np.array(rows_q), np.array(rows_l), np.array(rows_c))
    G, h, origins = _dedup(G, h, origins)
    return LinearizedPolytope(n, G, h, origins, True)


def degree_bound_polytope(g: Graph) -> HPolytope:
    """``{0 <= x <= e : 0 <= (A+I)x - e <= D(e - x)}``, a looser cousin of MAXIS(G)."""
    A, d = g.adjacency.astype(float), g.degrees.astype(float)
    n = g.n
    F = np.vstack([A + np.eye(n), -(A + np.diag(d) + np.eye(n))])
    b = np.concatenate([np.ones(n), -d - 1.0])
    return HPolytope(F, b, np.ones(n), "degree-bound")
