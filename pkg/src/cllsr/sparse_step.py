"""View update: nonnegative, k1-sparse, zero-diagonal self-representation.

Column i of a view matrix solves

    min_x  1/2 ||A x - b||^2 + lam ||x||^2 + sigma/2 ||x - c||^2
    s.t.   ||x||_0 <= k1,  x >= 0

with ``A`` the view without column i, ``b`` column i of the view and ``c``
column i of the consensus matrix with entry i removed.  The problem is solved
by a nonmonotone projected gradient method whose projection onto the sparse
nonnegative set has a closed form (keep the k1 largest entries, clamp at 0).

`npg_run` is the plain single-column method.  `update_view_matrix` runs the
same iteration on all n columns of a view at once, each column keeping its
own step constant, backtracking state and stopping flag.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from .errors import BacktrackExhausted

MAX_BACKTRACK_POWER = 50


@dataclass(frozen=True)
class NpgParams:
    L_min: float = 1e-10
    L_max: float = 1e10
    tau: float = 3.0
    c_desc: float = 1e-6
    M: int = 5
    max_iters: int = 200
    tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.L_min < self.L_max:
            raise ValueError("need 0 < L_min < L_max")
        if not self.tau > 1:
            raise ValueError("tau must exceed 1")
        if not self.c_desc > 0:
            raise ValueError("c_desc must be positive")
        if self.M < 0 or self.max_iters < 1 or not self.tol >= 0:
            raise ValueError("need M >= 0, max_iters >= 1, tol >= 0")

    @property
    def L_cap(self) -> float:
        return self.L_max * self.tau ** MAX_BACKTRACK_POWER


@dataclass(frozen=True)
class ColumnProblem:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lam: float
    sigma: float

    def __post_init__(self):
        m, p = np.shape(self.A)
        if np.shape(self.b) != (m,) or np.shape(self.c) != (p,):
            raise ValueError("inconsistent column problem dimensions")
        if not (self.lam > 0 and self.sigma > 0):
            raise ValueError("lam and sigma must be positive")

    @classmethod
    def from_view(cls, X, C_star, i, lam, sigma):
        """Column `i` subproblem of view `X` against consensus `C_star`."""
        X = np.asarray(X, dtype=np.float64)
        return cls(np.delete(X, i, axis=1), X[:, i].copy(),
                   np.delete(np.asarray(C_star, dtype=np.float64)[:, i], i), lam, sigma)


def column_value_grad(p: ColumnProblem, x):
    r = p.A @ x - p.b
    d = x - p.c
    value = 0.5 * (r @ r) + p.lam * (x @ x) + 0.5 * p.sigma * (d @ d)
    grad = p.A.T @ r + 2.0 * p.lam * x + p.sigma * d
    return float(value), grad


def project_nonneg_ksparse(z, k1: int) -> np.ndarray:
    """Euclidean projection onto {y : ||y||_0 <= k1, y >= 0}.

    Keeps the `k1` largest entries of `z` (lowest index first among ties),
    clamped at zero; every other entry is zero.
    """
    z = np.asarray(z, dtype=np.float64)
    if not 1 <= k1 <= z.size:
        raise ValueError(f"k1 must lie in [1, {z.size}], got {k1}")
    keep = np.argsort(-z, kind="stable")[:k1]
    y = np.zeros_like(z)
    y[keep] = np.maximum(z[keep], 0.0)
    return y


def bb_initial_step(s, g_diff, L_min: float, L_max: float) -> float:
    """Barzilai-Borwein curvature estimate <s, g_diff> / <s, s>, clamped."""
    ss = float(np.dot(s, s))
    if ss == 0.0:
        return L_min
    ratio = float(np.dot(s, g_diff)) / ss
    if not np.isfinite(ratio):
        return L_min
    return min(L_max, max(L_min, ratio))


def _first_step(lam, sigma, params):
    # strong-convexity modulus: a lower bound on the curvature, so backtracking
    # only ever has to grow it
    return min(params.L_max, max(params.L_min, 2.0 * lam + sigma))


class NpgStep(NamedTuple):
    value: float
    reference: float
    step_sq: float
    L: float


@dataclass
class NpgResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    steps: List[NpgStep] = field(default_factory=list)


def _is_feasible(y, k1):
    return bool(np.all(y >= 0) and np.count_nonzero(y) <= k1)


def npg_run(p: ColumnProblem, y0, k1: int, params: NpgParams = NpgParams()) -> NpgResult:
    """Nonmonotone projected gradient on one column, with a full step log."""
    y = np.array(y0, dtype=np.float64)
    if not _is_feasible(y, k1):
        raise ValueError("starting point must be nonnegative with at most k1 nonzeros")
    f, g = column_value_grad(p, y)
    history = deque([f], maxlen=params.M + 1)
    y_old = g_old = None
    steps = []
    converged = False
    it = 0
    while it < params.max_iters:
        it += 1
        if y_old is None:
            L = _first_step(p.lam, p.sigma, params)
        else:
            L = bb_initial_step(y - y_old, g - g_old, params.L_min, params.L_max)
        ref = max(history)
        while True:
            y_new = project_nonneg_ksparse(y - g / L, k1)
            f_new, g_new = column_value_grad(p, y_new)
            step_sq = float(np.sum((y_new - y) ** 2))
            if step_sq == 0.0 or f_new <= ref - 0.5 * params.c_desc * step_sq:
                f_new = f if step_sq == 0.0 else f_new
                break
            L *= params.tau
            if L > params.L_cap:
                raise BacktrackExhausted(f"no acceptable step up to L={L:.3g}")
        steps.append(NpgStep(f_new, ref, step_sq, L))
        y_old, g_old = y, g
        y, f, g = y_new, f_new, g_new
        history.append(f)
        if np.sqrt(step_sq) <= params.tol * (1.0 + np.linalg.norm(y_old)):
            converged = True
            break
    return NpgResult(y, f, it, converged, steps)


def npg_solve(p: ColumnProblem, y0, k1: int, params: NpgParams = NpgParams()) -> np.ndarray:
    return npg_run(p, y0, k1, params).x


def _topk_mask(Z, k):
    """Row-wise mask of the k largest entries, lowest column index first among ties."""
    kth = -np.partition(-Z, k - 1, axis=1)[:, k - 1:k]
    above = Z > kth
    tied = Z == kth
    need = k - above.sum(axis=1, keepdims=True)
    if np.all(tied.sum(axis=1, keepdims=True) <= need):
        return above | tied
    return above | (tied & (np.cumsum(tied, axis=1) <= need))


def project_columns(Z, k1: int) -> np.ndarray:
    """Project every column of a square matrix onto the feasible set of a view
    matrix: zero diagonal, nonnegative, at most `k1` nonzeros per column."""
    Zt = np.array(Z, dtype=np.float64).T.copy()
    n = Zt.shape[0]
    if not 1 <= k1 <= n - 1:
        raise ValueError(f"k1 must lie in [1, {n - 1}], got {k1}")
    np.fill_diagonal(Zt, -np.inf)
    return _project_rows(Zt, k1).T.copy()


def _project_rows(Zt, k1):
    mask = _topk_mask(Zt, k1)
    return np.where(mask, np.maximum(Zt, 0.0), 0.0)


def _rowdot(A, B):
    return np.einsum("ij,ij->i", A, B)


@dataclass
class ViewUpdateInfo:
    iterations: np.ndarray
    converged: np.ndarray
    backtracks: int = 0


def update_view_matrix(X, C_prev, C_star, lam: float, sigma: float, k1: int,
                       params: NpgParams = NpgParams(), return_info: bool = False):
    """Solve every column subproblem of one view, warm-started from `C_prev`.

    Column i is handled in full length n with its i-th entry pinned at zero,
    which is the same problem as deleting that entry: ``X @ y`` never sees
    it and the projection never selects it.  Internally the columns are
    stored as rows so that gathering the still-active problems is cheap.

    Returns
    -------
    C_new : ndarray, shape (n, n)
    info : ViewUpdateInfo
        Only when `return_info` is true.
    """
    X = np.asarray(X, dtype=np.float64)
    C_star = np.asarray(C_star, dtype=np.float64)
    n = X.shape[1]
    if np.shape(C_prev) != (n, n) or C_star.shape != (n, n):
        raise ValueError("C_prev and C_star must be n x n with n the sample count")
    Xt = np.ascontiguousarray(X.T)
    Ct = np.ascontiguousarray(C_star.T)

    def value_grad(Yr, rows):
        R = Yr @ Xt - Xt[rows]
        D = Yr - Ct[rows]
        f = 0.5 * _rowdot(R, R) + lam * _rowdot(Yr, Yr) + 0.5 * sigma * _rowdot(D, D)
        return f, R @ X + 2.0 * lam * Yr + sigma * D

    def project(Zr, rows):
        Zr[np.arange(rows.size), rows] = -np.inf
        return _project_rows(Zr, k1)

    Y = project_columns(C_prev, k1).T.copy()
    everyone = np.arange(n)
    F, G = value_grad(Y, everyone)
    hist = np.full((n, params.M + 1), -np.inf)
    hist[:, 0] = F
    Y_old = np.empty_like(Y)
    G_old = np.empty_like(G)
    L = np.full(n, _first_step(lam, sigma, params))
    active = np.ones(n, dtype=bool)
    iters = np.zeros(n, dtype=np.int64)
    backtracks = 0

    for it in range(1, params.max_iters + 1):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        Yc, Gc = Y[rows], G[rows]
        if it > 1:
            S = Yc - Y_old[rows]
            ss = _rowdot(S, S)
            sg = _rowdot(S, Gc - G_old[rows])
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = sg / ss
            ratio = np.where((ss > 0) & np.isfinite(ratio), ratio, params.L_min)
            L[rows] = np.clip(ratio, params.L_min, params.L_max)
        ref = hist[rows].max(axis=1)
        Y_new = np.empty_like(Yc)
        G_new = np.empty_like(Gc)
        F_new = np.empty(rows.size)
        step_sq = np.empty(rows.size)
        pending = np.arange(rows.size)
        while pending.size:
            pr = rows[pending]
            cand = project(Yc[pending] - Gc[pending] / L[pr, None], pr)
            f_c, g_c = value_grad(cand, pr)
            diff = cand - Yc[pending]
            d_c = _rowdot(diff, diff)
            # a null step is stationarity; its recomputed value may differ in
            # the last bit because BLAS rounding depends on the batch shape
            still = d_c == 0.0
            f_c[still] = F[pr[still]]
            ok = still | (f_c <= ref[pending] - 0.5 * params.c_desc * d_c)
            acc = pending[ok]
            Y_new[acc] = cand[ok]
            G_new[acc] = g_c[ok]
            F_new[acc] = f_c[ok]
            step_sq[acc] = d_c[ok]
            pending = pending[~ok]
            if pending.size:
                backtracks += pending.size
                L[rows[pending]] *= params.tau
                if np.any(L[rows[pending]] > params.L_cap):
                    raise BacktrackExhausted("no acceptable step within the step-constant cap")
        Y_old[rows], G_old[rows] = Yc, Gc
        Y[rows], G[rows], F[rows] = Y_new, G_new, F_new
        hist[rows, it % (params.M + 1)] = F_new
        iters[rows] = it
        done = np.sqrt(step_sq) <= params.tol * (1.0 + np.sqrt(_rowdot(Yc, Yc)))
        active[rows[done]] = False

    C_new = Y.T.copy()
    if return_info:
        return C_new, ViewUpdateInfo(iters, ~active, backtracks)
    return C_new
