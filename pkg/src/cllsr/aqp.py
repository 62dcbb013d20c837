"""Alternating quadratic penalty solver.

The coupling constraints C^v = C* are replaced by the penalty
(sigma/2) ||C^v - C*||_F^2.  For each sigma in the geometric schedule
sigma0, rho*sigma0, ... block coordinate descent alternates

* a view update (every column of every C^v, see `sparse_step`), and
* a consensus update (truncated SVD of the view mean, see `consensus_step`)

until the relative change of all blocks drops below ``eps_inner``.  The
schedule stops once every view is within ``eps_outer`` of the consensus.
"""
import logging
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .consensus_step import average_views, truncated_rank_projection
from .data import MultiviewDataset
from .errors import NumericalFailure
from .initialization import InitConfig, init_consensus, knn_affinity
from .numerics import frobenius_norm
from .sparse_step import NpgParams, project_columns, update_view_matrix

logger = logging.getLogger(__name__)

DESCENT_SLACK = 1e-8


class MaxItersReached(RuntimeWarning):
    """The outer schedule ended before the views met the consensus."""


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the solver.

    ``k2=None`` means ``k2_per_cluster * n_clusters``, resolved when solving.
    """

    lam: float = 100.0
    sigma0: float = 1.0
    rho: float = 10.0
    eps_inner: float = 1e-4
    eps_outer: float = 1e-2
    k1: int = 20
    k2: Optional[int] = None
    k2_per_cluster: int = 20
    max_outer: int = 12
    max_inner: int = 50
    npg: NpgParams = field(default_factory=NpgParams)
    init: InitConfig = field(default_factory=InitConfig)
    seed: int = 0
    check_descent: bool = True

    def __post_init__(self):
        if not (self.lam > 0 and self.sigma0 > 0 and self.rho > 1):
            raise ValueError("need lam > 0, sigma0 > 0, rho > 1")
        if not (self.eps_inner > 0 and self.eps_outer > 0):
            raise ValueError("tolerances must be positive")
        if self.k1 < 1 or (self.k2 is not None and self.k2 < 1):
            raise ValueError("k1 and k2 must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be positive")

    def resolve_k2(self, n_clusters: Optional[int]) -> int:
        if self.k2 is not None:
            return self.k2
        if n_clusters is None:
            raise ValueError("k2 is unset and the number of clusters is unknown")
        return self.k2_per_cluster * n_clusters

    def with_updates(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs)


@dataclass
class AffinityState:
    views: List[np.ndarray]
    consensus: np.ndarray

    def copy(self) -> "AffinityState":
        return AffinityState([C.copy() for C in self.views], self.consensus.copy())


class TraceRecord(NamedTuple):
    k: int
    l: int
    sigma: float
    q: float
    gap: float
    millis: float


TRACE_HEADER = "k,l,sigma,q,gap,millis"


@dataclass
class ConvergenceTrace:
    """Penalty objective and view/consensus gap after every sweep.

    Each outer iteration ``k`` opens with an ``l = 0`` record of the state it
    starts from (evaluated at the new sigma); ``l >= 1`` are sweeps.
    """

    records: List[TraceRecord] = field(default_factory=list)
    converged: bool = False

    def append(self, *values):
        rec = TraceRecord(*values)
        if self.records and (rec.k, rec.l) <= (self.records[-1].k, self.records[-1].l):
            raise ValueError("trace records must be strictly increasing in (k, l)")
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    @property
    def n_outer(self) -> int:
        return len({r.k for r in self.records})

    def outer_gaps(self) -> np.ndarray:
        """Gap at the end of every outer iteration."""
        last = {}
        for r in self.records:
            last[r.k] = r.gap
        return np.array([last[k] for k in sorted(last)])

    def sigmas(self) -> np.ndarray:
        first = {}
        for r in self.records:
            first.setdefault(r.k, r.sigma)
        return np.array([first[k] for k in sorted(first)])

    def phase(self, k: int) -> List[TraceRecord]:
        return [r for r in self.records if r.k == k]

    def descent_violations(self, slack: float = DESCENT_SLACK) -> int:
        bad = 0
        for prev, cur in zip(self.records, self.records[1:]):
            if prev.k == cur.k and cur.q > prev.q + slack * (1 + abs(prev.q)):
                bad += 1
        return bad

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(TRACE_HEADER + "\n")
            for r in self.records:
                fh.write(f"{r.k},{r.l},{r.sigma:.17g},{r.q:.17g},{r.gap:.17g},{r.millis:.17g}\n")

    @classmethod
    def from_csv(cls, path) -> "ConvergenceTrace":
        trace = cls()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != TRACE_HEADER:
                raise ValueError(f"unexpected trace header {header!r}")
            for line in fh:
                if line.strip():
                    k, l, sigma, q, gap, ms = line.strip().split(",")
                    trace.append(int(k), int(l), float(sigma), float(q), float(gap), float(ms))
        return trace


def penalty_objective(state: AffinityState, Xs: Sequence[np.ndarray], lam: float,
                      sigma: float) -> float:
    total = 0.0
    for X, C in zip(Xs, state.views):
        R = X - X @ C
        D = C - state.consensus
        total += 0.5 * np.sum(R * R) + lam * np.sum(C * C) + 0.5 * sigma * np.sum(D * D)
    return float(total)


def feasibility_gap(state: AffinityState) -> float:
    return max(frobenius_norm(C - state.consensus) for C in state.views)


def bcd_sweep(state: AffinityState, Xs: Sequence[np.ndarray], lam: float, sigma: float,
              k1: int, k2: int, npg: NpgParams = NpgParams()) -> AffinityState:
    """One view update followed by one consensus update."""
    views = [update_view_matrix(X, C, state.consensus, lam, sigma, k1, npg)
             for X, C in zip(Xs, state.views)]
    return AffinityState(views, truncated_rank_projection(average_views(views), k2))


def _relative_change(new, old):
    return frobenius_norm(new - old) / max(frobenius_norm(new), 1.0)


def inner_stop(prev: AffinityState, cur: AffinityState, eps_inner: float) -> bool:
    change = max([_relative_change(c, p) for c, p in zip(cur.views, prev.views)]
                 + [_relative_change(cur.consensus, prev.consensus)])
    return change <= eps_inner


def outer_stop(state: AffinityState, eps_outer: float) -> bool:
    return feasibility_gap(state) <= eps_outer


def projected_gradient_residual(state: AffinityState, Xs, lam, sigma, k1) -> float:
    """max_v ||P(C^v - grad_v q) - C^v||_F^2, a stationarity measure of the view block.

    Diagnostic only; the solver stops on relative change.
    """
    out = 0.0
    for X, C in zip(Xs, state.views):
        G = X.T @ (X @ C - X) + 2.0 * lam * C + sigma * (C - state.consensus)
        P = project_columns(C - G, k1)
        out = max(out, float(np.sum((P - C) ** 2)))
    return out


def initial_state(Xs: Sequence[np.ndarray], k1: int, k2: int,
                  init: InitConfig = InitConfig()) -> AffinityState:
    """kNN kernel graphs projected onto the view constraints; consensus is the
    rank-k2 truncation of their (unprojected) mean."""
    graphs = [knn_affinity(X, init) for X in Xs]
    consensus = truncated_rank_projection(init_consensus(graphs), k2)
    return AffinityState([project_columns(C, k1) for C in graphs], consensus)


def solve(ds: MultiviewDataset, cfg: SolverConfig = SolverConfig(),
          n_clusters: Optional[int] = None, state: Optional[AffinityState] = None):
    """Run the penalty schedule on a (preprocessed) dataset.

    Returns
    -------
    state : AffinityState
        Final view matrices and consensus.
    trace : ConvergenceTrace
        ``trace.converged`` is false when ``max_outer`` ran out; a
        `MaxItersReached` warning is issued in that case.
    """
    Xs = ds.views
    n = ds.n_samples
    k2 = cfg.resolve_k2(n_clusters if n_clusters is not None else ds.n_clusters)
    if not cfg.k1 < n:
        raise ValueError(f"k1={cfg.k1} must be smaller than n={n}")
    if not k2 <= n:
        raise ValueError(f"k2={k2} exceeds n={n}")
    if state is None:
        state = initial_state(Xs, cfg.k1, k2, cfg.init)
    trace = ConvergenceTrace()
    sigma = cfg.sigma0
    for k in range(cfg.max_outer):
        q = penalty_objective(state, Xs, cfg.lam, sigma)
        trace.append(k, 0, sigma, q, feasibility_gap(state), 0.0)
        for l in range(1, cfg.max_inner + 1):
            t0 = time.perf_counter()
            new = bcd_sweep(state, Xs, cfg.lam, sigma, cfg.k1, k2, cfg.npg)
            millis = 1e3 * (time.perf_counter() - t0)
            q_new = penalty_objective(new, Xs, cfg.lam, sigma)
            if cfg.check_descent and q_new > q + DESCENT_SLACK * (1 + abs(q)):
                raise NumericalFailure(
                    f"penalty objective increased at sigma={sigma:g}, sweep {l}: {q!r} -> {q_new!r}")
            trace.append(k, l, sigma, q_new, feasibility_gap(new), millis)
            done = inner_stop(state, new, cfg.eps_inner)
            state, q = new, q_new
            if done:
                break
        gap = feasibility_gap(state)
        logger.info("outer %d: sigma=%g q=%.6g gap=%.3e sweeps=%d", k, sigma, q, gap, l)
        if gap <= cfg.eps_outer:
            trace.converged = True
            break
        sigma *= cfg.rho
    if not trace.converged:
        warnings.warn(f"no convergence after {cfg.max_outer} outer iterations "
                      f"(gap {feasibility_gap(state):.3e})", MaxItersReached)
    return state, trace
