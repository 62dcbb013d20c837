"""Starting point of the solver: Gaussian-kernel kNN graphs per view and
their mean as the consensus."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ShapeMismatch, TooFewSamples
from .numerics import as_matrix


@dataclass(frozen=True)
class InitConfig:
    """Neighbourhood size and kernel width for `knn_affinity`.

    ``bandwidth=None`` selects the median heuristic: the median squared
    distance over all kept neighbour pairs.
    """

    kappa: int = 5
    bandwidth: Optional[float] = None

    def __post_init__(self):
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")


def knn_neighbors(X, kappa: int) -> np.ndarray:
    """Boolean matrix N with N[i, j] true iff sample j is among the `kappa`
    nearest neighbours of sample i (self excluded, ties to the lower index)."""
    X = as_matrix(X, "X")
    n = X.shape[1]
    D = cdist(X.T, X.T, "sqeuclidean")
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")[:, :kappa]
    N = np.zeros((n, n), dtype=bool)
    N[np.arange(n)[:, None], order] = True
    return N


def knn_affinity(X, cfg: InitConfig = InitConfig()) -> np.ndarray:
    """Symmetric kNN graph with weights exp(-||x_i - x_j||^2 / bandwidth).

    An edge (i, j) is kept if either sample is among the other's `kappa`
    nearest neighbours; the diagonal is zero.
    """
    X = as_matrix(X, "X")
    n = X.shape[1]
    if n < cfg.kappa + 1:
        raise TooFewSamples(f"kappa={cfg.kappa} needs at least {cfg.kappa + 1} samples, got {n}")
    N = knn_neighbors(X, cfg.kappa)
    mask = N | N.T
    D = cdist(X.T, X.T, "sqeuclidean")
    width = cfg.bandwidth
    if width is None:
        width = float(np.median(D[mask]))
        if width <= 0:
            width = 1.0
    C = np.where(mask, np.exp(-D / width), 0.0)
    np.fill_diagonal(C, 0.0)
    return C


def init_consensus(Cs: Sequence[np.ndarray]) -> np.ndarray:
    Cs = [np.asarray(C, dtype=np.float64) for C in Cs]
    if not Cs:
        raise ValueError("no matrices to average")
    shape = Cs[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(C.shape != shape for C in Cs):
        raise ShapeMismatch("all matrices must be n x n of the same size")
    return np.mean(Cs, axis=0)
