"""Consensus update: best rank-k2 fit to the mean of the view matrices."""
from typing import Sequence

import numpy as np

from .errors import ShapeMismatch
from .numerics import svd

RANK_TOL = 1e-10


def average_views(Cs: Sequence[np.ndarray]) -> np.ndarray:
    Cs = [np.asarray(C, dtype=np.float64) for C in Cs]
    if not Cs:
        raise ValueError("no view matrices")
    shape = Cs[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(C.shape != shape for C in Cs):
        raise ShapeMismatch("view matrices must all be n x n")
    return np.mean(Cs, axis=0)


def truncated_rank_projection(W, k2: int) -> np.ndarray:
    """Truncated SVD of `W` keeping the `k2` leading singular triplets.

    This is the closest matrix of rank at most `k2` to `W` in Frobenius norm.
    No sign constraint is imposed on the result.
    """
    W = np.asarray(W, dtype=np.float64)
    n = W.shape[0]
    if not 1 <= k2 <= n:
        raise ValueError(f"k2 must lie in [1, {n}], got {k2}")
    U, s, Vt = svd(W)
    return (U[:, :k2] * s[:k2]) @ Vt[:k2]


def numerical_rank(M, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))
