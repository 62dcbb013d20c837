"""Dense matrix primitives shared by the solver modules.

Matrices are plain ``numpy.ndarray`` objects of dtype float64.  The helpers
here validate inputs and wrap LAPACK routines with the error types used in
the rest of the package.
"""
from typing import NamedTuple, Tuple

import numpy as np
from scipy import linalg

from .errors import DimensionTooLarge, NotSymmetric, NumericalFailure

SYMMETRY_TOL = 1e-10


class SvdResult(NamedTuple):
    U: np.ndarray
    singular_values: np.ndarray
    Vt: np.ndarray


def as_matrix(M, name="matrix"):
    """Return `M` as a finite 2-D float64 array, raising ValueError otherwise."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def frobenius_norm(M) -> float:
    return float(np.sqrt(np.sum(np.square(np.asarray(M, dtype=np.float64)))))


def svd(M) -> SvdResult:
    """Thin SVD with singular values in nonincreasing order."""
    A = as_matrix(M)
    try:
        U, s, Vt = linalg.svd(A, full_matrices=False, lapack_driver="gesdd")
    except (linalg.LinAlgError, ValueError):
        try:
            U, s, Vt = linalg.svd(A, full_matrices=False, lapack_driver="gesvd")
        except (linalg.LinAlgError, ValueError) as exc:
            raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return SvdResult(U, s, Vt)


def truncate(M, r: int) -> np.ndarray:
    """Best rank-`r` approximation of `M` in Frobenius norm."""
    U, s, Vt = svd(M)
    r = max(0, min(int(r), s.size))
    return (U[:, :r] * s[:r]) @ Vt[:r]


def symmetric_eigs(M, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """The `k` smallest eigenpairs of a symmetric matrix.

    Returns
    -------
    eigenvalues : ndarray, shape (k,)
        Ascending.
    eigenvectors : ndarray, shape (n, k)
        Orthonormal columns.
    """
    A = as_matrix(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise NotSymmetric(f"matrix is not square: {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    A = 0.5 * (A + A.T)
    try:
        w, V = linalg.eigh(A, subset_by_index=[0, k - 1])
    except linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    return w, V


def pca_reduce(X, d: int) -> np.ndarray:
    """Project the samples (columns) of `X` onto its top-`d` principal directions.

    Parameters
    ----------
    X : array-like, shape (n_features, n_samples)
    d : int
        Target dimension, at most ``min(n_features, n_samples)``.

    Returns
    -------
    Z : ndarray, shape (d, n_samples)
        Coordinates of the mean-centered samples in the principal basis.
    """
    X = as_matrix(X, "X")
    m, n = X.shape
    if d < 1 or d > min(m, n):
        raise DimensionTooLarge(f"cannot reduce {m}x{n} data to d={d}")
    Xc = X - X.mean(axis=1, keepdims=True)
    U, s, _ = svd(Xc)
    return U[:, :d].T @ Xc
