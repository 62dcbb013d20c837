"""From consensus matrix to cluster labels: symmetrised fusion, normalised
spectral embedding and k-means."""
from typing import List, NamedTuple

import numpy as np

from .errors import EmptyClusterUnrecoverable
from .numerics import as_matrix, symmetric_eigs

DEGREE_GUARD = 1e-12


def fuse(C_star) -> np.ndarray:
    """([C]_+ + [C]_+^T) / 2."""
    P = np.maximum(as_matrix(C_star, "C_star"), 0.0)
    if P.shape[0] != P.shape[1]:
        raise ValueError("consensus matrix must be square")
    return 0.5 * (P + P.T)


def normalized_laplacian(Cf) -> np.ndarray:
    """I - D^{-1/2} Cf D^{-1/2}; isolated vertices get a tiny degree instead of zero."""
    Cf = as_matrix(Cf, "Cf")
    deg = Cf.sum(axis=1) + DEGREE_GUARD
    d = 1.0 / np.sqrt(deg)
    L = -(d[:, None] * Cf * d[None, :])
    L[np.diag_indices_from(L)] += 1.0
    return 0.5 * (L + L.T)


def spectral_embedding(Cf, k: int) -> np.ndarray:
    """Row-normalised eigenvectors of the `k` smallest Laplacian eigenvalues."""
    _, V = symmetric_eigs(normalized_laplacian(Cf), k)
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(norms > 0, norms, 1.0)


def spectral_clustering(Cf, k_c: int, seed: int = 0, restarts: int = 20) -> np.ndarray:
    if k_c < 2:
        raise ValueError("k_c must be at least 2")
    Cf = as_matrix(Cf, "Cf")
    if np.any(Cf < 0):
        raise ValueError("affinity must be nonnegative")
    return kmeans(spectral_embedding(Cf, k_c), k_c, restarts=restarts, seed=seed)


def inertia(points, labels, centers=None) -> float:
    """Within-cluster sum of squared distances."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    total = 0.0
    for j in np.unique(labels):
        P = points[labels == j]
        c = P.mean(axis=0) if centers is None else centers[j]
        total += float(np.sum((P - c) ** 2))
    return total


def kmeans_plusplus(points, k, rng) -> np.ndarray:
    """k-means++ seeding: each new center is drawn with probability
    proportional to the squared distance to the nearest chosen center."""
    n = points.shape[0]
    centers = [points[rng.integers(n)]]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        idx = rng.integers(n) if total <= 0 else rng.choice(n, p=d2 / total)
        centers.append(points[idx])
        d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
    return np.array(centers)


class LloydResult(NamedTuple):
    labels: np.ndarray
    centers: np.ndarray
    objective: float
    history: List[float]


def _assign(points, centers):
    d2 = (np.sum(points ** 2, axis=1)[:, None] - 2.0 * points @ centers.T
          + np.sum(centers ** 2, axis=1)[None, :])
    labels = np.argmin(d2, axis=1)
    return labels, np.maximum(d2[np.arange(points.shape[0]), labels], 0.0)


def lloyd(points, centers, max_iter: int = 300, tol: float = 1e-10,
          max_reseeds: int = 10) -> LloydResult:
    """Lloyd iterations from the given centers.

    An empty cluster is re-seeded at the point farthest from its center;
    `EmptyClusterUnrecoverable` is raised after `max_reseeds` attempts.
    """
    points = np.asarray(points, dtype=np.float64)
    centers = np.array(centers, dtype=np.float64)
    k = centers.shape[0]
    labels, d2 = _assign(points, centers)
    history = [float(d2.sum())]
    reseeds = 0
    for _ in range(max_iter):
        counts = np.bincount(labels, minlength=k)
        while np.any(counts == 0):
            reseeds += 1
            if reseeds > max_reseeds:
                raise EmptyClusterUnrecoverable(f"cluster stayed empty after {max_reseeds} re-seeds")
            j = int(np.flatnonzero(counts == 0)[0])
            far = int(np.argmax(d2))
            centers[j] = points[far]
            labels, d2 = _assign(points, centers)
            counts = np.bincount(labels, minlength=k)
        for j in range(k):
            centers[j] = points[labels == j].mean(axis=0)
        labels, d2 = _assign(points, centers)
        history.append(float(d2.sum()))
        if history[-2] - history[-1] <= tol * max(history[-2], 1.0):
            break
    return LloydResult(labels, centers, history[-1], history)


def kmeans(points, k: int, restarts: int = 20, seed: int = 0) -> np.ndarray:
    """Best of `restarts` k-means++ seeded Lloyd runs (lowest inertia, ties to
    the earliest restart)."""
    points = as_matrix(points, "points")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        res = lloyd(points, kmeans_plusplus(points, k, rng))
        if best is None or res.objective < best.objective:
            best = res
    return best.labels
