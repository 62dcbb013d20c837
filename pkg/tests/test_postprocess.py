import numpy as np
import pytest
from scipy.linalg import block_diag

from cllsr.errors import EmptyClusterUnrecoverable
from cllsr.metrics import ari
from cllsr.postprocess import (fuse, inertia, kmeans, lloyd, normalized_laplacian,
                               spectral_clustering)


def test_fuse_example():
    C = np.array([[0.0, 2.0], [-1.0, 0.0]])
    assert np.allclose(fuse(C), [[0, 1], [1, 0]])


def test_fuse_is_symmetric_and_nonnegative(rng):
    F = fuse(rng.standard_normal((9, 9)))
    assert np.allclose(F, F.T) and F.min() >= 0


def test_laplacian_spectrum_range(rng):
    A = fuse(np.abs(rng.standard_normal((10, 10))))
    w = np.linalg.eigvalsh(normalized_laplacian(A))
    assert w.min() > -1e-10 and w.max() < 2 + 1e-10


def _blocks(rng, sizes, noise=0.0):
    B = block_diag(*[rng.uniform(0.5, 1.0, (s, s)) for s in sizes])
    B = B + noise * rng.random(B.shape)
    np.fill_diagonal(B, 0.0)
    return fuse(B)


def test_block_diagonal_recovery(rng):
    sizes = [6, 9, 5, 8]
    truth = np.repeat(np.arange(4), sizes)
    for noise in (0.0, 0.01):
        pred = spectral_clustering(_blocks(rng, sizes, noise), 4, seed=3)
        assert ari(pred, truth) == pytest.approx(1.0)


def test_permutation_equivariance(rng):
    sizes = [7, 7, 7]
    A = _blocks(rng, sizes, 0.02)
    perm = rng.permutation(21)
    base = spectral_clustering(A, 3, seed=1)
    moved = spectral_clustering(A[np.ix_(perm, perm)], 3, seed=1)
    assert ari(moved, base[perm]) == pytest.approx(1.0)


def test_isolated_vertex_is_tolerated(rng):
    A = _blocks(rng, [5, 5])
    A = np.pad(A, ((0, 1), (0, 1)))
    lab = spectral_clustering(A, 2)
    assert lab.shape == (11,)


def test_input_validation(rng):
    with pytest.raises(ValueError):
        spectral_clustering(np.eye(3), 1)
    with pytest.raises(ValueError):
        spectral_clustering(-np.ones((3, 3)), 2)
    with pytest.raises(ValueError):
        kmeans(rng.random((3, 2)), 4)


def test_kmeans_cliques_reach_global_optimum(rng):
    centers = np.array([[0, 0], [10, 0], [0, 10]], dtype=float)
    pts = np.vstack([c + 0.1 * rng.standard_normal((15, 2)) for c in centers])
    truth = np.repeat(np.arange(3), 15)
    lab = kmeans(pts, 3, seed=0)
    assert ari(lab, truth) == pytest.approx(1.0)
    assert inertia(pts, lab) == pytest.approx(inertia(pts, truth))


def test_kmeans_with_k_equal_n(rng):
    pts = rng.standard_normal((6, 3))
    lab = kmeans(pts, 6)
    assert sorted(lab.tolist()) == list(range(6))
    assert inertia(pts, lab) == pytest.approx(0.0)


def test_kmeans_beats_random_assignment(rng):
    pts = rng.standard_normal((60, 4))
    best = inertia(pts, kmeans(pts, 4, seed=2))
    for _ in range(50):
        assert best <= inertia(pts, rng.integers(0, 4, 60)) + 1e-9


def test_lloyd_objective_monotone(rng):
    pts = rng.standard_normal((80, 3))
    res = lloyd(pts, pts[rng.choice(80, 5, replace=False)])
    assert np.all(np.diff(res.history) <= 1e-9)
    assert res.objective == pytest.approx(inertia(pts, res.labels))


def test_lloyd_reseeds_empty_cluster(rng):
    pts = rng.standard_normal((20, 2))
    res = lloyd(pts, np.vstack([pts[:2], [[100.0, 100.0]]]))
    assert np.bincount(res.labels, minlength=3).min() > 0


def test_lloyd_unrecoverable():
    pts = np.zeros((4, 2))
    with pytest.raises(EmptyClusterUnrecoverable):
        lloyd(pts, np.array([[0.0, 0.0], [5.0, 5.0]]))


def test_seed_determinism(rng):
    pts = rng.standard_normal((50, 3))
    assert np.array_equal(kmeans(pts, 3, seed=9), kmeans(pts, 3, seed=9))
