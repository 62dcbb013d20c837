import numpy as np
import pytest

from cllsr.consensus_step import average_views, numerical_rank, truncated_rank_projection
from cllsr.errors import ShapeMismatch


def test_average_views_trivial(rng):
    A = rng.random((4, 4))
    assert np.array_equal(average_views([A]), A)
    assert np.allclose(average_views([A, A, A]), A)
    with pytest.raises(ShapeMismatch):
        average_views([A, np.zeros((3, 3))])


def test_average_minimises_sum_of_squared_distances(rng):
    Cs = [rng.standard_normal((6, 6)) for _ in range(4)]
    W = average_views(Cs)

    def cost(M):
        return sum(np.sum((M - C) ** 2) for C in Cs)

    base = cost(W)
    for _ in range(10):
        D = rng.standard_normal((6, 6))
        for eps in (1e-3, 1e-1):
            assert cost(W + eps * D) > base


def test_diagonal_truncation():
    out = truncated_rank_projection(np.diag([3.0, 2.0, 1.0]), 2)
    assert np.allclose(out, np.diag([3.0, 2.0, 0.0]))


def test_no_op_when_rank_is_small(rng):
    W = rng.standard_normal((8, 2)) @ rng.standard_normal((2, 8))
    assert np.allclose(truncated_rank_projection(W, 3), W, atol=1e-8)


def test_eckart_young_against_random_competitors(rng):
    W = rng.standard_normal((20, 20))
    C = truncated_rank_projection(W, 5)
    best = np.linalg.norm(C - W)
    for _ in range(200):
        B = rng.standard_normal((20, 5)) @ rng.standard_normal((5, 20))
        assert best <= np.linalg.norm(B - W)


def test_residual_identity_idempotence_monotonicity(rng):
    W = rng.standard_normal((15, 15))
    s = np.linalg.svd(W, compute_uv=False)
    prev = np.inf
    for k2 in range(1, 16):
        C = truncated_rank_projection(W, k2)
        res2 = np.sum((C - W) ** 2)
        assert res2 == pytest.approx(np.sum(s[k2:] ** 2), abs=1e-8 * (1 + np.sum(W ** 2)))
        assert np.allclose(truncated_rank_projection(C, k2), C, atol=1e-8)
        assert numerical_rank(C) <= k2
        assert res2 <= prev
        prev = res2


def test_result_may_be_negative(rng):
    W = np.abs(rng.standard_normal((10, 10)))
    assert truncated_rank_projection(W, 2).min() < 0
