import numpy as np
import pytest

from cllsr.visualize import (emit_convergence, emit_heatmap, heatmap_transform, read_pgm,
                             read_series)


def test_transform_examples():
    C = np.array([[0.0, 0.5], [0.25, 5e-5]])
    T = heatmap_transform(C)
    assert T[0, 1] == pytest.approx(1.0)
    assert T[1, 0] == pytest.approx(0.5)
    assert T[0, 0] == 0.0 and T[1, 1] == 0.0


def test_transform_is_order_preserving(rng):
    C = rng.uniform(1e-3, 0.9, (12, 12))
    T = heatmap_transform(C)
    order = np.argsort(C.ravel())
    assert np.all(np.diff(T.ravel()[order]) >= -1e-12)
    assert T.max() == pytest.approx(1.0) and T.min() > 0


def test_transform_rescales_large_maxima(rng):
    C = rng.uniform(0.5, 3.0, (5, 5))
    T = heatmap_transform(C)
    assert np.all((T > 0) & (T <= 1.0 + 1e-12))
    assert heatmap_transform(np.zeros((3, 3))).max() == 0.0


def test_block_structure_is_visible(rng):
    C = np.zeros((20, 20))
    C[:10, :10] = rng.uniform(0.1, 0.5, (10, 10))
    C[10:, 10:] = rng.uniform(0.1, 0.5, (10, 10))
    C += rng.uniform(0, 5e-5, C.shape)
    T = heatmap_transform(C)
    inside = np.r_[T[:10, :10].ravel(), T[10:, 10:].ravel()].mean()
    outside = np.r_[T[:10, 10:].ravel(), T[10:, :10].ravel()].mean()
    assert inside > 0.3 and outside == 0.0


def test_pgm_round_trip(tmp_path, rng):
    C = rng.uniform(0, 0.8, (7, 7))
    img = emit_heatmap(C, 1e-4, tmp_path / "h.pgm")
    pix = read_pgm(tmp_path / "h.pgm")
    assert pix.shape == (7, 7)
    assert np.array_equal(pix, np.round(255 * img).astype(np.uint8))


def test_convergence_series(tmp_path, solved):
    _, trace = solved
    pof, oef = emit_convergence(trace, tmp_path)
    p, o = read_series(pof), read_series(oef)
    assert len(p["q"]) == len(trace)
    assert np.allclose(p["q"], [r.q for r in trace.records])
    assert len(o["gap"]) == trace.n_outer - 1
    assert np.allclose(o["gap"], trace.outer_gaps()[1:])
