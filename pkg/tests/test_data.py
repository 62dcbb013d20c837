import numpy as np
import pytest

from cllsr.data import (COLUMNS, ROWS, DatasetManifest, MultiviewDataset, load_dataset,
                        load_manifest, preprocess, read_matrix, save_dataset,
                        synthesize_dataset, target_dimension)
from cllsr.errors import FileMissing, ParseError, ShapeMismatch


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_load_bbcsport_sized_dataset(tmp_path, rng):
    ds = MultiviewDataset([rng.random((7, 544)), rng.random((5, 544))],
                          rng.integers(0, 5, 544))
    loaded = load_dataset(load_manifest(save_dataset(ds, tmp_path, orientation=ROWS)))
    assert loaded.n_views == 2 and loaded.n_samples == 544
    assert loaded.labels.size == 544


def test_round_trip_is_bit_exact(tmp_path, rng):
    ds = MultiviewDataset([rng.standard_normal((4, 9)) * 1e-7, rng.standard_normal((3, 9)) * 1e9],
                          np.arange(9) % 3)
    for orientation in (ROWS, COLUMNS):
        loaded = load_dataset(load_manifest(save_dataset(ds, tmp_path / orientation, orientation)))
        for a, b in zip(ds.views, loaded.views):
            assert np.array_equal(a, b)
        assert np.array_equal(ds.labels, loaded.labels)


def test_sample_count_mismatch(tmp_path):
    a = _write(tmp_path / "a.csv", "\n".join(["1,2"] * 169))
    b = _write(tmp_path / "b.csv", "\n".join(["1,2"] * 170))
    with pytest.raises(ShapeMismatch):
        load_dataset(DatasetManifest([a, b], orientation=ROWS))


def test_single_view_without_labels(tmp_path):
    a = _write(tmp_path / "a.txt", "1 2 3\n4   5 6\n")
    ds = load_dataset(DatasetManifest([a]))
    assert ds.n_views == 1 and ds.labels is None and ds.n_samples == 3


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        read_matrix(_write(tmp_path / "r.csv", "1,2,3\n4,5\n"))
    with pytest.raises(ParseError):
        read_matrix(_write(tmp_path / "x.csv", "1,2\n3,abc\n"))
    with pytest.raises(FileMissing):
        read_matrix(str(tmp_path / "nope.csv"))


def test_manifest_relative_paths(tmp_path):
    _write(tmp_path / "v.csv", "1e0, 2.5e-1\n3, 4\n")
    _write(tmp_path / "y.txt", "0\n1\n")
    m = _write(tmp_path / "m.txt", "view1 = v.csv\nlabels = y.txt  # truth\norientation = samples-as-columns\n")
    ds = load_dataset(load_manifest(m))
    assert np.array_equal(ds.views[0], [[1.0, 0.25], [3.0, 4.0]])
    assert list(ds.labels) == [0, 1]


@pytest.mark.parametrize("dims,n,expected", [
    ((2949, 334), 1051, 100),   # WebKB feature counts
    ((128, 10), 693, 10),       # wikipedia feature counts
    ((30, 40), 12, 12),         # capped by the sample count
])
def test_target_dimension(dims, n, expected):
    ds = MultiviewDataset([np.zeros((m, n)) for m in dims])
    assert target_dimension(ds) == expected


def test_preprocess_dimensions(rng):
    ds = MultiviewDataset([rng.standard_normal((128, 60)), rng.standard_normal((10, 60))],
                          np.arange(60) % 2)
    out = preprocess(ds)
    assert [X.shape for X in out.views] == [(10, 60), (10, 60)]
    assert np.array_equal(out.labels, ds.labels)


def test_preprocess_keeps_span_at_full_dimension(rng):
    X = rng.standard_normal((5, 30))
    Z = preprocess(MultiviewDataset([X])).views[0]
    Xc = X - X.mean(axis=1, keepdims=True)
    assert np.allclose(Xc.T @ Xc, Z.T @ Z, atol=1e-8)


def test_synthesize_shape_and_labels():
    ds = synthesize_dataset(3, 50, 3, 0.01, 7)
    assert ds.n_samples == 150 and ds.n_views == 3
    assert np.array_equal(np.bincount(ds.labels), [50, 50, 50])


def test_synthesize_deterministic():
    a = synthesize_dataset(3, 10, 2, 0.1, 5)
    b = synthesize_dataset(3, 10, 2, 0.1, 5)
    for x, y in zip(a.views, b.views):
        assert np.array_equal(x, y)


def test_synthesize_noiseless_blocks_are_rank_limited():
    ds = synthesize_dataset(4, 12, 2, 0.0, 3, subspace_dim=3)
    for X in ds.views:
        for j in range(4):
            block = X[:, ds.labels == j]
            assert np.linalg.matrix_rank(block, tol=1e-9) <= 3
