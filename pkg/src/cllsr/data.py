"""Multiview dataset container, text file I/O, PCA preprocessing and a
synthetic union-of-subspaces generator."""
import configparser
import os
import re
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import FileMissing, ParseError, ShapeMismatch
from .numerics import as_matrix, pca_reduce

ROWS = "samples-as-rows"
COLUMNS = "samples-as-columns"
_SPLIT = re.compile(r"[,\s]+")
MAX_PCA_DIM = 100


@dataclass(frozen=True)
class MultiviewDataset:
    """V views of the same n samples, each stored features x samples."""

    views: List[np.ndarray]
    labels: Optional[np.ndarray] = None
    names: Optional[List[str]] = None

    def __post_init__(self):
        if len(self.views) < 1:
            raise ValueError("a dataset needs at least one view")
        views = [as_matrix(X, f"view {v}") for v, X in enumerate(self.views)]
        n = views[0].shape[1]
        for v, X in enumerate(views):
            if X.shape[1] != n:
                raise ShapeMismatch(
                    f"view {v} has {X.shape[1]} samples, view 0 has {n}")
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.size != n:
                raise ShapeMismatch(f"labels have length {labels.size}, expected {n}")
            object.__setattr__(self, "labels", labels.astype(np.int64))
        if self.names is not None and len(self.names) != n:
            raise ShapeMismatch(f"{len(self.names)} names for {n} samples")

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def n_samples(self) -> int:
        return self.views[0].shape[1]

    @property
    def n_clusters(self) -> Optional[int]:
        if self.labels is None:
            return None
        return int(np.unique(self.labels).size)


@dataclass
class DatasetManifest:
    views: List[str]
    labels: Optional[str] = None
    orientation: str = COLUMNS

    def __post_init__(self):
        if not self.views:
            raise ValueError("manifest lists no view files")
        if self.orientation not in (ROWS, COLUMNS):
            raise ValueError(f"unknown orientation {self.orientation!r}")


def read_keyvalue(path) -> dict:
    """Parse a ``key = value`` text file (``#`` comments allowed) into a dict."""
    if not os.path.exists(path):
        raise FileMissing(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        parser.read_string("[root]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return dict(parser["root"])


def load_manifest(path) -> DatasetManifest:
    """Read a manifest file with keys ``view1 .. viewV``, ``labels``, ``orientation``.

    Relative paths are resolved against the manifest's directory.
    """
    entries = read_keyvalue(path)
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    keys = sorted((k for k in entries if re.fullmatch(r"view\d+", k)),
                  key=lambda k: int(k[4:]))
    return DatasetManifest(
        views=[resolve(entries[k]) for k in keys],
        labels=resolve(entries["labels"]) if entries.get("labels") else None,
        orientation=entries.get("orientation", COLUMNS),
    )


def read_matrix(path) -> np.ndarray:
    if not os.path.exists(path):
        raise FileMissing(path)
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in _SPLIT.split(line) if tok]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if rows and len(row) != len(rows[0]):
                raise ParseError(
                    f"{path}:{lineno}: ragged row ({len(row)} cells, expected {len(rows[0])})")
            rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data")
    M = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{path}: non-finite value")
    return M


def write_matrix(path, M, delimiter=","):
    # %.17g round-trips float64 exactly
    np.savetxt(path, np.atleast_2d(M), fmt="%.17g", delimiter=delimiter)


def read_labels(path) -> np.ndarray:
    if not os.path.exists(path):
        raise FileMissing(path)
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return np.asarray(out, dtype=np.int64)


def write_labels(path, labels):
    with open(path, "w", encoding="utf-8") as fh:
        for lab in np.asarray(labels, dtype=np.int64):
            fh.write(f"{int(lab)}\n")


def load_dataset(manifest: DatasetManifest) -> MultiviewDataset:
    views = []
    for p in manifest.views:
        M = read_matrix(p)
        views.append(M.T.copy() if manifest.orientation == ROWS else M)
    labels = read_labels(manifest.labels) if manifest.labels else None
    return MultiviewDataset(views, labels)


def save_dataset(ds: MultiviewDataset, directory, orientation=COLUMNS) -> str:
    """Write `ds` as one text file per view plus a manifest; returns the manifest path."""
    os.makedirs(directory, exist_ok=True)
    lines = [f"orientation = {orientation}"]
    for v, X in enumerate(ds.views, 1):
        name = f"view{v}.csv"
        write_matrix(os.path.join(directory, name), X.T if orientation == ROWS else X)
        lines.append(f"view{v} = {name}")
    if ds.labels is not None:
        write_labels(os.path.join(directory, "labels.txt"), ds.labels)
        lines.append("labels = labels.txt")
    path = os.path.join(directory, "manifest.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def target_dimension(ds: MultiviewDataset) -> int:
    return min([MAX_PCA_DIM, ds.n_samples] + [X.shape[0] for X in ds.views])


def preprocess(ds: MultiviewDataset) -> MultiviewDataset:
    """PCA-reduce every view (fit per view) to a common feature length."""
    d = target_dimension(ds)
    return MultiviewDataset([pca_reduce(X, d) for X in ds.views], ds.labels, ds.names)


def synthesize_dataset(k_c: int, per_cluster: int, V: int, noise: float, seed: int,
                       ambient_dims: Optional[Sequence[int]] = None,
                       subspace_dim: int = 4) -> MultiviewDataset:
    """Union-of-subspaces data observed through `V` views.

    In every view each cluster lives on its own random `subspace_dim`-dimensional
    linear subspace; samples are unit-variance Gaussian combinations of an
    orthonormal basis, plus isotropic Gaussian noise of standard deviation
    `noise`.  Labels are ``0..k_c-1`` in contiguous blocks.
    """
    if k_c < 2 or per_cluster < 3 or V < 1:
        raise ValueError("need k_c >= 2, per_cluster >= 3, V >= 1")
    if ambient_dims is None:
        ambient_dims = [40 + 10 * v for v in range(V)]
    if len(ambient_dims) != V:
        raise ValueError("ambient_dims must have one entry per view")
    rng = np.random.default_rng(seed)
    n = k_c * per_cluster
    views = []
    for m in ambient_dims:
        X = np.empty((m, n))
        for j in range(k_c):
            basis, _ = np.linalg.qr(rng.standard_normal((m, subspace_dim)))
            coef = rng.standard_normal((subspace_dim, per_cluster))
            X[:, j * per_cluster:(j + 1) * per_cluster] = basis @ coef
        # drawn even when noise == 0 so the bases match across noise levels
        X += noise * rng.standard_normal(X.shape)
        views.append(X)
    labels = np.repeat(np.arange(k_c), per_cluster)
    return MultiviewDataset(views, labels)
