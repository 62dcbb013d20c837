"""Experiment harness: repeated runs with metric summaries and parameter sweeps."""
import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import List, Optional, Sequence, Union

import numpy as np

from .aqp import SolverConfig, solve
from .data import MultiviewDataset, load_dataset, load_manifest, preprocess, write_labels, write_matrix
from .metrics import METRICS, MetricReport, evaluate
from .postprocess import fuse, spectral_clustering
from .visualize import HEATMAP_THRESHOLD, emit_convergence, emit_heatmap

logger = logging.getLogger(__name__)

THREADS_ENV = "CLLSR_THREADS"

DEFAULT_LAMBDAS = (0.1, 1.0, 10.0, 100.0, 1000.0)
DEFAULT_K1 = (5, 10, 20, 30)
DEFAULT_K2 = ("10x", "20x", "30x", "40x")


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    data: Optional[str] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    repeats: int = 1
    out: Optional[str] = None
    seed: int = 0
    n_clusters: Optional[int] = None
    restarts: int = 20
    heatmap: bool = False
    trace: bool = False
    labels: bool = True
    threads: int = field(default_factory=default_threads)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")


@dataclass
class ExperimentResult:
    report: Optional[MetricReport]
    labels: List[np.ndarray]
    state: object
    trace: object


def derived_seeds(seed: int, count: int) -> List[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def _load(cfg: ExperimentConfig, dataset):
    if dataset is None:
        if cfg.data is None:
            raise ValueError("no dataset given")
        dataset = load_dataset(load_manifest(cfg.data))
    return dataset


def run_experiment(cfg: ExperimentConfig, dataset: Optional[MultiviewDataset] = None,
                   preprocessed: bool = False) -> ExperimentResult:
    """Preprocess, solve, fuse and cluster; clustering is repeated with
    ``cfg.repeats`` derived seeds.

    The solver itself is deterministic, so it runs once and only the
    spectral clustering step is repeated.
    """
    ds = _load(cfg, dataset)
    if not preprocessed:
        ds = preprocess(ds)
    k_c = cfg.n_clusters if cfg.n_clusters is not None else ds.n_clusters
    if k_c is None:
        raise ValueError("number of clusters unknown: supply labels or n_clusters")
    state, trace = solve(ds, cfg.solver, n_clusters=k_c)
    Cf = fuse(state.consensus)
    labels, runs = [], []
    for s in derived_seeds(cfg.seed, cfg.repeats):
        lab = spectral_clustering(Cf, k_c, seed=s, restarts=cfg.restarts)
        labels.append(lab)
        if ds.labels is not None:
            runs.append(evaluate(lab, ds.labels))
    report = MetricReport.from_runs(runs) if runs else None
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        if report is not None:
            report.to_csv(os.path.join(cfg.out, "report.csv"))
            with open(os.path.join(cfg.out, "summary.txt"), "w", encoding="utf-8") as fh:
                fh.write(report.summary() + "\n")
        if cfg.labels:
            write_labels(os.path.join(cfg.out, "labels.txt"), labels[0])
        if cfg.trace:
            trace.to_csv(os.path.join(cfg.out, "trace.csv"))
            emit_convergence(trace, cfg.out)
        if cfg.heatmap:
            write_matrix(os.path.join(cfg.out, "consensus.csv"), state.consensus)
            emit_heatmap(state.consensus, HEATMAP_THRESHOLD, os.path.join(cfg.out, "heatmap.pgm"))
    return ExperimentResult(report, labels, state, trace)


@dataclass
class SweepGrid:
    """Values for (lambda, k1, k2).  A k2 entry ``"20x"`` means 20 * n_clusters."""

    lambdas: Sequence[float] = DEFAULT_LAMBDAS
    k1s: Sequence[int] = DEFAULT_K1
    k2s: Sequence[Union[int, str]] = DEFAULT_K2

    def __post_init__(self):
        if not (self.lambdas and self.k1s and self.k2s):
            raise ValueError("sweep grid axes must be nonempty")

    def cells(self, n_clusters: int):
        for lam, k1, k2 in product(self.lambdas, self.k1s, self.k2s):
            yield float(lam), int(k1), resolve_k2(k2, n_clusters)


def resolve_k2(value, n_clusters: int) -> int:
    if isinstance(value, str):
        v = value.strip().lower()
        if v.endswith("x"):
            return int(float(v[:-1]) * n_clusters)
        return int(v)
    return int(value)


SWEEP_COLUMNS = ["lambda", "k1", "k2", "status", "reason"] + [
    f"{m}_{s}" for m in METRICS for s in ("mean", "std")]


def parameter_sweep(cfg: ExperimentConfig, grid: SweepGrid,
                    dataset: Optional[MultiviewDataset] = None,
                    path: Optional[str] = None) -> List[dict]:
    """Run one experiment per admissible (lambda, k1, k2) cell.

    Cells with ``k1 >= n`` or ``k2 > n`` are marked ``skipped``; cells whose
    run raises are marked ``failed``.  Rows come back in grid order.
    """
    ds = preprocess(_load(cfg, dataset))
    if ds.labels is None:
        raise ValueError("a sweep needs ground-truth labels")
    n = ds.n_samples
    k_c = cfg.n_clusters if cfg.n_clusters is not None else ds.n_clusters

    def run_cell(cell):
        lam, k1, k2 = cell
        row = {"lambda": lam, "k1": k1, "k2": k2, "status": "ok", "reason": ""}
        if k1 >= n or k2 > n:
            row.update(status="skipped", reason=f"inadmissible for n={n}")
            logger.info("skipping lambda=%g k1=%d k2=%d: %s", lam, k1, k2, row["reason"])
            return row
        sub = replace(cfg, solver=cfg.solver.with_updates(lam=lam, k1=k1, k2=k2), out=None)
        try:
            report = run_experiment(sub, ds, preprocessed=True).report
        except Exception as exc:  # recorded per cell, never fatal
            row.update(status="failed", reason=f"{type(exc).__name__}: {exc}")
            return row
        for m in METRICS:
            row[f"{m}_mean"] = report.mean[m]
            row[f"{m}_std"] = report.std[m]
        return row

    cells = list(grid.cells(k_c))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    if path is not None:
        write_sweep(path, rows)
    return rows


def write_sweep(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})


def read_sweep(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["lambda"] = float(row["lambda"])
        row["k1"], row["k2"] = int(row["k1"]), int(row["k2"])
        for key in SWEEP_COLUMNS[5:]:
            row[key] = float(row[key]) if row[key] != "" else None
    return rows
