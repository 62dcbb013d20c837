"""Clustering quality measures: ACC, NMI, pairwise F-measure and ARI.

All four are functions of the contingency table and hence invariant to
relabelling either argument.
"""
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch

METRICS = ("acc", "nmi", "fs", "ari")


def contingency(pred, truth) -> np.ndarray:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise LengthMismatch(f"{pred.size} predictions for {truth.size} labels")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max(initial=-1) + 1, t.max(initial=-1) + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def accuracy(pred, truth) -> float:
    """Fraction correct under the best one-to-one cluster-to-class mapping."""
    table = contingency(pred, truth)
    if table.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum() / table.sum())


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth, normalization: str = "sqrt") -> float:
    table = contingency(pred, truth).astype(np.float64)
    n = table.sum()
    if n == 0:
        return 0.0
    a, b = table.sum(axis=1), table.sum(axis=0)
    h_a, h_b = _entropy(a), _entropy(b)
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    nz = table > 0
    mi = float(np.sum(table[nz] / n * np.log(table[nz] * n / np.outer(a, b)[nz])))
    if normalization == "sqrt":
        denom = np.sqrt(h_a * h_b)
    elif normalization == "max":
        denom = max(h_a, h_b)
    elif normalization == "arithmetic":
        denom = 0.5 * (h_a + h_b)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return float(min(1.0, max(0.0, mi / denom)))


def _pairs(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2.0


def f_measure(pred, truth) -> float:
    """Pairwise F1 over unordered sample pairs (0 when either side has no pairs)."""
    table = contingency(pred, truth)
    together = _pairs(table).sum()
    pred_pairs = _pairs(table.sum(axis=1)).sum()
    true_pairs = _pairs(table.sum(axis=0)).sum()
    if pred_pairs == 0 or true_pairs == 0 or together == 0:
        return 0.0
    precision = together / pred_pairs
    recall = together / true_pairs
    return float(2 * precision * recall / (precision + recall))


def ari(pred, truth) -> float:
    table = contingency(pred, truth)
    n = table.sum()
    index = _pairs(table).sum()
    sum_a = _pairs(table.sum(axis=1)).sum()
    sum_b = _pairs(table.sum(axis=0)).sum()
    total = _pairs(n)
    expected = sum_a * sum_b / total if total > 0 else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # both partitions trivial in the same way (e.g. one cluster each)
        return 1.0
    return float((index - expected) / (max_index - expected))


def evaluate(pred, truth) -> Dict[str, float]:
    return {"acc": accuracy(pred, truth), "nmi": nmi(pred, truth),
            "fs": f_measure(pred, truth), "ari": ari(pred, truth)}


@dataclass
class MetricReport:
    """Mean and standard deviation of each metric over repeated runs."""

    mean: Dict[str, float]
    std: Dict[str, float]
    runs: int

    @classmethod
    def from_runs(cls, runs: Sequence[Dict[str, float]]) -> "MetricReport":
        if not runs:
            raise ValueError("no runs to summarise")
        mean = {m: float(np.mean([r[m] for r in runs])) for m in METRICS}
        std = {m: float(np.std([r[m] for r in runs])) for m in METRICS}
        return cls(mean, std, len(runs))

    def summary(self) -> str:
        """One-row table in ``mean(std)`` layout."""
        head = "  ".join(f"{m.upper():>15}" for m in METRICS)
        row = "  ".join(f"{self.mean[m]:.4f}({self.std[m]:.4f})".rjust(15) for m in METRICS)
        return head + "\n" + row

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("metric,mean,std,runs\n")
            for m in METRICS:
                fh.write(f"{m},{self.mean[m]:.17g},{self.std[m]:.17g},{self.runs}\n")

    @classmethod
    def from_csv(cls, path) -> "MetricReport":
        mean, std, runs = {}, {}, 0
        with open(path, encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                if line.strip():
                    m, mu, sd, r = line.strip().split(",")
                    mean[m], std[m], runs = float(mu), float(sd), int(r)
        return cls(mean, std, runs)
