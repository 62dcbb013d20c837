"""Multiview subspace clustering with cardinality-constrained self-representation
and a rank-constrained consensus, solved by an alternating quadratic penalty method."""
from .aqp import AffinityState, ConvergenceTrace, SolverConfig, solve
from .data import MultiviewDataset, preprocess, synthesize_dataset
from .metrics import MetricReport, evaluate
from .postprocess import fuse, spectral_clustering
from .sparse_step import NpgParams

__version__ = "0.1.0"

__all__ = [
    "AffinityState", "ConvergenceTrace", "MultiviewDataset", "MetricReport", "NpgParams",
    "SolverConfig", "evaluate", "fuse", "preprocess", "solve", "spectral_clustering",
    "synthesize_dataset",
]
