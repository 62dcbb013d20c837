"""
Clustering a synthetic multiview dataset
========================================

Three clusters of 50 samples live on random 4-dimensional subspaces.  Each
of three views sees them through a different random embedding plus a little
noise.  We learn one sparse affinity matrix per view and a low-rank
consensus matrix, then cluster the consensus.
"""

import numpy as np

from cllsr import SolverConfig, evaluate, fuse, preprocess, solve, spectral_clustering
from cllsr.data import synthesize_dataset

###############################################################################
# Data: views are stored as (features x samples) matrices.  ``preprocess``
# centres every view and reduces it with PCA to at most 100 dimensions.

raw = synthesize_dataset(3, per_cluster=50, V=3, noise=0.01, seed=7)
ds = preprocess(raw)
print("view shapes before:", [X.shape for X in raw.views])
print("view shapes after: ", [X.shape for X in ds.views])

###############################################################################
# Solve.  With ``k2`` unset the consensus rank bound defaults to 20 per
# cluster.  Each view column keeps at most ``k1`` = 20 neighbours.

state, trace = solve(ds, SolverConfig(lam=100.0, k1=20, max_outer=15))
print(f"converged={trace.converged} after {trace.n_outer} penalty rounds")
print("nonzeros per column of view 0:", np.count_nonzero(state.views[0], axis=0).max())

###############################################################################
# Fuse the consensus into a symmetric nonnegative graph and cluster it.

Cf = fuse(state.consensus)
labels = spectral_clustering(Cf, 3, seed=0)
for name, value in evaluate(labels, ds.labels).items():
    print(f"{name.upper():>4}: {value:.4f}")
