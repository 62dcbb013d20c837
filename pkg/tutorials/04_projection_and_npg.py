"""
The column subproblem up close
==============================

Each column of a view matrix solves a small least-squares problem with a
ridge term, a pull towards the consensus column, nonnegativity and a cap on
the number of nonzeros.  Projection onto that constraint set has a closed
form: keep the k largest entries and clip them at zero.
"""

import itertools

import numpy as np

from cllsr.sparse_step import ColumnProblem, NpgParams, npg_run, project_nonneg_ksparse

z = np.array([0.3, -2.0, 1.5, 0.9, -0.1, 1.5])
print("projection with k=2:", project_nonneg_ksparse(z, 2))

###############################################################################
# The same answer by brute force over every support of size 2.

best = min(itertools.combinations(range(z.size), 2),
           key=lambda S: np.sum(z ** 2) - np.sum(np.maximum(z[list(S)], 0) ** 2))
print("best support by enumeration:", best)

###############################################################################
# Nonmonotone projected gradient on one random column problem.  Each step
# logs its objective and the reference value it had to beat, which is the
# largest of the last few objectives.

rng = np.random.default_rng(0)
A = rng.standard_normal((10, 8))
p = ColumnProblem(A, A @ np.r_[1.0, 0.5, np.zeros(6)], np.zeros(8), lam=0.1, sigma=1.0)
res = npg_run(p, np.zeros(8), k1=3, params=NpgParams())
for i, s in enumerate(res.steps[:8]):
    print(f"step {i}: value {s.value:10.5f}  reference {s.reference:10.5f}  L {s.L:9.3g}")
print(f"{res.iterations} iterations, converged={res.converged}")
print("solution:", np.round(res.x, 4))
