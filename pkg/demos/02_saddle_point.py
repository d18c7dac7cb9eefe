"""
Maximum-entropy edge probabilities
==================================

The saddle point gives each free cell a probability lambda_jk so that the
expected line sums are exactly s and t.
"""
import numpy as np

from census import BipartiteInstance, saddle_residuals, solve_saddle

inst = BipartiteInstance(2, 3, [2, 1], [1, 1, 1])
sp = solve_saddle(inst)
print(np.round(sp.lambda_mat, 6))
print("iterations:", sp.iterations, " residual:", saddle_residuals(inst, sp).max_abs)

# %%
# A larger irregular instance with a few forbidden cells.
rng = np.random.default_rng(0)
mat = (rng.random((30, 40)) < 0.45).astype(int)
zeros = np.argwhere(mat == 0)[:5]
inst = BipartiteInstance(30, 40, mat.sum(1), mat.sum(0), {tuple(map(int, c)) for c in zeros})
sp = solve_saddle(inst)
res = saddle_residuals(inst, sp)
print("converged:", sp.converged, "in", sp.iterations, "sweeps")
print("max residual:", res.max_abs)
print("row sums of lambda vs s:", np.round(sp.edge_probabilities().sum(1)[:5], 10), list(inst.s[:5]))

# %%
# Scaling q by c and r by 1/c leaves every probability unchanged.
from census.saddle import lambda_from_radii

print("gauge change:", np.abs(lambda_from_radii(1.7 * sp.q, sp.rr / 1.7) - sp.lambda_mat).max())
