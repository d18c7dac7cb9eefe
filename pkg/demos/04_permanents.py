"""
Expected permanent of a random regular 0-1 matrix
=================================================
"""
import math

import numpy as np

from census import BipartiteInstance, expected_permanent_estimate, expected_permanent_exact
from census import permanent_bounds, permanent_exact

a = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
print("per =", permanent_exact(a))

# %%
# Exact expectation over the whole class, via the identity permutation's
# coverage probability, beside the estimate.
for n in (4, 6, 8):
    ex = expected_permanent_exact(BipartiteInstance.regular(n, n, n // 2))
    est = expected_permanent_estimate(n, 0.5)
    print(f"n={n}: exact {float(ex):.4f}  estimate {est.value:.4f}")

# %%
# The estimate sits between the classical bounds, close to Gurvits' bound.
n, s = 50, 25
b = permanent_bounds(n, s)
est = expected_permanent_estimate(n, s / n).log_value
print("van der Waerden", round(b.vdw_log, 4))
print("Gurvits        ", round(b.gurvits_log, 4))
print("estimate       ", round(est, 4), " gap", round(est - b.gurvits_log, 4),
      " vs -log(lambda)/2 =", round(-0.5 * math.log(s / n), 4))
print("Minc-Bregman   ", round(b.minc_bregman_log, 4))
