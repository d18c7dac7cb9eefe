"""
Asymptotic estimates against exact values
=========================================

The counting estimate, the avoid/contain probabilities and the induced
window probability, each compared with an exact computation.
"""
import math

from census import BipartiteInstance, compute_stats, count_exact, induced_stats, prob_exact
from census import estimate_log_count_bipartite, induced_prob, log_prob_miss_hit

print(" n   log exact     log estimate   difference")
for n in (6, 8, 10):
    inst = BipartiteInstance.regular(n, n, n // 2, {(0, 0)})
    exact = math.log(count_exact(inst))
    est = estimate_log_count_bipartite(inst)
    print(f"{n:2d}  {exact:12.6f}  {est.log_value:12.6f}  {exact - est.log_value:+.4f}")
print("components at n=10:", est.components)

# %%
# Probability that a random member avoids / contains one cell.
for n in (6, 8, 10):
    host = BipartiteInstance.regular(n, n, n // 2)
    pat = BipartiteInstance.regular(n, n, n // 2, {(0, 0), (1, 1)})
    for which, mode in (("miss", "disjoint"), ("hit", "contains")):
        ex = prob_exact(host, pat.forbidden, mode).log()
        est = log_prob_miss_hit(pat, which).log_value
        print(f"n={n} {which}: exact {ex:.5f}  estimate {est:.5f}")

# %%
# Induced 2x2 window at n=8.  The error term is still visible at this size:
# the all-zero and all-one windows are off by about 0.2 in log space.
n = 8
host = BipartiteInstance.regular(n, n, 4)
base = compute_stats(host)
for pat in [set(), {(0, 0)}, {(0, 0), (1, 1)}, {(0, 0), (0, 1), (1, 0), (1, 1)}]:
    ex = prob_exact(host, pat, "induced", (2, 2)).log()
    est = induced_prob(induced_stats(BipartiteInstance.regular(n, n, 4, pat), 2, 2), base, n, n)
    print(sorted(pat), f"exact {ex:.4f}  estimate {est.log_value:.4f}")
