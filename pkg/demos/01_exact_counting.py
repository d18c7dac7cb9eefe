"""
Exact counts of 0-1 matrices with given line sums
=================================================

Small classes B(s, t, H) counted three ways: the backtracking engine, the
column dynamic programme, and by listing the members.
"""
import numpy as np

from census import BipartiteInstance, DigraphInstance, count_exact, count_exact_digraph
from census import enumerate_members, prob_exact

# 3x3 with every line sum 2: each member is the all-ones matrix minus a permutation
inst = BipartiteInstance(3, 3, [2, 2, 2], [2, 2, 2])
print("brute:", count_exact(inst, "brute"), " dp:", count_exact(inst, "dp"))

for mat in enumerate_members(inst):
    print(mat, end="\n\n")

# %%
# Forbidding a cell removes the members that use it.
inst = BipartiteInstance(4, 4, [2] * 4, [2] * 4, {(0, 0), (1, 1)})
print("4x4, sums 2, two diagonal cells forbidden:", count_exact(inst))

# %%
# The dp engine handles sizes far beyond brute force.
for n in (6, 8, 10, 12):
    print(n, count_exact(BipartiteInstance.regular(n, n, n // 2), "dp"))

# %%
# Probabilities are exact rationals.
host = BipartiteInstance.regular(6, 6, 3)
p = prob_exact(host, {(0, 0), (1, 1)}, "disjoint")
print("P(avoid two cells) =", p.value, "~", float(p))

# %%
# Loop-free digraphs reduce to bipartite graphs with the diagonal forbidden.
# All out- and in-degrees 1 on 6 vertices: derangements.
print("derangements of 6:", count_exact_digraph(DigraphInstance(6, [1] * 6, [1] * 6)))
