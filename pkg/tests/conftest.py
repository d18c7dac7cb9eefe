"""Independent brute-force oracles shared by the test modules.

None of these reuse package code paths: they enumerate raw 0-1 arrays.
"""
import itertools
import math
import sys

import numpy as np
import pytest


def all_matrices(m, n):
    """Every m x n 0-1 matrix, as a (2**(m*n), m, n) array."""
    bits = np.array(list(itertools.product((0, 1), repeat=m * n)), dtype=np.int64)
    return bits.reshape(-1, m, n)


def brute_members(m, n, s, t, forbidden=()):
    mats = all_matrices(m, n)
    ok = (mats.sum(axis=2) == np.array(s)).all(axis=1) & (mats.sum(axis=1) == np.array(t)).all(axis=1)
    for j, k in forbidden:
        ok &= mats[:, j, k] == 0
    return mats[ok]


def brute_count(m, n, s, t, forbidden=()):
    return len(brute_members(m, n, s, t, forbidden))


def brute_digraph_count(n, s, t, arcs=()):
    cells = [(j, k) for j in range(n) for k in range(n) if j != k and (j, k) not in set(arcs)]
    total = 0
    for bits in itertools.product((0, 1), repeat=len(cells)):
        out = [0] * n
        inn = [0] * n
        for (j, k), b in zip(cells, bits):
            if b:
                out[j] += 1
                inn[k] += 1
        total += out == list(s) and inn == list(t)
    return total


def brute_permanent(a):
    a = np.asarray(a)
    n = a.shape[0]
    return sum(math.prod(int(a[i, p[i]]) for i in range(n)) for p in itertools.permutations(range(n)))


def brute_aut(edges, m, n):
    edges = set(edges)
    count = 0
    for g in itertools.permutations(range(m)):
        for h in itertools.permutations(range(n)):
            if {(g[j], h[k]) for j, k in edges} == edges:
                count += 1
    return count


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
