import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from census.exact import (
    EmptyClassError,
    ResourceLimitError,
    aut_count,
    aut_count_digraph,
    count_exact,
    count_exact_digraph,
    enumerate_members,
    expected_permanent_exact,
    permanent_exact,
    prob_exact,
)
from census.instances import BipartiteInstance as I, DigraphInstance

from conftest import brute_aut, brute_count, brute_digraph_count, brute_members, brute_permanent


# frozen oracle values: full 2^(mn) enumeration
def test_spec_examples():
    assert count_exact(I(3, 3, [2, 2, 2], [2, 2, 2])) == 6
    assert count_exact(I(2, 2, [1, 1], [1, 1], {(0, 0)})) == 1
    assert count_exact(I(2, 2, [1, 1], [1, 1])) == 2
    assert count_exact(I(2, 2, [2, 0], [1, 1], {(0, 0)})) == 0


def test_frozen_small_counts():
    # 4x4, all sums 2: 90 (OEIS A001499)
    assert brute_count(4, 4, [2] * 4, [2] * 4) == 90
    for eng in ("brute", "dp"):
        assert count_exact(I.regular(4, 4, 2), eng) == 90
        assert count_exact(I.regular(6, 6, 3), eng if eng == "dp" else "dp") == 297200


def test_known_sequence_regular():
    # number of n x n 0-1 matrices with all line sums 2 (A001499) and 3 (A001501)
    two = [1, 0, 1, 6, 90, 2040, 67950, 3110940, 187530840]
    for n in range(2, 9):
        assert count_exact(I.regular(n, n, 2), "dp") == two[n]
    three = {3: 1, 4: 24, 5: 2040, 6: 297200, 7: 68938800}
    for n, v in three.items():
        assert count_exact(I.regular(n, n, 3), "dp") == v


@st.composite
def small_instances(draw, max_cells=12):
    m = draw(st.integers(1, 4))
    n = draw(st.integers(1, max(1, min(4, max_cells // m))))
    bits = draw(st.lists(st.integers(0, 1), min_size=m * n, max_size=m * n))
    mat = np.array(bits).reshape(m, n)
    cells = [(j, k) for j in range(m) for k in range(n)]
    forb = draw(st.sets(st.sampled_from(cells), max_size=3))
    # margins come from a matrix that may itself use forbidden cells, so empty classes occur
    return I(m, n, mat.sum(axis=1), mat.sum(axis=0), forb)


@settings(max_examples=150, deadline=None)
@given(small_instances())
def test_engines_match_oracle(inst):
    want = brute_count(inst.m, inst.n, list(inst.s), list(inst.t), inst.forbidden)
    assert count_exact(inst, "brute") == want
    assert count_exact(inst, "dp") == want
    assert count_exact(inst) == want


@settings(max_examples=60, deadline=None)
@given(small_instances(), st.randoms(use_true_random=False))
def test_relabel_and_transpose_invariance(inst, rnd):
    base = count_exact(inst, "dp")
    assert count_exact(inst.transpose(), "dp") == base
    rp = list(range(inst.m))
    cp = list(range(inst.n))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    assert count_exact(inst.permute(rp, cp), "dp") == base


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_complement_duality(inst):
    m, n = inst.m, inst.n
    free_r = [n - sum(1 for j, _ in inst.forbidden if j == r) for r in range(m)]
    free_c = [m - sum(1 for _, k in inst.forbidden if k == c) for c in range(n)]
    s2 = [f - v for f, v in zip(free_r, inst.s)]
    t2 = [f - v for f, v in zip(free_c, inst.t)]
    if min(s2 + t2) < 0:
        return
    comp = I(m, n, s2, t2, inst.forbidden)
    assert count_exact(comp, "dp") == count_exact(inst, "dp")


@settings(max_examples=40, deadline=None)
@given(small_instances())
def test_last_column_recurrence(inst):
    m, n = inst.m, inst.n
    if n < 2:
        return
    last = n - 1
    allowed = [j for j in range(m) if (j, last) not in inst.forbidden]
    total = 0
    for rows in itertools.combinations(allowed, inst.t[last]):
        s = list(inst.s)
        for j in rows:
            s[j] -= 1
        if min(s) < 0 or max(s) > n - 1:
            continue
        sub = I(m, n - 1, s, list(inst.t[:last]), {(j, k) for j, k in inst.forbidden if k < last})
        total += count_exact(sub, "dp")
    assert total == count_exact(inst, "dp")


def test_enumeration_matches_oracle_and_order():
    inst = I(3, 4, [2, 1, 2], [1, 2, 1, 1], {(0, 0), (2, 3)})
    got = list(enumerate_members(inst))
    want = brute_members(3, 4, [2, 1, 2], [1, 2, 1, 1], inst.forbidden)
    keys = [tuple(a.ravel()) for a in got]
    assert keys == sorted(keys)
    assert sorted(keys) == sorted(tuple(a.ravel()) for a in want)
    assert len(got) == count_exact(inst)
    assert list(enumerate_members(I(2, 2, [2, 0], [1, 1], {(0, 0)}))) == []


def test_resource_limits():
    with pytest.raises(ResourceLimitError):
        count_exact(I.regular(6, 6, 3), "brute")
    with pytest.raises(ResourceLimitError):
        count_exact(I.regular(20, 20, 10), "dp")
    with pytest.raises(ResourceLimitError):
        count_exact(I.regular(12, 12, 6), "dp", max_states=10)


def test_digraph_counts():
    for n in (3, 4):
        for s in range(n):
            want = brute_digraph_count(n, [s] * n, [s] * n)
            assert count_exact_digraph(DigraphInstance(n, [s] * n, [s] * n)) == want
    d = DigraphInstance(4, [2, 1, 1, 2], [1, 2, 2, 1], {(0, 1), (2, 3)})
    assert count_exact_digraph(d) == brute_digraph_count(4, d.s, d.t, d.forbidden_arcs)
    # all-ones regular: derangements
    assert count_exact_digraph(DigraphInstance(5, [1] * 5, [1] * 5)) == 44


def test_permanent():
    assert permanent_exact(np.ones((3, 3), dtype=int)) == 6
    assert permanent_exact(np.eye(4, dtype=int)) == 1
    assert permanent_exact(np.zeros((0, 0), dtype=int)) == 1
    rng = np.random.default_rng(7)
    for n in range(1, 8):
        a = rng.integers(0, 2, size=(n, n))
        assert permanent_exact(a) == brute_permanent(a)
    assert permanent_exact(np.ones((12, 12), dtype=int)) == math.factorial(12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_permanent_invariant_under_permutation(n, rnd):
    rng = np.random.default_rng(rnd.randrange(2**32))
    a = rng.integers(0, 2, size=(n, n))
    p = rng.permutation(n)
    q = rng.permutation(n)
    assert permanent_exact(a[p][:, q]) == permanent_exact(a) == permanent_exact(a.T)


def test_prob_modes_against_enumeration():
    host = I(4, 4, [2, 2, 2, 2], [2, 2, 2, 2])
    mats = brute_members(4, 4, host.s, host.t)
    pat = {(0, 0), (1, 1)}
    p = prob_exact(host, pat, "disjoint")
    assert p.value == Fraction(sum(all(a[j, k] == 0 for j, k in pat) for a in mats), len(mats))
    p = prob_exact(host, pat, "contains")
    assert p.value == Fraction(sum(all(a[j, k] == 1 for j, k in pat) for a in mats), len(mats))
    p = prob_exact(host, pat, "induced", (2, 2))
    want = sum(all(a[j, k] == ((j, k) in pat) for j in range(2) for k in range(2)) for a in mats)
    assert p.value == Fraction(want, len(mats))
    assert p.denominator == 90 and float(p) == pytest.approx(want / 90)


def test_induced_probs_sum_to_one():
    host = I.regular(4, 4, 2)
    total = Fraction(0)
    cells = [(j, k) for j in range(2) for k in range(2)]
    for r in range(5):
        for pat in itertools.combinations(cells, r):
            total += prob_exact(host, pat, "induced", (2, 2)).value
    assert total == 1


def test_prob_errors():
    with pytest.raises(EmptyClassError):
        prob_exact(I(2, 3, [3, 0], [2, 0, 1]), (), "disjoint")
    with pytest.raises(ValueError):
        prob_exact(I.regular(3, 3, 1), {(0, 0)}, "induced")
    with pytest.raises(ValueError):
        prob_exact(I.regular(3, 3, 1), {(0, 0)}, "nope")


def test_expected_permanent_paths_agree():
    for n, s in ((3, 1), (4, 2), (5, 2), (5, 3)):
        inst = I.regular(n, n, s)
        a = expected_permanent_exact(inst, "enumerate")
        b = expected_permanent_exact(inst, "symmetry")
        assert a == b
    assert expected_permanent_exact(I.regular(4, 4, 2)) == Fraction(12, 5)
    # irregular margins fall back to enumeration
    inst = I(4, 4, [3, 2, 2, 1], [2, 2, 2, 2])
    mats = brute_members(4, 4, inst.s, inst.t)
    want = Fraction(sum(brute_permanent(a) for a in mats), len(mats))
    assert expected_permanent_exact(inst) == want


def test_aut_counts_match_brute():
    cases = [
        ((), 3, 3),
        ({(0, 0)}, 3, 3),
        ({(0, 0), (1, 1)}, 3, 3),
        ({(0, 0), (0, 1), (1, 0)}, 3, 4),
        ({(0, 0), (0, 1), (1, 0), (1, 1)}, 3, 3),
        ({(0, 0), (1, 1), (2, 2)}, 4, 4),
        ({(0, 1), (1, 2), (2, 0), (0, 0)}, 4, 3),
    ]
    for edges, m, n in cases:
        assert aut_count(edges, m, n) == brute_aut(edges, m, n), edges


def test_aut_spec_values():
    assert aut_count({(0, 0)}, 4, 5) == math.factorial(3) * math.factorial(4)
    assert aut_count({(0, 0), (1, 1)}, 4, 4) == 2 * 2 * 2
    assert aut_count_digraph({(0, 1)}, 4) == 2
    assert aut_count_digraph({(0, 1), (1, 0)}, 3) == 2
    assert aut_count_digraph({(0, 1), (1, 2), (2, 0)}, 3) == 3


@settings(max_examples=30, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 3)), max_size=6))
def test_aut_property(edges):
    assert aut_count(edges, 3, 4) == brute_aut(edges, 3, 4)
