"""Exact counting oracles.

Counts are plain Python integers (arbitrary precision) and probabilities are
``fractions.Fraction`` values wrapped with their numerator/denominator counts.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .instances import BipartiteInstance, DigraphInstance, digraph_to_bipartite

__all__ = [
    "ResourceLimitError",
    "EmptyClassError",
    "ExactProbability",
    "count_exact",
    "count_exact_digraph",
    "enumerate_members",
    "permanent_exact",
    "prob_exact",
    "expected_permanent_exact",
    "aut_count",
    "aut_count_digraph",
]

BRUTE_MAX_CELLS = 28
AUTO_BRUTE_CELLS = 20
DP_MAX_ROWS = 14
DEFAULT_MAX_STATES = 10**8


class ResourceLimitError(RuntimeError):
    """The requested computation exceeds a configured engine limit."""


class EmptyClassError(ZeroDivisionError):
    """The host class B(s, t) has no members."""


@dataclass(frozen=True)
class ExactProbability:
    numerator: int
    denominator: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self) -> float:
        return self.numerator / self.denominator

    def log(self) -> float:
        if self.numerator == 0:
            return -math.inf
        return math.log(self.numerator) - math.log(self.denominator)


# --- brute force -----------------------------------------------------------

def _row_choices(inst: BipartiteInstance) -> list[list[tuple[int, ...]]]:
    """Per row, the admissible column sets sorted so the 0-1 rows are lexicographic."""
    h = inst.mask()
    choices = []
    for j in range(inst.m):
        allowed = [k for k in range(inst.n) if not h[j, k]]
        combos = list(itertools.combinations(allowed, inst.s[j]))
        # lexicographic on the 0-1 vector: a 1 in an early column sorts last
        combos.sort(key=lambda c: tuple(1 if k in c else 0 for k in range(inst.n)))
        choices.append(combos)
    return choices


def enumerate_members(inst: BipartiteInstance) -> Iterator[np.ndarray]:
    """Yield every member of B(s, t, H) as an ``m x n`` int array, row-major lexicographic."""
    m, n = inst.m, inst.n
    choices = _row_choices(inst)
    rem = list(inst.t)
    rows: list[tuple[int, ...]] = []

    def rec(j):
        if j == m:
            mat = np.zeros((m, n), dtype=np.int64)
            for jj, cols in enumerate(rows):
                mat[jj, list(cols)] = 1
            yield mat
            return
        left = m - j - 1
        for cols in choices[j]:
            if any(rem[k] == 0 for k in cols):
                continue
            for k in cols:
                rem[k] -= 1
            if all(r <= left for r in rem):
                rows.append(cols)
                yield from rec(j + 1)
                rows.pop()
            for k in cols:
                rem[k] += 1

    if sum(inst.s) == sum(inst.t):
        yield from rec(0)


def _count_brute(inst: BipartiteInstance) -> int:
    if inst.m * inst.n > BRUTE_MAX_CELLS:
        raise ResourceLimitError(
            f"brute engine needs m*n <= {BRUTE_MAX_CELLS}, got {inst.m * inst.n}")
    m = inst.m
    choices = _row_choices(inst)
    rem = list(inst.t)

    def rec(j):
        if j == m:
            return 1
        left = m - j - 1
        total = 0
        for cols in choices[j]:
            if any(rem[k] == 0 for k in cols):
                continue
            for k in cols:
                rem[k] -= 1
            if all(r <= left for r in rem):
                total += rec(j + 1)
            for k in cols:
                rem[k] += 1
        return total

    return rec(0)


# --- column dynamic programme ----------------------------------------------

def _count_dp(inst: BipartiteInstance, max_states: int, max_rows: int) -> int:
    if inst.m > max_rows and inst.n < inst.m:
        inst = inst.transpose()
    m, n = inst.m, inst.n
    if m > max_rows:
        raise ResourceLimitError(f"dp engine needs min(m, n) <= {max_rows}, got {m}x{n}")
    if any(v > n for v in inst.s):
        return 0
    h = inst.mask()
    # columns carrying forbidden cells go first so that row classes merge early
    order = sorted(range(n), key=lambda k: (not h[:, k].any(), -inst.t[k], k))
    pos = {k: i for i, k in enumerate(order)}
    t = [inst.t[k] for k in order]

    # a row class is (remaining forbidden positions, residual row sum)
    start: dict[tuple, int] = {}
    for j in range(m):
        sig = tuple(sorted(pos[k] for k in range(n) if h[j, k]))
        key = (sig, inst.s[j])
        start[key] = start.get(key, 0) + 1
    layer = {tuple(sorted(start.items())): 1}

    for c in range(n):
        tc = t[c]
        cols_after = n - c - 1
        nxt: dict[tuple, int] = {}
        for state, ways in layer.items():
            groups = []
            for (sig, r), cnt in state:
                blocked = bool(sig) and sig[0] == c
                nsig = sig[1:] if blocked else sig
                room = cols_after - len(nsig)
                lo = cnt if r > room else 0
                hi = cnt if not blocked and r >= 1 and r - 1 <= room else 0
                if lo > hi:
                    break
                groups.append((nsig, r, cnt, lo, hi))
            else:
                _spread(groups, tc, ways, nxt)
        if len(nxt) > max_states:
            raise ResourceLimitError(f"dp state bound {max_states} exceeded at column {c}")
        layer = nxt
    return sum(layer.values())


def _spread(groups, tc, ways, out):
    """Distribute ``tc`` ones over row classes, accumulating successor states into ``out``."""
    g = len(groups)
    cap_after = [0] * (g + 1)
    lo_after = [0] * (g + 1)
    for i in range(g - 1, -1, -1):
        cap_after[i] = cap_after[i + 1] + groups[i][4]
        lo_after[i] = lo_after[i + 1] + groups[i][3]
    picked = [0] * g

    def rec(i, left, w):
        if i == g:
            acc: dict[tuple, int] = {}
            for (nsig, r, cnt, _, _), k in zip(groups, picked):
                if k:
                    acc[(nsig, r - 1)] = acc.get((nsig, r - 1), 0) + k
                if cnt - k:
                    acc[(nsig, r)] = acc.get((nsig, r), 0) + cnt - k
            key = tuple(sorted(acc.items()))
            out[key] = out.get(key, 0) + w
            return
        nsig, r, cnt, lo, hi = groups[i]
        kmin = max(lo, left - cap_after[i + 1])
        kmax = min(hi, left - lo_after[i + 1])
        for k in range(kmin, kmax + 1):
            picked[i] = k
            rec(i + 1, left - k, w * math.comb(cnt, k))
        picked[i] = 0

    if lo_after[0] <= tc <= cap_after[0]:
        rec(0, tc, ways)


def count_exact(inst: BipartiteInstance, engine: str = "auto", *,
                max_states: int = DEFAULT_MAX_STATES, max_rows: int = DP_MAX_ROWS) -> int:
    """Number of 0-1 matrices with margins ``(s, t)`` and zeros on ``inst.forbidden``.

    ``engine`` is ``"brute"`` (row backtracking, ``m*n <= 28``), ``"dp"``
    (column-by-column over merged row classes) or ``"auto"``.
    """
    if engine == "auto":
        engine = "brute" if inst.m * inst.n <= AUTO_BRUTE_CELLS else "dp"
    if engine == "brute":
        return _count_brute(inst)
    if engine == "dp":
        return _count_dp(inst, max_states, max_rows)
    raise ValueError(f"unknown engine {engine!r}")


def count_exact_digraph(dig: DigraphInstance, engine: str = "auto", **kw) -> int:
    return count_exact(digraph_to_bipartite(dig), engine, **kw)


# --- permanents ------------------------------------------------------------

# 2^n * n^n stays inside int64 up to here
_VECTOR_PERM_MAX = 12


def _permanent_small(a: np.ndarray) -> int:
    n = a.shape[0]
    subsets = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    rowsums = subsets @ a.T
    signs = np.where(subsets.sum(axis=1) % 2 == n % 2, 1, -1)
    return int(np.sum(signs * np.prod(rowsums, axis=1)))


def permanent_exact(matrix) -> int:
    """Permanent of a square 0-1 matrix by Ryser's formula in Gray-code order."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1
    if n > 30:
        raise ResourceLimitError("permanent_exact supports n <= 30")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("entries must be 0 or 1")
    if n <= _VECTOR_PERM_MAX:
        return _permanent_small(a.astype(np.int64))
    cols = [[int(v) for v in a[:, k]] for k in range(n)]
    rowsum = [0] * n
    in_set = [False] * n
    total = 0
    sign = 1  # (-1)^|S|, flipped as each column enters or leaves S
    for i in range(1, 1 << n):
        k = (i & -i).bit_length() - 1
        col = cols[k]
        if in_set[k]:
            for r in range(n):
                rowsum[r] -= col[r]
        else:
            for r in range(n):
                rowsum[r] += col[r]
        in_set[k] = not in_set[k]
        sign = -sign
        prod = 1
        for v in rowsum:
            if v == 0:
                prod = 0
                break
            prod *= v
        if prod:
            total += sign * prod
    return total * (-1) ** n


# --- probabilities ---------------------------------------------------------

def _host_count(inst: BipartiteInstance, engine: str, kw) -> int:
    host = BipartiteInstance(inst.m, inst.n, inst.s, inst.t)
    den = count_exact(host, engine, **kw)
    if den == 0:
        raise EmptyClassError(f"B(s, t) is empty for s={inst.s}, t={inst.t}")
    return den


def _reduced(inst: BipartiteInstance, pattern: Iterable[tuple[int, int]],
             forbidden: Iterable[tuple[int, int]]) -> BipartiteInstance | None:
    s = list(inst.s)
    t = list(inst.t)
    for j, k in pattern:
        s[j] -= 1
        t[k] -= 1
    if min(s + t) < 0:
        raise ValueError("pattern degrees exceed the margins")
    return BipartiteInstance(inst.m, inst.n, s, t, frozenset(forbidden))


def prob_exact(inst: BipartiteInstance, pattern: Iterable[tuple[int, int]],
               mode: str = "disjoint", window: tuple[int, int] | None = None,
               engine: str = "auto", **kw) -> ExactProbability:
    """Exact probability, in uniform B(s, t), that a random member relates to ``pattern``.

    ``mode`` is ``"disjoint"``, ``"contains"`` or ``"induced"``; the induced
    mode needs ``window=(J, K)`` and means the leading ``J x K`` block equals
    the pattern exactly.
    """
    pattern = frozenset((int(j), int(k)) for j, k in pattern)
    for j, k in pattern:
        if not (0 <= j < inst.m and 0 <= k < inst.n):
            raise ValueError(f"pattern cell ({j}, {k}) outside the matrix")
    den = _host_count(inst, engine, kw)
    if mode == "disjoint":
        num = count_exact(inst.with_forbidden(pattern), engine, **kw)
    elif mode == "contains":
        num = count_exact(_reduced(inst, pattern, pattern), engine, **kw)
    elif mode == "induced":
        if window is None:
            raise ValueError("induced mode needs a window (J, K)")
        J, K = window
        if any(j >= J or k >= K for j, k in pattern):
            raise ValueError("pattern is not confined to the window")
        block = [(j, k) for j in range(J) for k in range(K)]
        num = count_exact(_reduced(inst, pattern, block), engine, **kw)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return ExactProbability(num, den)


def expected_permanent_exact(inst: BipartiteInstance, path: str = "auto",
                             engine: str = "auto", **kw) -> Fraction:
    """Average permanent over the uniform class B(s, t) of square matrices.

    ``path="enumerate"`` averages ``permanent_exact`` over every member
    (``n <= 7``).  ``path="symmetry"`` needs constant margins and uses
    ``n! * P(the identity permutation is covered)`` (``n <= 12``).
    """
    n = inst.n
    if inst.m != n:
        raise ValueError("expected permanent needs a square instance")
    if inst.forbidden:
        raise ValueError("expected permanent is defined on B(s, t) without forbidden cells")
    constant = len(set(inst.s)) == 1 and len(set(inst.t)) == 1
    if path == "auto":
        path = "symmetry" if constant else "enumerate"
    if path == "enumerate":
        if n > 7:
            raise ResourceLimitError("enumeration path supports n <= 7")
        total = count = 0
        for mat in enumerate_members(inst):
            total += permanent_exact(mat)
            count += 1
        if count == 0:
            raise EmptyClassError("B(s, t) is empty")
        return Fraction(total, count)
    if path == "symmetry":
        if not constant:
            raise ValueError("symmetry path needs constant margins")
        if n > 12:
            raise ResourceLimitError("symmetry path supports n <= 12")
        den = _host_count(inst, engine, kw)
        if inst.s[0] == 0:
            return Fraction(0)
        diag = [(j, j) for j in range(n)]
        num = count_exact(_reduced(inst, diag, diag), engine, **kw)
        return Fraction(math.factorial(n) * num, den)
    raise ValueError(f"unknown path {path!r}")


# --- automorphisms ---------------------------------------------------------

AUT_MAX_INCIDENT = 10


def _count_row_maps(rows: Sequence[int], nbrs: dict[int, frozenset],
                    col_nbrs: dict[int, frozenset]) -> int:
    """Count row permutations ``g`` that extend to an automorphism, times the column choices.

    For a fixed ``g`` the admissible column maps number the product over
    distinct column neighbourhoods of (multiplicity)!, provided ``g`` maps the
    multiset of column neighbourhoods onto itself.
    """
    cols = sorted(col_nbrs)
    target = sorted(tuple(sorted(col_nbrs[k])) for k in cols)
    multiplicity: dict[frozenset, int] = {}
    for k in cols:
        multiplicity[col_nbrs[k]] = multiplicity.get(col_nbrs[k], 0) + 1
    col_factor = math.prod(math.factorial(c) for c in multiplicity.values())

    deg = {j: len(nbrs[j]) for j in rows}
    image: dict[int, int] = {}
    used: set[int] = set()
    total = 0

    def signature(assigned, mapped):
        # per column, membership pattern over the assigned rows (in assignment order)
        return sorted(tuple(r in col_nbrs[k] for r in assigned) for k in cols), \
            sorted(tuple(r in col_nbrs[k] for r in mapped) for k in cols)

    def rec(i):
        nonlocal total
        if i == len(rows):
            mapped = sorted(tuple(sorted(image[j] for j in col_nbrs[k])) for k in cols)
            if mapped == target:
                total += 1
            return
        j = rows[i]
        for g in rows:
            if g in used or deg[g] != deg[j]:
                continue
            image[j] = g
            used.add(g)
            assigned = rows[: i + 1]
            a, b = signature(assigned, [image[r] for r in assigned])
            if a == b:
                rec(i + 1)
            used.discard(g)
            del image[j]

    rec(0)
    return total * col_factor


def aut_count(pattern: Iterable[tuple[int, int]], m: int, n: int) -> int:
    """Number of colour-preserving automorphisms of the bipartite graph ``pattern`` on ``(m, n)``."""
    edges = frozenset((int(j), int(k)) for j, k in pattern)
    rows = sorted({j for j, _ in edges})
    cols = sorted({k for _, k in edges})
    if any(not (0 <= j < m) for j in rows) or any(not (0 <= k < n) for k in cols):
        raise ValueError("pattern outside the vertex range")
    if len(rows) > AUT_MAX_INCIDENT or len(cols) > AUT_MAX_INCIDENT:
        raise ResourceLimitError(f"aut_count supports at most {AUT_MAX_INCIDENT} incident vertices per side")
    nbrs = {j: frozenset(k for jj, k in edges if jj == j) for j in rows}
    col_nbrs = {k: frozenset(j for j, kk in edges if kk == k) for k in cols}
    free = math.factorial(m - len(rows)) * math.factorial(n - len(cols))
    if not edges:
        return free
    return free * _count_row_maps(rows, nbrs, col_nbrs)


def aut_count_digraph(arcs: Iterable[tuple[int, int]], n: int) -> int:
    """Number of automorphisms of the digraph ``arcs`` on ``n`` vertices."""
    arcs = frozenset((int(j), int(k)) for j, k in arcs)
    verts = sorted({v for a in arcs for v in a})
    if len(verts) > AUT_MAX_INCIDENT:
        raise ResourceLimitError(f"aut_count_digraph supports at most {AUT_MAX_INCIDENT} incident vertices")
    free = math.factorial(n - len(verts))
    out_deg = {v: sum(1 for a in arcs if a[0] == v) for v in verts}
    in_deg = {v: sum(1 for a in arcs if a[1] == v) for v in verts}
    image: dict[int, int] = {}
    used: set[int] = set()
    total = 0

    def rec(i):
        nonlocal total
        if i == len(verts):
            total += 1
            return
        v = verts[i]
        for g in verts:
            if g in used or out_deg[g] != out_deg[v] or in_deg[g] != in_deg[v]:
                continue
            image[v] = g
            ok = all(
                ((image[u], image[w]) in arcs) == ((u, w) in arcs)
                for u in verts[: i + 1] for w in verts[: i + 1]
            )
            if ok:
                used.add(g)
                rec(i + 1)
                used.discard(g)
            del image[v]

    rec(0)
    return free * total
