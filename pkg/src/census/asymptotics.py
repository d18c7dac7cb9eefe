"""Closed-form asymptotic estimates for dense 0-1 matrices and digraphs.

Every estimate is returned in natural-log space as a :class:`LogEstimate`
whose ``components`` sum to ``log_value``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .instances import (
    BipartiteInstance,
    DigraphInstance,
    InducedStats,
    StatsBundle,
    compute_stats,
    digraph_stats,
)

__all__ = [
    "EstimateError",
    "LogEstimate",
    "PermanentBounds",
    "AveragingResult",
    "log_factorial",
    "log_comb",
    "estimate_log_count_bipartite",
    "estimate_log_count_digraph",
    "miss_hit_factor",
    "log_prob_miss_hit",
    "log_prob_miss_hit_digraph",
    "induced_prob",
    "expected_isomorph_count",
    "expected_permanent_estimate",
    "permanent_bounds",
    "averaging_normalize",
]

COUNT_ERROR = "exp(O(n^-b))"
_EXACT_LIMIT = 20


class EstimateError(ValueError):
    """Inputs fall outside the domain where an estimate is defined."""


@dataclass(frozen=True)
class LogEstimate:
    log_value: float
    error_order: str = COUNT_ERROR
    components: dict[str, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def to_dict(self) -> dict:
        return {"log_value": self.log_value, "error_order": self.error_order,
                "components": dict(self.components)}


def _estimate(components: dict[str, float], error_order: str = COUNT_ERROR) -> LogEstimate:
    return LogEstimate(math.fsum(components.values()), error_order, components)


def log_factorial(n: int) -> float:
    if n < 0:
        raise ValueError("negative factorial")
    if n <= _EXACT_LIMIT:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def log_comb(n: int, k: int) -> float:
    """``log C(n, k)``; exact below 21, log-gamma above."""
    if not 0 <= k <= n:
        raise ValueError(f"C({n}, {k}) is zero")
    if n <= _EXACT_LIMIT:
        return math.log(math.comb(n, k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _check_density(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise EstimateError(f"density must lie strictly inside (0, 1), got {lam}")


def estimate_log_count_bipartite(inst: BipartiteInstance,
                                 stats: StatsBundle | None = None) -> LogEstimate:
    """Log of the asymptotic size of B(s, t, H).

    ``components["binomial"]`` is the log of the independent-margins product of
    binomials; ``components["exponent"]`` the correlation correction.
    """
    st = stats if stats is not None else compute_stats(inst)
    m, n = inst.m, inst.n
    _check_density(st.lam)
    x, y = st.x, st.y
    for j in range(m):
        if inst.s[j] > n - x[j]:
            raise EstimateError(f"row {j} needs {inst.s[j]} ones but has {n - x[j]} free cells")
    for k in range(n):
        if inst.t[k] > m - y[k]:
            raise EstimateError(f"column {k} needs {inst.t[k]} ones but has {m - y[k]} free cells")
    edges = sum(inst.s)  # == lam*m*n, integral by construction
    binom = (-log_comb(m * n - st.X_total, edges)
             + math.fsum(log_comb(n - int(x[j]), inst.s[j]) for j in range(m))
             + math.fsum(log_comb(m - int(y[k]), inst.t[k]) for k in range(n)))
    scale = 2 * st.A * m * n
    expo = -0.5 * (1 - st.R / scale) * (1 - st.C / scale) - st.Y / scale
    return _estimate({"binomial": binom, "exponent": expo})


def estimate_log_count_digraph(dig: DigraphInstance,
                               stats: StatsBundle | None = None) -> LogEstimate:
    """Log of the asymptotic number of loop-free digraphs with degrees ``(s, t)`` avoiding the pattern."""
    st = stats if stats is not None else digraph_stats(dig)
    n = dig.n
    _check_density(st.lam)
    x, y = st.x, st.y
    for j in range(n):
        if dig.s[j] > n - x[j] - 1 or dig.t[j] > n - y[j] - 1:
            raise EstimateError(f"vertex {j} has more required arcs than free slots")
    binom = (-log_comb(n * n - st.X_total - n, sum(dig.s))
             + math.fsum(log_comb(n - int(x[j]) - 1, dig.s[j])
                         + log_comb(n - int(y[j]) - 1, dig.t[j]) for j in range(n)))
    scale = 2 * st.A * n * n
    ds = np.asarray(dig.s, dtype=float) - st.s_bar
    dt = np.asarray(dig.t, dtype=float) - st.s_bar
    cross = float(np.sum(ds * dt))
    expo = -0.5 * (1 - st.R / scale) * (1 - st.C / scale) - (st.Y + cross) / scale
    return _estimate({"binomial": binom, "exponent": expo})


def _is_host_semiregular(st: StatsBundle) -> bool:
    return st.max_row_dev == 0.0 and st.max_col_dev == 0.0


def _is_pattern_semiregular(st: StatsBundle) -> bool:
    return len(set(st.x.tolist())) <= 1 and len(set(st.y.tolist())) <= 1


def _miss_general(st: StatsBundle, m: int, n: int) -> float:
    lam, X = st.lam, st.X_total
    R, C = st.R_hl, st.C_hl
    q = 1 - lam

    def pair(h, l, p):
        return R[h, l] / n**p + C[h, l] / m**p

    return (lam * X / (2 * q) * (1 / n + 1 / m)
            + lam * X**2 / (2 * q * m * n)
            - pair(1, 1, 1) / q
            - st.Y / (lam * q * m * n)
            + lam / (2 * q) * pair(0, 2, 1)
            + lam * (1 - 2 * lam) / (6 * q**2) * pair(0, 3, 2)
            - (1 - 2 * lam) / (2 * q**2) * pair(1, 2, 2)
            - pair(2, 1, 2) / (2 * q**2))


def _hit_general(st: StatsBundle, m: int, n: int) -> float:
    lam, X = st.lam, st.X_total
    R, C = st.R_hl, st.C_hl
    q = 1 - lam

    def pair(h, l, p):
        return R[h, l] / n**p + C[h, l] / m**p

    return (q * X / (2 * lam) * (1 / n + 1 / m)
            + q * X**2 / (2 * lam * m * n)
            + pair(1, 1, 1) / lam
            - pair(2, 1, 2) / (2 * lam**2)
            - (1 + lam) / (2 * lam) * pair(0, 2, 1)
            + (1 + 2 * lam) / (2 * lam**2) * pair(1, 2, 2)
            - (1 + lam) * (1 + 2 * lam) / (6 * lam**2) * pair(0, 3, 2)
            - (st.Y - st.Y01 - st.Y10 + st.Y11) / (lam * q * m * n))


def _miss_flat(st: StatsBundle, m: int, n: int) -> float:
    lam, X = st.lam, st.X_total
    R, C = st.R_hl, st.C_hl
    q = 1 - lam
    return (lam * X / (2 * q) * (1 / n + 1 / m)
            + lam * X**2 / (2 * q * m * n)
            - lam * st.Y11 / (q * m * n)
            - lam / (2 * q) * (R[0, 2] / n + C[0, 2] / m)
            - lam * (2 - lam) / (6 * q**2) * (R[0, 3] / n**2 + C[0, 3] / m**2))


def _hit_flat(st: StatsBundle, m: int, n: int) -> float:
    lam, X = st.lam, st.X_total
    R, C = st.R_hl, st.C_hl
    q = 1 - lam
    return (q * X / (2 * lam) * (1 / n + 1 / m)
            + q * X**2 / (2 * lam * m * n)
            - q * st.Y11 / (lam * m * n)
            - q / (2 * lam) * (R[0, 2] / n + C[0, 2] / m)
            - (1 - lam**2) / (6 * lam**2) * (R[0, 3] / n**2 + C[0, 3] / m**2))


def _pattern_degrees(st: StatsBundle, m: int, n: int) -> tuple[float, float]:
    return st.X_total / m, st.X_total / n


def _miss_reg(st: StatsBundle, m: int, n: int) -> float:
    lam, q = st.lam, 1 - st.lam
    x, y = _pattern_degrees(st, m, n)
    return (-lam * (x * y - x - y) / (2 * q)
            - (y * st.R + x * st.C) / (2 * q**2 * m * n)
            - st.Y_hat / (lam * q * m * n))


def _hit_reg(st: StatsBundle, m: int, n: int) -> float:
    lam, q = st.lam, 1 - st.lam
    x, y = _pattern_degrees(st, m, n)
    return (-q * (x * y - x - y) / (2 * lam)
            - (y * st.R + x * st.C) / (2 * lam**2 * m * n)
            - st.Y_hat / (lam * q * m * n))


_MISS_HIT = {
    ("general", "miss"): _miss_general,
    ("general", "hit"): _hit_general,
    ("host_semiregular", "miss"): _miss_flat,
    ("host_semiregular", "hit"): _hit_flat,
    ("pattern_semiregular", "miss"): _miss_reg,
    ("pattern_semiregular", "hit"): _hit_reg,
}


def miss_hit_factor(stats: StatsBundle, m: int, n: int, mode: str = "general",
                    which: str = "miss") -> LogEstimate:
    """Log of the miss/hit correction relative to independent edges of density ``lam``.

    ``mode`` picks the general display or one of the two semiregular
    simplifications; asking for a simplification whose regularity assumption
    fails raises :class:`EstimateError`.
    """
    try:
        f = _MISS_HIT[(mode, which)]
    except KeyError:
        raise ValueError(f"unknown mode/which {mode!r}/{which!r}") from None
    _check_density(stats.lam)
    if mode == "host_semiregular" and not _is_host_semiregular(stats):
        raise EstimateError("host_semiregular mode needs constant row and column sums")
    if mode == "pattern_semiregular" and not _is_pattern_semiregular(stats):
        raise EstimateError("pattern_semiregular mode needs constant pattern degrees")
    return _estimate({which: float(f(stats, m, n))})


def log_prob_miss_hit(inst: BipartiteInstance, which: str = "miss",
                      mode: str = "general") -> LogEstimate:
    """Log-probability that a uniform member of B(s, t) avoids (``miss``) or contains (``hit``) ``inst.forbidden``."""
    st = compute_stats(inst)
    base = math.log1p(-st.lam) if which == "miss" else math.log(st.lam)
    corr = miss_hit_factor(st, inst.m, inst.n, mode, which)
    return _estimate({"independent": st.X_total * base, **corr.components})


def log_prob_miss_hit_digraph(dig: DigraphInstance, which: str = "miss",
                              mode: str = "general") -> LogEstimate:
    """Digraph version: the bipartite correction with ``m = n`` and arc density ``p`` in front."""
    st = digraph_stats(dig)
    n = dig.n
    p = st.s_bar / (n - 1)
    _check_density(p)
    base = math.log1p(-p) if which == "miss" else math.log(p)
    corr = miss_hit_factor(st, n, n, mode, which)
    return _estimate({"independent": st.X_total * base, **corr.components})


def induced_prob(stats: InducedStats, base: StatsBundle, m: int, n: int,
                 kind: str = "bipartite") -> LogEstimate:
    """Log-probability that the window of a random member equals the pattern exactly.

    The host must have constant row and column sums.  For ``kind="digraph"``
    the window is the first ``J`` vertices and ``base`` holds the digraph
    statistics (``m == n``).
    """
    if not _is_host_semiregular(base):
        raise EstimateError("induced probabilities need a semiregular host")
    lam = base.lam
    _check_density(lam)
    A = lam * (1 - lam) / 2
    X = stats.X_total
    if kind == "bipartite":
        J, K = stats.J_win, stats.K_win
        w1, w2, w3 = stats.omega
        _, v2, v3 = stats.omega_p
        indep = X * math.log(lam) + (J * K - X) * math.log1p(-lam)
        corr = ((J * K / 2 + (1 - 2 * lam) * w1 / (4 * A)) * (1 / m + 1 / n)
                - w1**2 / (4 * A * m * n)
                - (n + K) * w2 / (4 * A * n**2)
                - (m + J) * v2 / (4 * A * m**2)
                - (1 - 2 * lam) * (w3 / n**2 + v3 / m**2) / (24 * A**2))
    elif kind == "digraph":
        if stats.chi is None:
            raise ValueError("digraph kind needs digraph window statistics")
        J = stats.J_win
        p = base.s_bar / (n - 1)
        _check_density(p)
        c1, c2, c3 = stats.chi
        _, d2, d3 = stats.chi_p
        indep = X * math.log(p) + (J * (J - 1) - X) * math.log1p(-p)
        corr = (J**2 / n + (1 - 2 * lam) * c1 / (2 * A * n)
                - c1**2 / (4 * A * n**2)
                - (n + J) * (c2 + d2) / (4 * A * n**2)
                - (1 - 2 * lam) * (c3 + d3) / (24 * A**2 * n**2))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return _estimate({"independent": indep, "exponent": corr})


def _log_size(class_size) -> float:
    if isinstance(class_size, (int, Fraction)):
        if class_size <= 0:
            raise ValueError("class size must be positive")
        return math.log(class_size)
    return math.log(float(class_size))


def expected_isomorph_count(x: int, y: int, X: int, class_size, host: StatsBundle,
                            m: int, n: int, which: str = "contained",
                            kind: str = "bipartite") -> LogEstimate:
    """Log of the expected number of isomorphs of a semiregular pattern contained in / disjoint from a random member.

    ``class_size`` is ``|I(H)|``, e.g. ``m! n! / aut(H)`` for bipartite
    patterns or ``n! / aut(X)`` for digraphs.
    """
    lam, R, C = host.lam, host.R, host.C
    _check_density(lam)
    q = 1 - lam
    if which not in ("contained", "disjoint"):
        raise ValueError(f"unknown which {which!r}")
    if kind == "bipartite":
        if X != x * m or X != y * n:
            raise EstimateError("pattern is not semiregular with these degrees")
        if which == "contained":
            indep = X * math.log(lam)
            corr = -q * (x * y - x - y) / (2 * lam) - (y * R + x * C) / (2 * lam**2 * m * n)
        else:
            indep = X * math.log1p(-lam)
            corr = -lam * (x * y - x - y) / (2 * q) - (y * R + x * C) / (2 * q**2 * m * n)
    elif kind == "digraph":
        if x != y or X != x * n:
            raise EstimateError("digraph pattern must have all in- and out-degrees equal")
        p = host.s_bar / (n - 1)
        _check_density(p)
        if which == "contained":
            indep = X * math.log(p)
            corr = -q * x * (x - 2) / (2 * lam) - (R + C) * x / (2 * lam**2 * n**2)
        else:
            indep = X * math.log1p(-p)
            corr = -lam * x * (x - 2) / (2 * q) - (R + C) * x / (2 * q**2 * n**2)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return _estimate({"independent": indep, "class_size": _log_size(class_size),
                      "exponent": corr})


def expected_permanent_estimate(n: int, lam: float, R: float = 0.0,
                                C: float = 0.0) -> LogEstimate:
    _check_density(lam)
    return _estimate({
        "factorial": log_factorial(n),
        "independent": n * math.log(lam),
        "exponent": (1 - lam) / (2 * lam) - (R + C) / (2 * lam**2 * n**2),
    })


@dataclass(frozen=True)
class PermanentBounds:
    """Log-space permanent bounds for ``n x n`` matrices with all line sums ``s``."""

    n: int
    s: int
    vdw_log: float
    gurvits_log: float
    minc_bregman_log: float

    def __post_init__(self):
        tol = 1e-9 * max(1.0, abs(self.minc_bregman_log))
        if not (self.vdw_log <= self.gurvits_log + tol
                and self.gurvits_log <= self.minc_bregman_log + tol):
            raise AssertionError(f"bound ordering violated for n={self.n}, s={self.s}")


def permanent_bounds(n: int, s: int) -> PermanentBounds:
    if not 1 <= s <= n - 1:
        raise ValueError(f"need 1 <= s <= n-1, got s={s}, n={n}")
    vdw = log_factorial(n) + n * math.log(s / n)
    # (s-1)^(s-1) is 1 when s == 1
    base = ((s - 1) * math.log(s - 1) if s > 1 else 0.0) - (s - 2) * math.log(s)
    gurvits = log_factorial(s) + (n - s) * base
    minc = (n / s) * log_factorial(s)
    return PermanentBounds(n, s, vdw, gurvits, minc)


@dataclass(frozen=True)
class AveragingResult:
    values: tuple[Fraction, ...]
    steps: int
    trace: tuple[tuple[int, int], ...] | None = None

    @property
    def array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def averaging_normalize(z: Sequence[float], record: bool = False) -> AveragingResult:
    """Average the first minimum with the first maximum until every entry lies in [-1/2, 1/2].

    Arithmetic is exact: entries are held as integers over a common power of
    two, so the sum never drifts.  ``record=True`` keeps the (min, max) index
    pair of every step.
    """
    vals = [float(v) for v in z]
    n = len(vals)
    if n == 0:
        return AveragingResult((), 0, () if record else None)
    if any(not -1.0 <= v <= 1.0 for v in vals):
        raise ValueError("entries must lie in [-1, 1]")
    if abs(math.fsum(vals)) > 1e-12:
        raise ValueError("entries must sum to zero")
    ratios = [v.as_integer_ratio() for v in vals]
    # n extra bits: at most n halvings are ever needed
    shift = max(d.bit_length() - 1 for _, d in ratios) + n + 1
    one = 1 << shift
    ints = [num * (one // den) for num, den in ratios]
    half = one // 2
    steps = 0
    trace = [] if record else None
    while True:
        lo = min(ints)
        hi = max(ints)
        if lo >= -half and hi <= half:
            break
        i = ints.index(lo)
        l = ints.index(hi)
        total = lo + hi
        if total & 1:
            raise ArithmeticError("ran out of exact precision")
        ints[i] = ints[l] = total >> 1
        steps += 1
        if record:
            trace.append((i, l))
    values = tuple(Fraction(v, one) for v in ints)
    return AveragingResult(values, steps, tuple(trace) if record else None)
