"""Problem instances, their statistics, and applicability diagnostics.

Indices are 0-based everywhere in this package.  A bipartite instance is an
``m x n`` zero-one matrix problem: row sums ``s``, column sums ``t`` and a set
of forbidden cells (the edge set of the pattern graph ``H``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "InstanceError",
    "BipartiteInstance",
    "DigraphInstance",
    "StatsBundle",
    "InducedStats",
    "Check",
    "ApplicabilityReport",
    "compute_stats",
    "digraph_stats",
    "induced_stats",
    "induced_stats_digraph",
    "check_applicability",
    "check_applicability_digraph",
    "digraph_to_bipartite",
    "load_instance",
    "load_digraph",
]


class InstanceError(ValueError):
    """An instance violates its structural invariants."""


def _pairs(raw: Iterable[Sequence[int]], what: str) -> frozenset[tuple[int, int]]:
    out = []
    for p in raw:
        if len(p) != 2:
            raise InstanceError(f"{what} entry {p!r} is not a pair")
        out.append((int(p[0]), int(p[1])))
    if len(set(out)) != len(out):
        raise InstanceError(f"duplicate {what} pairs")
    return frozenset(out)


@dataclass(frozen=True)
class BipartiteInstance:
    m: int
    n: int
    s: tuple[int, ...]
    t: tuple[int, ...]
    forbidden: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))
        object.__setattr__(self, "t", tuple(int(v) for v in self.t))
        if not isinstance(self.forbidden, frozenset):
            object.__setattr__(self, "forbidden", _pairs(self.forbidden, "forbidden"))
        m, n = self.m, self.n
        if m <= 0 or n <= 0:
            raise InstanceError("m and n must be positive")
        if len(self.s) != m or len(self.t) != n:
            raise InstanceError("length of s/t does not match m/n")
        if any(v < 0 or v > n for v in self.s):
            raise InstanceError("row sums must lie in [0, n]")
        if any(v < 0 or v > m for v in self.t):
            raise InstanceError("column sums must lie in [0, m]")
        if sum(self.s) != sum(self.t):
            raise InstanceError(f"sum(s)={sum(self.s)} != sum(t)={sum(self.t)}")
        for j, k in self.forbidden:
            if not (0 <= j < m and 0 <= k < n):
                raise InstanceError(f"forbidden cell ({j}, {k}) outside {m}x{n}")

    @property
    def edges(self) -> int:
        return sum(self.s)

    def mask(self) -> np.ndarray:
        """Boolean ``m x n`` indicator of the forbidden cells."""
        h = np.zeros((self.m, self.n), dtype=bool)
        for j, k in self.forbidden:
            h[j, k] = True
        return h

    def pattern_degrees(self) -> tuple[np.ndarray, np.ndarray]:
        h = self.mask()
        return h.sum(axis=1).astype(np.int64), h.sum(axis=0).astype(np.int64)

    def transpose(self) -> "BipartiteInstance":
        return BipartiteInstance(
            self.n, self.m, self.t, self.s, frozenset((k, j) for j, k in self.forbidden)
        )

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "BipartiteInstance":
        """Relabel so that old row ``j`` becomes ``row_perm[j]`` (same for columns)."""
        s = [0] * self.m
        t = [0] * self.n
        for j, v in enumerate(self.s):
            s[row_perm[j]] = v
        for k, v in enumerate(self.t):
            t[col_perm[k]] = v
        forb = frozenset((row_perm[j], col_perm[k]) for j, k in self.forbidden)
        return BipartiteInstance(self.m, self.n, s, t, forb)

    def with_forbidden(self, forbidden: Iterable[tuple[int, int]]) -> "BipartiteInstance":
        return BipartiteInstance(self.m, self.n, self.s, self.t, _pairs(forbidden, "forbidden"))

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "s": list(self.s),
            "t": list(self.t),
            "forbidden": [list(p) for p in sorted(self.forbidden)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "BipartiteInstance":
        try:
            return cls(int(d["m"]), int(d["n"]), d["s"], d["t"],
                       _pairs(d.get("forbidden", []), "forbidden"))
        except KeyError as exc:
            raise InstanceError(f"missing field {exc}") from None

    @classmethod
    def regular(cls, m: int, n: int, s: int, forbidden=()) -> "BipartiteInstance":
        if (m * s) % n:
            raise InstanceError("m*s must be divisible by n")
        return cls(m, n, [s] * m, [m * s // n] * n, _pairs(forbidden, "forbidden"))


@dataclass(frozen=True)
class DigraphInstance:
    n: int
    s: tuple[int, ...]
    t: tuple[int, ...]
    forbidden_arcs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))
        object.__setattr__(self, "t", tuple(int(v) for v in self.t))
        if not isinstance(self.forbidden_arcs, frozenset):
            object.__setattr__(self, "forbidden_arcs", _pairs(self.forbidden_arcs, "arc"))
        n = self.n
        if n <= 0:
            raise InstanceError("n must be positive")
        if len(self.s) != n or len(self.t) != n:
            raise InstanceError("length of s/t does not match n")
        if any(v < 0 or v > n - 1 for v in self.s + self.t):
            raise InstanceError("degrees must lie in [0, n-1]")
        if sum(self.s) != sum(self.t):
            raise InstanceError(f"sum(s)={sum(self.s)} != sum(t)={sum(self.t)}")
        for j, k in self.forbidden_arcs:
            if j == k:
                raise InstanceError(f"loop ({j}, {j}) in forbidden arcs")
            if not (0 <= j < n and 0 <= k < n):
                raise InstanceError(f"arc ({j}, {k}) outside vertex range")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": list(self.s),
            "t": list(self.t),
            "arcs": [list(p) for p in sorted(self.forbidden_arcs)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DigraphInstance":
        try:
            return cls(int(d["n"]), d["s"], d["t"], _pairs(d.get("arcs", []), "arc"))
        except KeyError as exc:
            raise InstanceError(f"missing field {exc}") from None


def load_instance(text: str) -> BipartiteInstance:
    return BipartiteInstance.from_dict(json.loads(text))


def load_digraph(text: str) -> DigraphInstance:
    return DigraphInstance.from_dict(json.loads(text))


def digraph_to_bipartite(dig: DigraphInstance) -> BipartiteInstance:
    """Forbid every arc of the pattern plus the whole diagonal.

    Members of the resulting class are exactly the adjacency matrices of
    loop-free digraphs avoiding the pattern.
    """
    forb = set(dig.forbidden_arcs)
    if any(j == k for j, k in forb):
        raise InstanceError("loop in forbidden arcs")
    forb.update((j, j) for j in range(dig.n))
    return BipartiteInstance(dig.n, dig.n, dig.s, dig.t, frozenset(forb))


def _frozen(a) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StatsBundle:
    """Degree and pattern statistics feeding the asymptotic formulas.

    ``R_hl[h, l]`` is the sum over rows of ``delta_j**h * x_j**l`` and
    ``C_hl`` the column analogue, for ``h`` in 0..2 and ``l`` in 0..3.
    """

    m: int
    n: int
    s_bar: float
    t_bar: float
    lam: float
    A: float
    x: np.ndarray
    y: np.ndarray
    delta: np.ndarray
    eta: np.ndarray
    X_total: int
    Y: float
    R: float
    C: float
    R_hl: np.ndarray
    C_hl: np.ndarray
    Y11: float
    Y01: float
    Y10: float
    Y_hat: float
    J_vec: np.ndarray
    K_vec: np.ndarray
    max_row_dev: float
    max_col_dev: float

    def transpose(self) -> "StatsBundle":
        return StatsBundle(
            self.n, self.m, self.t_bar, self.s_bar, self.lam, self.A,
            self.y, self.x, self.eta, self.delta, self.X_total, self.Y,
            self.C, self.R, self.C_hl, self.R_hl, self.Y11, self.Y10, self.Y01,
            self.Y_hat, self.K_vec, self.J_vec, self.max_col_dev, self.max_row_dev,
        )


def compute_stats(inst: BipartiteInstance) -> StatsBundle:
    m, n = inst.m, inst.n
    s = np.asarray(inst.s, dtype=float)
    t = np.asarray(inst.t, dtype=float)
    s_bar = np.sum(s) / m
    t_bar = np.sum(t) / n
    lam = s_bar / n
    A = lam * (1.0 - lam) / 2.0
    x_int, y_int = inst.pattern_degrees()
    x = x_int.astype(float)
    y = y_int.astype(float)
    ds = s - s_bar
    dt = t - t_bar
    delta = ds + lam * x
    eta = dt + lam * y

    # np.sum reduces float arrays pairwise
    R_hl = np.array([[np.sum(delta**h * x**l) for l in range(4)] for h in range(3)])
    C_hl = np.array([[np.sum(eta**h * y**l) for l in range(4)] for h in range(3)])

    cells = sorted(inst.forbidden)
    if cells:
        rows = np.array([j for j, _ in cells])
        cols = np.array([k for _, k in cells])
        Y = np.sum(delta[rows] * eta[cols])
        Y11 = np.sum(x[rows] * y[cols])
        Y01 = np.sum(delta[rows] * y[cols])
        Y10 = np.sum(x[rows] * eta[cols])
        Y_hat = np.sum(ds[rows] * dt[cols])
    else:
        Y = Y11 = Y01 = Y10 = Y_hat = 0.0
    h = inst.mask().astype(float)
    J_vec = h @ eta
    K_vec = h.T @ delta

    return StatsBundle(
        m=m, n=n, s_bar=float(s_bar), t_bar=float(t_bar), lam=float(lam), A=float(A),
        x=_frozen(x_int), y=_frozen(y_int), delta=_frozen(delta), eta=_frozen(eta),
        X_total=int(x_int.sum()), Y=float(Y),
        R=float(np.sum(ds**2)), C=float(np.sum(dt**2)),
        R_hl=_frozen(R_hl), C_hl=_frozen(C_hl),
        Y11=float(Y11), Y01=float(Y01), Y10=float(Y10), Y_hat=float(Y_hat),
        J_vec=_frozen(J_vec), K_vec=_frozen(K_vec),
        max_row_dev=float(np.max(np.abs(ds))), max_col_dev=float(np.max(np.abs(dt))),
    )


def digraph_stats(dig: DigraphInstance) -> StatsBundle:
    """Statistics of a digraph instance: the bipartite formulas with ``m = n``.

    The pattern is the arc set alone; the diagonal is not added.
    """
    return compute_stats(BipartiteInstance(dig.n, dig.n, dig.s, dig.t, dig.forbidden_arcs))


@dataclass(frozen=True)
class InducedStats:
    """Window statistics for induced-subgraph probabilities.

    ``omega[l-1]`` holds the sum over window rows of ``(x_j - lam*K)**l`` and
    ``omega_p`` the column analogue.  Digraph windows fill ``chi``/``chi_p``
    instead, with ``p*(J-1)`` as the centre.
    """

    J_win: int
    K_win: int
    X_total: int
    omega: tuple[float, float, float] | None = None
    omega_p: tuple[float, float, float] | None = None
    chi: tuple[float, float, float] | None = None
    chi_p: tuple[float, float, float] | None = None


def _power_sums(v: np.ndarray) -> tuple[float, float, float]:
    return tuple(float(np.sum(v**l)) for l in (1, 2, 3))


def induced_stats(inst: BipartiteInstance, J: int, K: int) -> InducedStats:
    """Window statistics for the pattern ``inst.forbidden`` inside rows ``< J``, columns ``< K``."""
    if not (0 <= J <= inst.m and 0 <= K <= inst.n):
        raise InstanceError("window exceeds the matrix")
    for j, k in inst.forbidden:
        if j >= J or k >= K:
            raise InstanceError(f"pattern edge ({j}, {k}) lies outside the {J}x{K} window")
    lam = sum(inst.s) / (inst.m * inst.n)
    x, y = inst.pattern_degrees()
    return InducedStats(
        J, K, len(inst.forbidden),
        omega=_power_sums(x[:J] - lam * K),
        omega_p=_power_sums(y[:K] - lam * J),
    )


def induced_stats_digraph(dig: DigraphInstance, J: int) -> InducedStats:
    n = dig.n
    if not 0 <= J <= n:
        raise InstanceError("window exceeds the vertex set")
    for j, k in dig.forbidden_arcs:
        if j >= J or k >= J:
            raise InstanceError(f"pattern arc ({j}, {k}) lies outside the first {J} vertices")
    p = sum(dig.s) / (n * (n - 1))
    x = np.zeros(n)
    y = np.zeros(n)
    for j, k in dig.forbidden_arcs:
        x[j] += 1
        y[k] += 1
    c = p * (J - 1)
    return InducedStats(
        J, J, len(dig.forbidden_arcs),
        chi=_power_sums(x[:J] - c),
        chi_p=_power_sums(y[:J] - c),
    )


class Check(NamedTuple):
    name: str
    lhs: float
    threshold: float
    passed: bool
    mandatory: bool = True


@dataclass(frozen=True)
class ApplicabilityReport:
    checks: tuple[Check, ...]
    overall: str
    notes: str = ""

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _le(name, lhs, thr, mandatory=True) -> Check:
    return Check(name, float(lhs), float(thr), bool(lhs <= thr), mandatory)


def _lt(name, lhs, thr, mandatory=True) -> Check:
    return Check(name, float(lhs), float(thr), bool(lhs < thr), mandatory)


def _report(checks: list[Check], notes: str) -> ApplicabilityReport:
    if any(c.mandatory and not c.passed for c in checks):
        overall = "fail"
    elif any(not c.passed for c in checks):
        overall = "warn"
    else:
        overall = "pass"
    return ApplicabilityReport(tuple(checks), overall, notes)


def _density_lhs(lam: float, factor: float) -> float:
    """``(1-2*lam)**2 / A`` times ``factor``."""
    if lam <= 0.0 or lam >= 1.0:
        return math.inf
    return (1 - 2 * lam) ** 2 / (lam * (1 - lam) / 2) * factor


def _smallness_checks(st: StatsBundle, eps: float) -> list[Check]:
    # o(f) is read as "at most f * n**-eps" at the given size
    m, n, lam, X = st.m, st.n, st.lam, st.X_total
    shrink = n ** (-eps)
    R02, C02 = st.R_hl[0, 2], st.C_hl[0, 2]
    return [
        _le("miss_rows", X * st.max_row_dev + lam * R02, (1 - lam) * n * shrink, False),
        _le("miss_cols", X * st.max_col_dev + lam * C02, (1 - lam) * m * shrink, False),
        _le("hit_rows", X * st.max_row_dev + (1 - lam) * R02, lam * n * shrink, False),
        _le("hit_cols", X * st.max_col_dev + (1 - lam) * C02, lam * m * shrink, False),
    ]


def _spread_checks(st: StatsBundle, eps: float) -> list[Check]:
    n = st.n
    bound = n ** (0.5 + eps)
    return [
        _le("row_spread", st.max_row_dev, bound),
        _le("col_spread", st.max_col_dev, bound),
        _le("pattern_row_degree", float(st.x.max(initial=0)), bound),
        _le("pattern_col_degree", float(st.y.max(initial=0)), bound),
        _le("pattern_size", st.X_total, n ** (1 + 2 * eps)),
    ]


def check_applicability(inst: BipartiteInstance, a: float, b: float,
                        eps: float) -> ApplicabilityReport:
    """Evaluate the asymptotic hypotheses as inequalities at this finite size.

    Never raises for a valid instance; estimators accept any instance and the
    report is purely diagnostic.  Mandatory checks are the hypotheses of the counting
    estimate, the non-mandatory ones the miss/hit smallness conditions.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    st = compute_stats(inst)
    m, n = inst.m, inst.n
    checks = [_lt("a+b<1/2", a + b, 0.5)]
    checks.append(_le(
        "log_density",
        _density_lhs(st.lam, (1 + 5 * m / (6 * n) + 5 * n / (6 * m)) / 8),
        a * math.log(n),
    ))
    checks.append(_le("aspect_n", n, m ** (1 + eps)))
    checks.append(_le("aspect_m", m, n ** (1 + eps)))
    checks += _spread_checks(st, eps)
    checks += _smallness_checks(st, eps)
    return _report(checks, f"a={a}, b={b}, eps={eps}; finite-size validity is empirical")


def check_applicability_digraph(dig: DigraphInstance, a: float, b: float,
                                eps: float) -> ApplicabilityReport:
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    st = digraph_stats(dig)
    checks = [
        _lt("a+b<1/2", a + b, 0.5),
        _le("log_density", _density_lhs(st.lam, 1 / 3), a * math.log(dig.n)),
    ]
    checks += _spread_checks(st, eps)
    checks += _smallness_checks(st, eps)
    return _report(checks, f"a={a}, b={b}, eps={eps}; finite-size validity is empirical")
