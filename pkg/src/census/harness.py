"""Seeded instance families and exact-versus-asymptotic comparison sweeps."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .asymptotics import estimate_log_count_bipartite
from .exact import DP_MAX_ROWS, DEFAULT_MAX_STATES, count_exact
from .instances import BipartiteInstance, compute_stats
from .saddle import solve_saddle, saddle_residuals

__all__ = [
    "ConfigError",
    "SweepConfig",
    "ComparisonRow",
    "generate_instance",
    "run_compare_sweep",
    "report_csv",
    "report_json",
    "CSV_COLUMNS",
    "REPORT_VERSION",
]

REPORT_VERSION = 1
CSV_COLUMNS = ("m", "n", "lambda", "pattern", "exact_log", "estimate_log", "log_ratio",
               "saddle_residual", "ms_exact", "ms_estimate")

FAMILIES = ("regular", "near_regular", "custom")
PATTERNS = ("none", "single_edge", "matching_k", "custom")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    family: str = "regular"
    sizes: tuple[tuple[int, int], ...] = ()
    density: Fraction = Fraction(1, 2)
    pattern: str = "none"
    k: int = 1
    edges: tuple[tuple[int, int], ...] = ()
    margins: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()
    seed: int = 0
    instances_per_size: int = 1
    exact: bool = True
    engine: str = "auto"
    max_rows: int = DP_MAX_ROWS
    max_states: int = DEFAULT_MAX_STATES
    tol: float = 1e-12
    record_timing: bool = False
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "density", Fraction(self.density))
        object.__setattr__(self, "sizes", tuple((int(m), int(n)) for m, n in self.sizes))
        object.__setattr__(self, "edges", tuple((int(j), int(k)) for j, k in self.edges))
        object.__setattr__(self, "margins", tuple(
            (tuple(map(int, s)), tuple(map(int, t))) for s, t in self.margins))
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if self.pattern not in PATTERNS:
            raise ConfigError(f"unknown pattern {self.pattern!r}")
        if not 0 < self.density < 1:
            raise ConfigError("density must lie strictly between 0 and 1")
        if self.instances_per_size < 1:
            raise ConfigError("instances_per_size must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.family == "custom" and len(self.margins) != len(self.sizes):
            raise ConfigError("custom family needs one (s, t) pair per size")
        for m, n in self.sizes:
            if m <= 0 or n <= 0:
                raise ConfigError(f"bad size ({m}, {n})")
            if self.family == "regular" and ((self.density * n).denominator != 1
                                             or (self.density * m).denominator != 1):
                raise ConfigError(f"density {self.density} gives non-integral degrees at ({m}, {n})")
            if self.family == "near_regular" and (self.density * m * n).denominator != 1:
                raise ConfigError(f"density {self.density} gives a non-integral edge count at ({m}, {n})")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        if "density" in d:
            d["density"] = Fraction(str(d["density"]))
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["density"] = str(self.density)
        return d

    @property
    def total(self) -> int:
        return len(self.sizes) * self.instances_per_size


def _rng(seed: int, index: int) -> np.random.Generator:
    # Philox is counter based: draws for (seed, index) never depend on other indices
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def _repair(v: list[int], target: int, lo: int, hi: int, name: str) -> None:
    """Shift the trailing entries of ``v`` by one unit each until it sums to ``target``."""
    diff = target - sum(v)
    step = 1 if diff > 0 else -1
    i = len(v) - 1
    while diff and i >= 0:
        if lo <= v[i] + step <= hi:
            v[i] += step
            diff -= step
        i -= 1
    if diff:
        raise ConfigError(f"cannot repair {name}: entry {name}[0] would leave [{lo}, {hi}]")


def _pattern(cfg: SweepConfig, m: int, n: int, rng: np.random.Generator) -> tuple[tuple[int, int], ...]:
    if cfg.pattern == "none":
        return ()
    if cfg.pattern == "custom":
        return cfg.edges
    if cfg.pattern == "single_edge":
        cell = int(rng.integers(m * n))
        return ((cell // n, cell % n),)
    k = cfg.k
    if k > min(m, n):
        raise ConfigError(f"matching of size {k} does not fit in {m}x{n}")
    rows = rng.choice(m, size=k, replace=False)
    cols = rng.choice(n, size=k, replace=False)
    return tuple(sorted(zip(map(int, rows), map(int, cols))))


def generate_instance(cfg: SweepConfig, index: int) -> BipartiteInstance:
    """Deterministic instance number ``index`` of the sweep (sizes major, repeats minor)."""
    if not 0 <= index < cfg.total:
        raise IndexError(f"index {index} outside the sweep of {cfg.total}")
    size_idx = index // cfg.instances_per_size
    m, n = cfg.sizes[size_idx]
    rng = _rng(cfg.seed, index)
    lam = cfg.density
    if cfg.family == "regular":
        s = [int(lam * n)] * m
        t = [int(lam * m)] * n
    elif cfg.family == "near_regular":
        total = int(lam * m * n)
        s = [int(round(lam * n)) + int(d) for d in rng.integers(-1, 2, size=m)]
        t = [int(round(lam * m)) + int(d) for d in rng.integers(-1, 2, size=n)]
        s = [min(max(v, 1), n - 1) for v in s]
        t = [min(max(v, 1), m - 1) for v in t]
        _repair(s, total, 1, n - 1, "s")
        _repair(t, total, 1, m - 1, "t")
    else:
        s, t = map(list, cfg.margins[size_idx])
    forb = _pattern(cfg, m, n, rng)
    return BipartiteInstance(m, n, s, t, frozenset(forb))


@dataclass
class ComparisonRow:
    index: int
    m: int
    n: int
    lam: float
    pattern: str
    instance: dict
    estimate_log: float | None = None
    exact_log: float | None = None
    log_ratio: float | None = None
    saddle_residual: float | None = None
    ms_exact: float | None = None
    ms_estimate: float | None = None
    errors: list[str] = field(default_factory=list)


def _describe(cfg: SweepConfig, inst: BipartiteInstance) -> str:
    cells = ";".join(f"{j}:{k}" for j, k in sorted(inst.forbidden))
    return f"{cfg.pattern}[{cells}]"


def _run_row(cfg: SweepConfig, index: int) -> ComparisonRow:
    inst = generate_instance(cfg, index)
    st = compute_stats(inst)
    row = ComparisonRow(index, inst.m, inst.n, st.lam, _describe(cfg, inst), inst.to_dict())
    try:
        sp = solve_saddle(inst, tol=cfg.tol)
        row.saddle_residual = saddle_residuals(inst, sp).max_abs
        if not sp.converged:
            row.errors.append("saddle: not converged")
    except Exception as exc:  # recorded per row, never fatal to the sweep
        row.errors.append(f"saddle: {exc}")
    t0 = time.perf_counter()
    try:
        row.estimate_log = estimate_log_count_bipartite(inst, st).log_value
    except Exception as exc:
        row.errors.append(f"estimate: {exc}")
    t1 = time.perf_counter()
    if cfg.exact:
        try:
            count = count_exact(inst, cfg.engine, max_states=cfg.max_states, max_rows=cfg.max_rows)
            row.exact_log = math.log(count) if count else -math.inf
        except Exception as exc:
            row.errors.append(f"exact: {type(exc).__name__}: {exc}")
    t2 = time.perf_counter()
    if cfg.record_timing:
        row.ms_estimate = 1000 * (t1 - t0)
        row.ms_exact = 1000 * (t2 - t1) if cfg.exact else None
    if row.exact_log is not None and row.estimate_log is not None:
        row.log_ratio = row.exact_log - row.estimate_log
    return row


def run_compare_sweep(cfg: SweepConfig, workers: int = 1) -> list[ComparisonRow]:
    """One row per generated instance, ordered by (size, repeat) whatever ``workers`` is."""
    indices = range(cfg.total)
    if workers <= 1 or cfg.total <= 1:
        return [_run_row(cfg, i) for i in indices]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_row, [cfg] * cfg.total, indices))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_csv(rows: list[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in (r.m, r.n, r.lam, r.pattern, r.exact_log, r.estimate_log,
                                      r.log_ratio, r.saddle_residual, r.ms_exact, r.ms_estimate)])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def report_json(rows: list[ComparisonRow], cfg: SweepConfig | None = None) -> str:
    out = {
        "version": REPORT_VERSION,
        "config": cfg.to_dict() if cfg is not None else None,
        "rows": [{k: _json_safe(v) for k, v in asdict(r).items()} for r in rows],
    }
    return json.dumps(out, sort_keys=True, indent=1) + "\n"
