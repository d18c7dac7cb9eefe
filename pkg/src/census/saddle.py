"""Saddle point of the counting integral: the maximum-entropy edge probabilities.

For each free (non-forbidden) cell the probability is
``lam_jk = q_j r_k / (1 + q_j r_k)`` and the saddle point makes the expected
row and column sums over free cells equal ``s`` and ``t``.  The radii are
parametrised by offsets ``a_j``, ``b_k`` around ``r = sqrt(lam / (1 - lam))``
and found by plain fixed-point iteration started at zero.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .instances import BipartiteInstance, compute_stats

__all__ = [
    "SaddleError",
    "SaddleBoundaryError",
    "SaddleDivergenceError",
    "SaddlePoint",
    "SaddleResiduals",
    "saddle_from_offsets",
    "lambda_from_radii",
    "solve_saddle",
    "saddle_residuals",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


class SaddleError(RuntimeError):
    pass


class SaddleBoundaryError(SaddleError):
    """Some cell probability leaves (0, 1); ``cell`` names the first offender."""

    def __init__(self, msg: str, cell: tuple[int, int] | None = None):
        super().__init__(msg)
        self.cell = cell


class SaddleDivergenceError(SaddleError):
    def __init__(self, msg: str, history: list[float]):
        super().__init__(msg)
        self.history = history


@dataclass(frozen=True)
class SaddlePoint:
    a: np.ndarray
    b: np.ndarray
    r: float
    q: np.ndarray
    rr: np.ndarray
    lambda_mat: np.ndarray
    Z: np.ndarray
    free: np.ndarray
    iterations: int = 0
    converged: bool = False
    damped: bool = False
    history: tuple[float, ...] = ()

    def edge_probabilities(self) -> np.ndarray:
        """``lambda_mat`` with forbidden cells set to zero."""
        return np.where(self.free, self.lambda_mat, 0.0)


@dataclass(frozen=True)
class SaddleResiduals:
    row_residuals: np.ndarray
    col_residuals: np.ndarray
    balance_residual: float
    max_abs: float


def lambda_from_radii(q: np.ndarray, rr: np.ndarray) -> np.ndarray:
    qr = np.outer(q, rr)
    return qr / (1.0 + qr)


def _z_matrix(a: np.ndarray, b: np.ndarray, r2: float) -> np.ndarray:
    A = a[:, None]
    B = b[None, :]
    return A * B * (1 - r2 - r2 * A - r2 * B) / (1 + r2 * A * B)


def saddle_from_offsets(inst: BipartiteInstance, a, b, *, iterations: int = 0,
                        converged: bool = False, damped: bool = False,
                        history=()) -> SaddlePoint:
    """Build the full saddle description from offsets ``a`` (rows) and ``b`` (columns)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lam = sum(inst.s) / (inst.m * inst.n)
    r2 = lam / (1 - lam)
    r = math.sqrt(r2)
    q = r * (1 + a) / (1 - r2 * a)
    rr = r * (1 + b) / (1 - r2 * b)
    return SaddlePoint(
        a=a, b=b, r=r, q=q, rr=rr,
        lambda_mat=lambda_from_radii(q, rr),
        Z=_z_matrix(a, b, r2),
        free=~inst.mask(),
        iterations=iterations, converged=converged, damped=damped,
        history=tuple(history),
    )


def _check_capacity(inst: BipartiteInstance) -> None:
    free = ~inst.mask()
    cap_r = free.sum(axis=1)
    cap_c = free.sum(axis=0)
    for j in range(inst.m):
        if not 0 < inst.s[j] < cap_r[j]:
            k = int(np.flatnonzero(free[j])[0]) if cap_r[j] else None
            raise SaddleBoundaryError(
                f"row {j}: s_j={inst.s[j]} is not strictly between 0 and its {cap_r[j]} free cells",
                None if k is None else (j, k))
    for k in range(inst.n):
        if not 0 < inst.t[k] < cap_c[k]:
            j = int(np.flatnonzero(free[:, k])[0]) if cap_c[k] else None
            raise SaddleBoundaryError(
                f"column {k}: t_k={inst.t[k]} is not strictly between 0 and its {cap_c[k]} free cells",
                None if j is None else (j, k))


def _check_interior(q, rr, free) -> None:
    if not (np.all(np.isfinite(q)) and np.all(q > 0)):
        j = int(np.flatnonzero(~(np.isfinite(q) & (q > 0)))[0])
        k = int(np.flatnonzero(free[j])[0])
        raise SaddleBoundaryError(f"row radius q_{j} left (0, inf)", (j, k))
    if not (np.all(np.isfinite(rr)) and np.all(rr > 0)):
        k = int(np.flatnonzero(~(np.isfinite(rr) & (rr > 0)))[0])
        j = int(np.flatnonzero(free[:, k])[0])
        raise SaddleBoundaryError(f"column radius r_{k} left (0, inf)", (j, k))
    lm = lambda_from_radii(q, rr)
    bad = free & ~((lm > 0) & (lm < 1))
    if bad.any():
        j, k = map(int, np.argwhere(bad)[0])
        raise SaddleBoundaryError(f"lambda[{j}, {k}] = {lm[j, k]} left (0, 1)", (j, k))


def solve_saddle(inst: BipartiteInstance, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> SaddlePoint:
    """Fixed-point solve for the offsets ``a``, ``b``.

    Each sweep evaluates every row map and every column map at the previous
    iterate.  If the step size grows three sweeps running, later sweeps move
    half way to the map's value.
    """
    m, n = inst.m, inst.n
    st = compute_stats(inst)
    lam = st.lam
    if not 0.0 < lam < 1.0:
        raise SaddleBoundaryError(f"density {lam} is not strictly inside (0, 1)")
    _check_capacity(inst)

    r2 = lam / (1 - lam)
    free = ~inst.mask()
    h = inst.mask().astype(float)
    x = st.x.astype(float)
    y = st.y.astype(float)
    X = st.X_total
    row_const = st.delta / (lam * n) - X / (2 * m * n)
    col_const = st.eta / (lam * m) - X / (2 * m * n)

    a = np.zeros(m)
    b = np.zeros(n)
    history: list[float] = []
    growth = 0
    damped = False
    for it in range(1, max_iter + 1):
        Z = np.where(free, _z_matrix(a, b, r2), 0.0)
        z_all = Z.sum()
        new_a = (row_const + a * x / n - (y @ b) / (m * n) + (h @ b) / n
                 - Z.sum(axis=1) / n + z_all / (2 * m * n))
        new_b = (col_const + b * y / m - (x @ a) / (m * n) + (h.T @ a) / m
                 - Z.sum(axis=0) / m + z_all / (2 * m * n))
        if damped:
            new_a = 0.5 * (a + new_a)
            new_b = 0.5 * (b + new_b)
        change = float(max(np.max(np.abs(new_a - a)), np.max(np.abs(new_b - b))))
        a, b = new_a, new_b
        _check_interior(math.sqrt(r2) * (1 + a) / (1 - r2 * a),
                        math.sqrt(r2) * (1 + b) / (1 - r2 * b), free)
        growth = growth + 1 if history and change > history[-1] else 0
        history.append(change)
        if not math.isfinite(change):
            raise SaddleDivergenceError("iteration produced non-finite offsets", history)
        if change < tol:
            return saddle_from_offsets(inst, a, b, iterations=it, converged=True,
                                       damped=damped, history=history)
        if growth >= 3 and not damped:
            log.debug("step grew for 3 sweeps at iteration %d; damping", it)
            damped = True
            growth = 0
    if len(history) > 1 and history[-1] > history[-2]:
        raise SaddleDivergenceError(f"no convergence in {max_iter} sweeps, step growing", history)
    return saddle_from_offsets(inst, a, b, iterations=max_iter, converged=False,
                               damped=damped, history=history)


def saddle_residuals(inst: BipartiteInstance, sp: SaddlePoint) -> SaddleResiduals:
    """Defects of the margin equations over free cells, and of the balance condition."""
    if sp.lambda_mat.shape != (inst.m, inst.n):
        raise ValueError("saddle point shape does not match the instance")
    free = ~inst.mask()
    lm = np.where(free, sp.lambda_mat, 0.0)
    rows = lm.sum(axis=1) - np.asarray(inst.s, dtype=float)
    cols = lm.sum(axis=0) - np.asarray(inst.t, dtype=float)
    x, y = inst.pattern_degrees()
    balance = float(np.sum((inst.n - x) * sp.a) - np.sum((inst.m - y) * sp.b))
    max_abs = float(max(np.max(np.abs(rows)), np.max(np.abs(cols)), abs(balance)))
    return SaddleResiduals(rows, cols, balance, max_abs)
