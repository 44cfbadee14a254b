"""Rate function by classical Legendre inversion.

The conjugate of the CGF at ``alpha`` is ``alpha * s - cgf(t, s)`` where ``s``
solves ``cgf_prime(t, s) = alpha``. Since ``cgf_prime`` is strictly
increasing with range ``(-||t||_1, ||t||_1)`` the root is found by a bracketed
Newton iteration with a bisection fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import LN2, DualVector, as_weights, cgf
from .errors import (
    BoundaryError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    ExteriorError,
)

__all__ = [
    "SolverConfig",
    "RatePoint",
    "INTERIOR",
    "BOUNDARY",
    "EXTERIOR",
    "DEGENERATE",
    "rate_domain",
    "solve_tilt",
    "cramer_transform",
]

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps for both rate-function solvers.

    ``root_tol`` bounds ``|cgf_prime - alpha|`` for the tilt solve.
    ``boundary_guard`` is the relative distance from ``|alpha| = ||t||_1``
    inside which the endpoint value is reported instead of iterating.
    The ``pg_*`` fields drive the projected-gradient entropy minimizer;
    ``pg_tol`` applies to the KKT residual.
    """

    root_tol: float = 1e-12
    max_newton_iters: int = 100
    bracket_growth: float = 2.0
    boundary_guard: float = 1e-9
    pg_step0: float = 1.0
    pg_shrink: float = 0.5
    pg_tol: float = 1e-10
    pg_max_iters: int = 10000

    def __post_init__(self):
        for name in ("root_tol", "boundary_guard", "pg_step0", "pg_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")
        if not 0 < self.pg_shrink < 1:
            raise ValueError("pg_shrink must lie in (0, 1)")
        if self.max_newton_iters < 1 or self.pg_max_iters < 1:
            raise ValueError("iteration caps must be at least 1")


@dataclass
class RatePoint:
    """One evaluated point ``(alpha, psi*(alpha))`` of the rate function."""

    alpha: float
    value: float
    status: str
    s_star: Optional[float] = None
    b_star: Optional[DualVector] = None
    iterations: int = 0


def rate_domain(t):
    """Return ``(-||t||_1, ||t||_1, m)`` with ``m`` the number of nonzero weights."""
    t = as_weights(t)
    return -t.l1_norm, t.l1_norm, t.nonzero_count


def _regime(t, alpha: float, guard: float) -> str:
    if math.isnan(alpha):
        raise DomainError("alpha must not be NaN")
    if t.degenerate:
        return DEGENERATE
    ratio = abs(alpha) / t.l1_norm
    if ratio > 1.0:
        return EXTERIOR
    if ratio >= 1.0 - guard:
        return BOUNDARY
    return INTERIOR


def _solve_tilt(w: np.ndarray, a: float, cfg: SolverConfig):
    """Root of ``sum w tanh(s w) = a`` for ``w > 0`` and ``0 < a < sum w``.

    Returns ``(s, iterations, residual)``.
    """
    l1 = float(w.sum())

    def residual(s):
        return float(np.dot(w, np.tanh(s * w))) - a

    def slope(s):
        e = np.exp(-2.0 * s * w)
        return float(np.dot(w * w, 4.0 * e / (1.0 + e) ** 2))

    lo, hi = 0.0, (a / l1) / float(w.max())
    f_hi = residual(hi)
    while f_hi < 0.0:
        lo, hi = hi, hi * cfg.bracket_growth
        f_hi = residual(hi)
        if not math.isfinite(hi):
            raise ConvergenceError("tilt bracket expansion overflowed")

    x, fx = hi, f_hi
    # evaluation noise floor of the residual
    floor = 64.0 * np.finfo(float).eps * l1
    for it in range(1, cfg.max_newton_iters + 1):
        if abs(fx) <= cfg.root_tol:
            return x, it, abs(fx)
        if fx < 0.0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4.0 * np.spacing(hi):
            if abs(fx) <= max(cfg.root_tol, floor):
                return x, it, abs(fx)
            break
        d = slope(x)
        cand = x - fx / d if d > 0.0 else math.nan
        if lo < cand < hi:
            f_cand = residual(cand)
            if abs(f_cand) < abs(fx):
                x, fx = cand, f_cand
                continue
        x = 0.5 * (lo + hi)
        fx = residual(x)
    raise ConvergenceError(
        f"tilt solve did not reach root_tol={cfg.root_tol:g}",
        iterations=cfg.max_newton_iters,
        residual=abs(fx),
    )


def solve_tilt(t, alpha: float, cfg: Optional[SolverConfig] = None) -> float:
    """Solve ``cgf_prime(t, s) = alpha`` for the tilt ``s``.

    Raises
    ------
    DegenerateError
        All weights are zero.
    BoundaryError
        ``|alpha|`` lies within ``boundary_guard`` of ``||t||_1``
        (:class:`ExteriorError` when beyond it).
    ConvergenceError
        The safeguarded Newton iteration exhausted ``max_newton_iters``.
    """
    t = as_weights(t)
    cfg = cfg or SolverConfig()
    alpha = float(alpha)
    regime = _regime(t, alpha, cfg.boundary_guard)
    if regime == DEGENERATE:
        raise DegenerateError("tilt is undefined for all-zero weights")
    if regime == EXTERIOR:
        raise ExteriorError(f"alpha={alpha!r} outside (-{t.l1_norm!r}, {t.l1_norm!r})")
    if regime == BOUNDARY:
        raise BoundaryError(f"alpha={alpha!r} within the boundary guard band")
    if alpha == 0.0:
        return 0.0
    w = np.abs(t.weights[t.nonzero_mask])
    s, _, _ = _solve_tilt(w, abs(alpha), cfg)
    return math.copysign(s, alpha)


def cramer_transform(t, alpha: float, cfg: Optional[SolverConfig] = None) -> RatePoint:
    """Evaluate the rate function ``psi_t^*(alpha)`` by Legendre inversion.

    Every ``alpha`` is accepted and the regime is reported in ``status``:
    ``exterior`` points get ``inf``; ``boundary`` points get the finite
    endpoint value ``m ln 2``; all-zero weights give the indicator of ``{0}``.
    """
    t = as_weights(t)
    cfg = cfg or SolverConfig()
    alpha = float(alpha)
    regime = _regime(t, alpha, cfg.boundary_guard)
    if regime == DEGENERATE:
        return RatePoint(alpha, 0.0 if alpha == 0.0 else math.inf, DEGENERATE)
    if regime == EXTERIOR:
        return RatePoint(alpha, math.inf, EXTERIOR)
    if regime == BOUNDARY:
        return RatePoint(alpha, t.nonzero_count * LN2, BOUNDARY)
    if alpha == 0.0:
        return RatePoint(alpha, 0.0, INTERIOR, s_star=0.0)
    w = np.abs(t.weights[t.nonzero_mask])
    s, iters, _ = _solve_tilt(w, abs(alpha), cfg)
    s = math.copysign(s, alpha)
    value = max(alpha * s - cgf(t, s), 0.0)
    return RatePoint(alpha, value, INTERIOR, s_star=s, iterations=iters)
