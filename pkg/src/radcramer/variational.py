"""Rate function as a constrained entropy minimization.

.. math::

    \\psi_t^*(\\alpha) = \\min\\{\\psi_1^*(b) : b \\in [-1, 1]^n,\\ \\langle t, b\\rangle = \\alpha\\}

solved by projected gradient descent. The projection onto the box/hyperplane
intersection is a continuous quadratic knapsack problem: the projected point
is ``clip(v + lam * t)`` for the unique ``lam`` meeting the constraint, and the
constraint value is piecewise linear in ``lam``. Nothing here uses the
closed-form ``b_i = tanh(s t_i)``; that relation is only checked afterwards by
:func:`kkt_certificate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import LN2, DualVector, as_weights, entropy_f
from .errors import DomainError, InfeasibleError
from .legendre import SolverConfig

__all__ = [
    "VariationalSolution",
    "BOX_GUARD",
    "project_box_hyperplane",
    "minimize_entropy",
    "kkt_certificate",
]

# iterates stay in [-1 + BOX_GUARD, 1 - BOX_GUARD] where arctanh is finite
BOX_GUARD = 1e-12

# absolute slack in the Armijo test, below which objective changes are rounding noise
_ARMIJO_SLACK = 1e-15
_ARMIJO_C = 1e-4


@dataclass
class VariationalSolution:
    """Result of :func:`minimize_entropy`."""

    b_star: DualVector
    value: float
    s_hat: float
    kkt_residual: float
    iterations: int
    converged: bool


def _project(v, w, alpha, c, scale=None):
    """Project ``v`` onto ``{|b_i| <= c, <w, b> = alpha}``, all ``w_i != 0``.

    The projection is taken in the norm ``sum_i (b_i - v_i)^2 / scale_i``
    (Euclidean when ``scale`` is None), so the projected point is
    ``clip(v + lam * scale * w, -c, c)``. Sweeps the sorted breakpoints of
    the piecewise-linear constraint value in ``lam`` and interpolates inside
    the bracketing piece.
    """
    u = w if scale is None else scale * w
    r_lo = (-c - v) / u
    r_hi = (c - v) / u
    enter = np.minimum(r_lo, r_hi)
    leave = np.maximum(r_lo, r_hi)
    lam = np.concatenate([enter, leave])
    w2 = w * u
    dslope = np.concatenate([w2, -w2])
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    slope = np.cumsum(dslope[order])
    g = np.empty_like(lam)
    g[0] = -c * np.abs(w).sum()
    np.cumsum(slope[:-1] * np.diff(lam), out=g[1:])
    g[1:] += g[0]

    k = int(np.searchsorted(g, alpha, side="right")) - 1
    k = min(max(k, 0), lam.size - 2)
    if slope[k] > 0.0:
        mult = lam[k] + (alpha - g[k]) / slope[k]
        mult = min(max(mult, lam[k]), lam[k + 1])
    else:
        mult = lam[k]
    b = np.clip(v + mult * u, -c, c)

    # one correction along the free coordinates removes accumulated rounding
    free = np.abs(b) < c
    if free.any():
        r = alpha - float(np.dot(w, b))
        b[free] += r * u[free] / float(np.dot(w[free], u[free]))
        np.clip(b, -c, c, out=b)
    return b


def project_box_hyperplane(v, t, alpha: float) -> DualVector:
    """Project ``v`` onto ``[-1, 1]^n`` intersected with ``<t, b> = alpha``.

    Zero-weight coordinates do not enter the constraint and are simply
    clipped to ``[-1, 1]``.

    Raises
    ------
    InfeasibleError
        If ``|alpha| > ||t||_1``.
    """
    t = as_weights(t)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size != t.n:
        raise DomainError("v and t must have the same length")
    alpha = float(alpha)
    if abs(alpha) > t.l1_norm:
        raise InfeasibleError(f"alpha={alpha!r} exceeds ||t||_1={t.l1_norm!r}")
    mask = t.nonzero_mask
    out = np.clip(v, -1.0, 1.0)
    if mask.any():
        out[mask] = _project(v[mask], t.weights[mask], alpha, 1.0)
    elif alpha != 0.0:
        raise InfeasibleError("all-zero weights admit only alpha = 0")
    return DualVector(out)


def _kkt(w: np.ndarray, b: np.ndarray, bound: Optional[float] = None):
    """Multiplier fit and stationarity residual on nonzero-weight coordinates.

    Coordinates sitting on ``+-bound`` are treated as active box constraints:
    they are left out of the fit and only their sign condition is checked.
    """
    a = np.arctanh(b)
    if bound is None:
        pinned = np.zeros(b.shape, dtype=bool)
    else:
        pinned = np.abs(b) >= bound
    free = ~pinned
    if not free.any():
        return math.copysign(math.inf, float(np.dot(w, b))), 0.0
    wf = w[free]
    s = float(np.dot(wf, a[free]) / np.dot(wf, wf))
    res = float(np.max(np.abs(a[free] - s * wf)))
    if pinned.any():
        gap = (a[pinned] - s * w[pinned]) * np.sign(b[pinned])
        res = max(res, float(np.max(gap, initial=0.0)))
    return s, res


def kkt_certificate(t, b, alpha: float):
    """Recover the multiplier ``s_hat`` and the stationarity residual at ``b``.

    ``s_hat`` is the least-squares fit of ``arctanh(b_i) ~ s * t_i`` over the
    nonzero weights and the residual is ``max_i |arctanh(b_i) - s_hat t_i|``
    over all coordinates (zero weights demand ``b_i = 0``). At the minimizer
    the residual vanishes and ``b_i = tanh(s_hat t_i)``.

    Coordinates at ``|b_i| = 1`` give an infinite residual, except at the
    corner ``alpha = +-||t||_1`` where ``s_hat = +-inf`` and the residual is 0.
    """
    t = as_weights(t)
    bv = b.values if isinstance(b, DualVector) else np.asarray(b, dtype=np.float64)
    alpha = float(alpha)
    if bv.size != t.n:
        raise DomainError("b and t must have the same length")
    if abs(float(np.dot(t.weights, bv)) - alpha) > 1e-8 * max(1.0, abs(alpha)):
        raise DomainError("b does not satisfy <t, b> = alpha")
    mask = t.nonzero_mask
    zero_part = np.abs(bv[~mask])
    if np.any(zero_part >= 1.0):
        return math.nan, math.inf
    zero_res = float(np.max(np.arctanh(zero_part), initial=0.0))
    w = t.weights[mask]
    bn = bv[mask]
    if w.size == 0:
        return 0.0, zero_res
    if np.any(np.abs(bn) >= 1.0):
        corner = np.array_equal(bn, np.sign(w) * math.copysign(1.0, alpha))
        if corner and abs(alpha) == t.l1_norm:
            return math.copysign(math.inf, alpha), zero_res
        return math.nan, math.inf
    s, res = _kkt(w, bn)
    return s, max(res, zero_res)


def minimize_entropy(
    t,
    alpha: float,
    cfg: Optional[SolverConfig] = None,
    callback: Optional[Callable[[int, np.ndarray, float], None]] = None,
) -> VariationalSolution:
    """Minimize the entropy functional over ``[-1, 1]^n`` subject to ``<t, b> = alpha``.

    Projected gradient descent started from the Euclidean projection of 0
    (the unconstrained minimizer). Steps are measured and projected in the
    metric of the entropy Hessian ``diag(1 / (1 - b_i^2))``, which keeps the
    iteration well conditioned when coordinates approach +-1; the projection
    stays a one-multiplier knapsack problem. Each iteration starts at
    ``pg_step0`` and shrinks the step by ``pg_shrink`` until the Armijo
    condition holds along the projection arc. Iteration stops once the
    KKT residual drops to ``pg_tol``, when no further progress is
    representable, or after ``pg_max_iters`` steps (``converged=False``, best
    iterate returned).

    ``callback(k, b, value)`` is invoked on the start point and on every
    accepted iterate.

    Raises
    ------
    InfeasibleError
        ``|alpha| > ||t||_1``, or nonzero ``alpha`` with all-zero weights.
    """
    t = as_weights(t)
    cfg = cfg or SolverConfig()
    alpha = float(alpha)
    if math.isnan(alpha):
        raise DomainError("alpha must not be NaN")
    n = t.n
    full = np.zeros(n)

    def solution(bn, s_hat, res, iters, converged):
        full[t.nonzero_mask] = bn
        value = float(0.5 * np.sum(entropy_f(bn)))
        return VariationalSolution(DualVector(full), value, s_hat, res, iters, converged)

    if t.degenerate:
        if alpha != 0.0:
            raise InfeasibleError("all-zero weights admit only alpha = 0")
        return solution(np.zeros(0), 0.0, 0.0, 0, True)
    l1 = t.l1_norm
    if abs(alpha) > l1:
        raise InfeasibleError(f"alpha={alpha!r} exceeds ||t||_1={l1!r}")

    w = t.weights[t.nonzero_mask]
    if abs(alpha) == l1:
        corner = np.sign(w) * math.copysign(1.0, alpha)
        sol = solution(corner, math.copysign(math.inf, alpha), 0.0, 0, True)
        sol.value = t.nonzero_count * LN2
        return sol

    c = 1.0 - BOX_GUARD
    if abs(alpha) >= c * l1:
        # no room inside the guarded box: the feasible set is a sliver at the corner
        bn = _project(np.zeros_like(w), w, alpha, 1.0)
        return solution(bn, math.copysign(math.inf, alpha), 0.0, 0, True)

    def objective(x):
        return float(0.5 * np.sum(entropy_f(x)))

    b = _project(np.zeros_like(w), w, alpha, c)
    fb = objective(b)
    g = np.arctanh(b)
    s_hat, res = _kkt(w, b, c)
    if callback is not None:
        callback(0, b.copy(), fb)

    k = 0
    while res > cfg.pg_tol and k < cfg.pg_max_iters:
        # metric of the diagonal entropy Hessian, 1 / (1 - b_i^2)
        scale = (1.0 - b) * (1.0 + b)
        step = cfg.pg_step0
        moved = False
        while step > 1e-300:
            trial = _project(b - step * scale * g, w, alpha, c, scale)
            d = trial - b
            if not d.any():
                break
            f_trial = objective(trial)
            if f_trial <= fb + _ARMIJO_C * float(np.dot(g, d)) + _ARMIJO_SLACK:
                moved = True
                break
            step *= cfg.pg_shrink
        if not moved:
            break
        k += 1
        b, fb = trial, f_trial
        g = np.arctanh(b)
        s_hat, res = _kkt(w, b, c)
        if callback is not None:
            callback(k, b.copy(), fb)

    return solution(b, s_hat, res, k, res <= cfg.pg_tol)
