"""Exact ground truth at desk scale.

Distributions of ``X_t`` by sign enumeration, tail probabilities, i.i.d.
convolutions for empirical means, and a grid-search conjugate that shares no
code with the Newton tilt solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import as_weights, cgf, cgf_prime, ln_cosh
from .errors import SizeError

__all__ = [
    "ExactDist",
    "MAX_ENUMERATION",
    "exact_distribution",
    "tail_probability",
    "convolve_iid",
    "conjugate_by_grid",
    "exact_cgf",
]

MAX_ENUMERATION = 24
ENUM_MERGE_TOL = 1e-12
CONV_MERGE_TOL = 1e-9


@dataclass(frozen=True)
class ExactDist:
    """Finite discrete distribution with sorted, distinct support."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.support, dtype=np.float64).reshape(-1)
        p = np.asarray(self.probs, dtype=np.float64).reshape(-1)
        if x.shape != p.shape:
            raise ValueError("support and probs must have equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(p <= 0) or np.any(p > 1):
            raise ValueError("probabilities must lie in (0, 1]")
        object.__setattr__(self, "support", x)
        object.__setattr__(self, "probs", p)

    def __len__(self):
        return self.support.size

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    @property
    def variance(self) -> float:
        m = self.mean
        return float(np.dot((self.support - m) ** 2, self.probs))

    def total_mass(self) -> float:
        return float(self.probs.sum())


def _merge(values: np.ndarray, probs: np.ndarray, tol: float) -> ExactDist:
    """Sort atoms and merge runs whose consecutive gaps are within ``tol``."""
    order = np.argsort(values, kind="stable")
    values = values[order]
    probs = probs[order]
    keep = probs > 0.0
    values, probs = values[keep], probs[keep]
    if values.size == 0:
        raise ValueError("distribution has no mass left")
    starts = np.concatenate([[True], np.diff(values) > tol])
    group = np.cumsum(starts) - 1
    merged_p = np.bincount(group, weights=probs)
    # probability-weighted location keeps symmetric inputs symmetric
    merged_x = np.bincount(group, weights=values * probs) / merged_p
    return ExactDist(merged_x, merged_p)


def exact_distribution(t, max_n: int = MAX_ENUMERATION) -> ExactDist:
    """Exact law of ``sum_i t_i eps_i`` over all ``2^n`` sign patterns.

    Patterns are enumerated one weight at a time, merging equal partial sums
    (within 1e-12) as they appear, so repeated weights stay cheap.

    Raises
    ------
    SizeError
        If ``n > max_n``; use Monte Carlo sampling instead.
    """
    t = as_weights(t)
    if t.n > max_n:
        raise SizeError(f"n={t.n} exceeds the enumeration cap {max_n}; use Monte Carlo")
    support = np.zeros(1)
    probs = np.ones(1)
    for w in t.weights:
        if w == 0.0:
            continue
        d = _merge(
            np.concatenate([support - w, support + w]),
            np.concatenate([probs, probs]) * 0.5,
            ENUM_MERGE_TOL,
        )
        support, probs = d.support, d.probs
    return ExactDist(support, probs)


def tail_probability(d: ExactDist, alpha: float) -> float:
    """Closed upper tail ``P(X >= alpha)``."""
    return float(d.probs[d.support >= alpha].sum())


def _convolve(a: ExactDist, b: ExactDist) -> ExactDist:
    x = np.add.outer(a.support, b.support).ravel()
    p = np.multiply.outer(a.probs, b.probs).ravel()
    return _merge(x, p, CONV_MERGE_TOL)


def convolve_iid(d: ExactDist, N: int, max_support: int = 200_000) -> ExactDist:
    """Law of the sum of ``N`` independent copies of ``d``.

    Built by repeated squaring, each product a pairwise convolution with
    atoms merged within 1e-9. Atoms whose probability underflows to zero are
    dropped.

    Raises
    ------
    SizeError
        If the projected support (``N * (len(d) - 1) + 1`` on a lattice)
        would exceed ``max_support``.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    projected = N * (len(d) - 1) + 1
    if projected > max_support:
        raise SizeError(f"projected support {projected} exceeds max_support={max_support}")
    result = None
    power = d
    while True:
        if N & 1:
            result = power if result is None else _convolve(result, power)
            if len(result) > max_support:
                raise SizeError(f"support grew to {len(result)} > max_support={max_support}")
        N >>= 1
        if not N:
            break
        power = _convolve(power, power)
        if len(power) > max_support:
            raise SizeError(f"support grew to {len(power)} > max_support={max_support}")
    return result


def exact_cgf(d: ExactDist, s: float) -> float:
    """``ln E exp(s X)`` computed directly from the atoms (log-sum-exp)."""
    z = s * d.support
    zmax = z.max()
    return float(zmax + np.log(np.dot(d.probs, np.exp(z - zmax))))


def conjugate_by_grid(t, alpha: float, n_grid: int = 201, xtol: float = 1e-10) -> float:
    """``sup_s {alpha s - cgf(t, s)}`` by a coarse scan and golden-section refinement.

    The scan range ``[-S, S]`` doubles until ``cgf_prime(t, S) >= |alpha|``
    and then once more, so the concave objective peaks well inside it. Returns ``inf`` outside the
    open domain ``|alpha| < ||t||_1``.
    """
    t = as_weights(t)
    alpha = float(alpha)
    if t.degenerate:
        return 0.0 if alpha == 0.0 else math.inf
    if abs(alpha) >= t.l1_norm:
        return math.inf
    if alpha == 0.0:
        return 0.0

    def neg(s):
        return cgf(t, s) - alpha * s

    S = 1.0
    while cgf_prime(t, S) < abs(alpha):
        S *= 2.0
    # one more doubling keeps the peak off the last grid cell
    S *= 2.0
    grid = np.linspace(-S, S, n_grid)
    w = t.weights[t.nonzero_mask]
    vals = ln_cosh(np.outer(grid, w)).sum(axis=1) - alpha * grid
    i = min(max(int(np.argmin(vals)), 1), n_grid - 2)
    if not (vals[i] < vals[i - 1] and vals[i] < vals[i + 1]):
        # a tie at rounding level: the objective is flat to ~1 ulp across the cell
        return max(-float(vals[i]), 0.0)
    res = minimize_scalar(
        neg,
        bracket=(grid[i - 1], grid[i], grid[i + 1]),
        method="golden",
        options={"xtol": xtol, "maxiter": 10_000},
    )
    best = min(float(res.fun), float(vals.min()))
    return max(-best, 0.0)
