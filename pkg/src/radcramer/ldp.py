"""Large-deviation experiments tying the rate function to probabilities.

Exact mode (enumeration and convolution) is always preferred; Monte Carlo,
plain or exponentially tilted, is the fallback when size caps are hit.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import binomtest, norm

from .core import as_weights, cgf
from .errors import SizeError
from .legendre import INTERIOR, SolverConfig, cramer_transform, solve_tilt
from .oracle import (
    CONV_MERGE_TOL,
    ExactDist,
    convolve_iid,
    exact_distribution,
    tail_probability,
)

__all__ = [
    "ExperimentReport",
    "TailEstimate",
    "ConvergenceRow",
    "sample_series",
    "tilted_sampler",
    "mc_tail_probability",
    "chernoff_check",
    "rate_convergence",
    "spawn_generators",
]

# relative slack for Chernoff rows where the bound is attained (the endpoints)
_ENDPOINT_RTOL = 1e-12
NEAR_BOUNDARY = 0.01
GAP_RTOL = 1e-9


def _signs(rng: np.random.Generator, shape) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size=shape) - 1.0


def sample_series(t, rng: np.random.Generator, size: Optional[int] = None):
    """Draw ``sum_i t_i eps_i`` with independent fair signs.

    Returns a float for ``size=None`` and an array of ``size`` draws otherwise.
    """
    t = as_weights(t)
    w = t.weights
    # rounding in the dot product can overshoot ||t||_1 by an ulp
    l1 = t.l1_norm
    if size is None:
        return float(np.clip(np.dot(_signs(rng, w.size), w), -l1, l1))
    return np.clip(_signs(rng, (int(size), w.size)) @ w, -l1, l1)


def tilted_sampler(t, s: float, rng: np.random.Generator, size: Optional[int] = None):
    """Draw from the exponentially tilted law and return ``(draw, log_weight)``.

    Under the tilt each sign is +1 with probability
    ``exp(s t_i) / (2 cosh(s t_i)) = (1 + tanh(s t_i)) / 2``, so the mean of
    ``eps_i`` is ``tanh(s t_i)``. ``exp(log_weight)`` with
    ``log_weight = -s * draw + cgf(t, s)`` is the likelihood ratio back to the
    fair-sign law.
    """
    t = as_weights(t)
    w = t.weights
    p_plus = 0.5 * (1.0 + np.tanh(s * w))
    shape = w.size if size is None else (int(size), w.size)
    eps = np.where(rng.random(shape) < p_plus, 1.0, -1.0)
    draw = eps @ w
    log_weight = -s * draw + cgf(t, s)
    if size is None:
        return float(draw), float(log_weight)
    return draw, log_weight


def spawn_generators(seed: int, workers: int) -> List[np.random.Generator]:
    """Independent substreams derived from one master seed."""
    return [np.random.default_rng(ss) for ss in np.random.SeedSequence(seed).spawn(workers)]


@dataclass
class TailEstimate:
    """Monte Carlo estimate of ``P(X >= alpha)`` with a confidence interval."""

    estimate: float
    lower: float
    upper: float
    n_samples: int
    method: str
    tilt: float = 0.0

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)


def mc_tail_probability(
    t,
    alpha: float,
    n_samples: int,
    seed: int,
    tilt=None,
    workers: int = 1,
    confidence: float = 0.95,
    chunk: int = 100_000,
) -> TailEstimate:
    """Monte Carlo estimate of ``P(X >= alpha)``.

    ``tilt=None`` samples the fair law and reports a Wilson interval.
    ``tilt="auto"`` tilts to ``s`` solving ``cgf_prime(t, s) = alpha``; a
    float uses that tilt directly. Tilted runs report a normal interval on
    the importance-weighted mean.

    Samples are split evenly over ``workers`` substreams spawned from
    ``seed``; the result depends only on ``seed`` and ``workers``.
    """
    t = as_weights(t)
    if tilt == "auto":
        tilt = solve_tilt(t, alpha) if alpha > 0 else 0.0
    gens = spawn_generators(seed, workers)
    per = [n_samples // workers + (i < n_samples % workers) for i in range(workers)]

    def run(job):
        rng, m = job
        hits = 0
        wsum = 0.0
        wsq = 0.0
        done = 0
        while done < m:
            k = min(chunk, m - done)
            if tilt is None:
                hits += int(np.count_nonzero(sample_series(t, rng, size=k) >= alpha))
            else:
                x, lw = tilted_sampler(t, tilt, rng, size=k)
                v = np.where(x >= alpha, np.exp(lw), 0.0)
                wsum += float(v.sum())
                wsq += float(np.dot(v, v))
            done += k
        return hits, wsum, wsq

    if workers == 1:
        parts = [run((gens[0], per[0]))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, zip(gens, per)))

    if tilt is None:
        hits = sum(p[0] for p in parts)
        ci = binomtest(hits, n_samples).proportion_ci(confidence, method="wilson")
        return TailEstimate(hits / n_samples, float(ci.low), float(ci.high), n_samples, "plain")
    mean = sum(p[1] for p in parts) / n_samples
    second = sum(p[2] for p in parts) / n_samples
    se = math.sqrt(max(second - mean * mean, 0.0) / n_samples)
    z = float(norm.ppf(0.5 + confidence / 2))
    return TailEstimate(mean, max(mean - z * se, 0.0), mean + z * se, n_samples, "tilted", float(tilt))


@dataclass
class ExperimentReport:
    """Per-alpha Chernoff and rate-convergence records for one weight vector."""

    t: object
    alphas: List[float]
    rows: List[dict]
    seed: Optional[int] = None
    timestamp: float = field(default_factory=time.time)
    warnings: List[str] = field(default_factory=list)

    @property
    def chernoff_ok(self) -> bool:
        return all(r["chernoff_ok"] for r in self.rows)


def _side_tail(d: ExactDist, alpha: float) -> float:
    """Tail on the far side of the mean: ``P(X >= a)`` for ``a >= 0``, else ``P(X <= a)``."""
    if alpha >= 0:
        return tail_probability(d, alpha)
    return float(d.probs[d.support <= alpha].sum())


def chernoff_check(t, alphas: Sequence[float], cfg: Optional[SolverConfig] = None,
                   seed: Optional[int] = None) -> ExperimentReport:
    """Compare exact tails with the Chernoff bound ``exp(-psi*(alpha))``.

    Negative ``alpha`` use the lower tail ``P(X <= alpha)``. Raises
    :class:`~radcramer.errors.SizeError` when exact enumeration is impossible.
    """
    t = as_weights(t)
    d = exact_distribution(t)
    rows = []
    warnings = []
    for a in alphas:
        a = float(a)
        rp = cramer_transform(t, a, cfg)
        tail = _side_tail(d, a)
        bound = math.exp(-rp.value)
        if rp.status == INTERIOR:
            ok = tail <= bound
        else:
            ok = tail <= bound * (1.0 + _ENDPOINT_RTOL)
        if rp.status != INTERIOR and rp.status != "exterior":
            warnings.append(f"alpha={a!r}: {rp.status} regime")
        rows.append(
            {
                "alpha": a,
                "rate_value": rp.value,
                "status": rp.status,
                "exact_tail": tail,
                "bound": bound,
                "chernoff_ok": bool(ok),
            }
        )
    return ExperimentReport(t, [float(a) for a in alphas], rows, seed, warnings=warnings)


@dataclass
class ConvergenceRow:
    N: int
    tail: float
    g_N: float
    gap: float
    mode: str
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None


@dataclass
class RateConvergence:
    """Table of ``g_N = -(1/N) ln P(S_N / N >= alpha)`` against ``psi*(alpha)``."""

    alpha: float
    rate_value: float
    rows: List[ConvergenceRow]
    gap_threshold: float
    warnings: List[str] = field(default_factory=list)

    @property
    def chernoff_ok(self) -> bool:
        return all(r.g_N >= self.rate_value for r in self.rows if r.mode == "exact")

    @property
    def gaps_decreasing(self) -> bool:
        gaps = [r.gap for r in self.rows]
        # a decrease must clear rounding noise; equal gaps (lattice edge) do not count
        return all(b < a - GAP_RTOL * abs(a) for a, b in zip(gaps, gaps[1:]))

    @property
    def final_gap_ok(self) -> bool:
        return bool(self.rows) and self.rows[-1].gap < self.gap_threshold

    def as_dicts(self) -> List[dict]:
        return [r.__dict__.copy() for r in self.rows]


def _tilt_distribution(d: ExactDist, s: float) -> ExactDist:
    """Exponentially tilted law ``p(x) exp(s x) / E exp(s X)``."""
    if s == 0.0:
        return d
    logq = np.log(d.probs) + s * d.support
    logq -= logq.max()
    q = np.exp(logq)
    keep = q > 0.0
    return ExactDist(d.support[keep], q[keep] / q[keep].sum())


def rate_convergence(
    t,
    alpha: float,
    Ns: Sequence[int],
    cfg: Optional[SolverConfig] = None,
    max_support: int = 200_000,
    gap_threshold: float = 0.05,
    mc_samples: int = 20_000,
    seed: int = 0,
    fallback_mc: bool = True,
) -> RateConvergence:
    """Exact empirical-mean tails ``P(S_N / N >= alpha)`` along a schedule of N.

    Each ``S_N`` is the sum of ``N`` i.i.d. copies of ``X_t``, obtained by
    exact convolution. For interior ``alpha > 0`` the convolution runs on the
    law tilted to mean ``alpha``, ``q(x) = p(x) exp(s x - cgf(s))``, and

    .. math::

        g_N = \\psi^*(\\alpha) - \\frac1N \\ln \\sum_{x \\ge N\\alpha} q_N(x)\\, e^{-s(x - N\\alpha)},

    which neither underflows for large ``N`` nor loses the gap to cancellation. When the support would outgrow ``max_support`` the row
    falls back to a tilted Monte Carlo estimate with its confidence interval,
    or re-raises :class:`~radcramer.errors.SizeError` if ``fallback_mc`` is off.
    """
    t = as_weights(t)
    alpha = float(alpha)
    rp = cramer_transform(t, alpha, cfg)
    out = RateConvergence(alpha, rp.value, [], gap_threshold)
    if rp.status != INTERIOR or (t.l1_norm and abs(alpha) / t.l1_norm > 1 - NEAR_BOUNDARY):
        out.warnings.append(
            f"alpha={alpha!r} is in the boundary regime (|alpha|/||t||_1 = "
            f"{abs(alpha) / t.l1_norm if t.l1_norm else math.inf:.6g}); lattice effects dominate"
        )
    s = rp.s_star if rp.status == INTERIOR and alpha > 0 else 0.0
    d = None
    for N in Ns:
        N = int(N)
        try:
            if d is None:
                d = _tilt_distribution(exact_distribution(t), s)
            dN = convolve_iid(d, N, max_support)
            # atoms are accurate to the convolution merge tolerance
            hit = dN.support >= N * alpha - CONV_MERGE_TOL
            mass = float(np.dot(dN.probs[hit], np.exp(-s * (dN.support[hit] - N * alpha))))
            if mass > 0:
                gap = -math.log(mass) / N
                if s == 0.0:
                    gap -= rp.value
                g = rp.value + gap
            else:
                g = gap = math.inf
            out.rows.append(ConvergenceRow(N, math.exp(-N * g), g, gap, "exact"))
        except SizeError:
            if not fallback_mc:
                raise
            tiled = np.tile(t.weights, N)
            est = mc_tail_probability(tiled, N * alpha, mc_samples, seed + N, tilt="auto")
            g = -math.log(est.estimate) / N if est.estimate > 0 else math.inf
            lo = -math.log(est.upper) / N if est.upper > 0 else math.inf
            hi = -math.log(est.lower) / N if est.lower > 0 else math.inf
            out.rows.append(ConvergenceRow(N, est.estimate, g, g - rp.value, "mc-tilted", lo, hi))
    return out
