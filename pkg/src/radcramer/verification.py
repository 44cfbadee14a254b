"""Randomized property suite cross-checking both rate-function routes.

Used by ``radcramer verify``; every failed check carries enough context
(weights, alpha, seed) to replay it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import as_weights, cgf, psi1_star, psi1_star_grad
from .legendre import BOUNDARY, DEGENERATE, EXTERIOR, SolverConfig, cramer_transform
from .oracle import conjugate_by_grid, exact_cgf, exact_distribution, tail_probability
from .variational import minimize_entropy

__all__ = [
    "CheckFailure",
    "SuiteResult",
    "random_instance",
    "alpha_grid",
    "check_instance",
    "run_suite",
]

EQUIV_TOL = 1e-7
KKT_TOL = 1e-8
TILT_TOL = 1e-6
ORACLE_TOL = 1e-6
CGF_TOL = 1e-10
FD_RTOL = 1e-6
CHORD_TOL = 1e-9
SYM_TOL = 1e-10


@dataclass
class CheckFailure:
    check: str
    weights: List[float]
    alpha: Optional[float]
    seed: Optional[int]
    detail: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SuiteResult:
    passed: int = 0
    failed: int = 0
    failures: List[CheckFailure] = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, name, ok, weights, alpha=None, seed=None, detail=""):
        c = self.counts.setdefault(name, [0, 0])
        if ok:
            self.passed += 1
            c[0] += 1
        else:
            self.failed += 1
            c[1] += 1
            self.failures.append(CheckFailure(name, list(map(float, weights)), alpha, seed, detail))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "checks": {k: {"passed": v[0], "failed": v[1]} for k, v in sorted(self.counts.items())},
            "failures": [f.to_dict() for f in self.failures],
        }


def random_instance(rng: np.random.Generator, n_max: int = 10, lo: float = 0.1, hi: float = 2.0):
    """Weights with ``n ~ U{1..n_max}`` and ``|t_i| ~ U[lo, hi]`` with random signs."""
    n = int(rng.integers(1, n_max + 1))
    return rng.uniform(lo, hi, n) * rng.choice([-1.0, 1.0], n)


def alpha_grid(l1_norm: float, count: int = 21, coverage: float = 0.95) -> np.ndarray:
    """Symmetric grid over ``coverage`` of the open domain; odd counts include 0."""
    g = np.linspace(-coverage * l1_norm, coverage * l1_norm, count)
    return 0.5 * (g - g[::-1])


def check_instance(t, res: SuiteResult, cfg: Optional[SolverConfig] = None,
                   seed: Optional[int] = None, rng: Optional[np.random.Generator] = None,
                   n_alpha: int = 21, coverage: float = 0.95, oracle_stride: int = 4) -> None:
    """Run every property check on one weight vector, recording into ``res``."""
    t = as_weights(t)
    cfg = cfg or SolverConfig()
    rng = rng or np.random.default_rng(seed)
    w = t.tolist()

    if t.degenerate:
        zero = cramer_transform(t, 0.0, cfg)
        off = cramer_transform(t, 0.5, cfg)
        sol = minimize_entropy(t, 0.0, cfg)
        ok = (zero.value == 0.0 and math.isinf(off.value) and zero.status == DEGENERATE
              and sol.value == 0.0)
        res.record("degenerate_indicator", ok, w, 0.0, seed,
                   f"psi*(0)={zero.value}, psi*(0.5)={off.value}")
        return

    grid = alpha_grid(t.l1_norm, n_alpha, coverage)
    values = np.empty_like(grid)
    for j, a in enumerate(grid):
        rp = cramer_transform(t, a, cfg)
        sol = minimize_entropy(t, a, cfg)
        values[j] = rp.value
        diff = abs(rp.value - sol.value)
        res.record("route_equivalence", diff <= EQUIV_TOL and sol.converged, w, float(a), seed,
                   f"legendre={rp.value!r} variational={sol.value!r} converged={sol.converged}")
        if rp.s_star is not None:
            res.record("kkt_residual", sol.kkt_residual <= KKT_TOL, w, float(a), seed,
                       f"residual={sol.kkt_residual!r}")
            res.record("tilt_agreement", abs(sol.s_hat - rp.s_star) <= TILT_TOL, w, float(a), seed,
                       f"s_hat={sol.s_hat!r} s_star={rp.s_star!r}")
        if j % oracle_stride == 0:
            grid_val = conjugate_by_grid(t, a)
            res.record("oracle_grid", abs(grid_val - rp.value) <= ORACLE_TOL, w, float(a), seed,
                       f"grid={grid_val!r} legendre={rp.value!r}")

    # symmetry and convexity of the computed curve
    sym = float(np.max(np.abs(values - values[::-1])))
    res.record("symmetry", sym <= SYM_TOL, w, None, seed, f"max asymmetry {sym:.3g}")
    lam = 0.5  # equally spaced grid
    chord = values[1:-1] - (lam * values[:-2] + (1 - lam) * values[2:])
    res.record("convexity", float(np.max(chord)) <= CHORD_TOL, w, None, seed,
               f"max chord excess {float(np.max(chord)):.3g}")

    # the sup over alpha of s*alpha - psi*(alpha) recovers the CGF
    fine = alpha_grid(t.l1_norm, 401, 0.999)
    fine_vals = np.array([cramer_transform(t, a, cfg).value for a in fine])
    for s in (-1.0, 0.5, 2.0):
        recon = float(np.max(s * fine - fine_vals))
        exact = cgf(t, s)
        # grid resolution error is second order in the spacing
        tol = 1e-3 * max(1.0, abs(s) * t.l1_norm)
        res.record("biconjugate", recon <= exact + 1e-9 and exact - recon <= tol, w, None, seed,
                   f"s={s} sup={recon!r} cgf={exact!r}")

    # endpoint value m ln 2 against the exact point mass
    top = cramer_transform(t, t.l1_norm, cfg)
    res.record("boundary_value", top.status == BOUNDARY
               and abs(top.value - t.nonzero_count * math.log(2)) <= 1e-12, w, t.l1_norm, seed,
               f"value={top.value!r}")
    res.record("exterior_value", math.isinf(cramer_transform(t, 1.01 * t.l1_norm, cfg).value)
               and cramer_transform(t, 1.01 * t.l1_norm, cfg).status == EXTERIOR,
               w, 1.01 * t.l1_norm, seed)

    if t.n <= 16:
        d = exact_distribution(t)
        for s in np.linspace(-2.0, 2.0, 11):
            gap = abs(exact_cgf(d, s) - cgf(t, s))
            res.record("exact_cgf", gap <= CGF_TOL, w, None, seed, f"s={s} gap={gap:.3g}")
        for a, v in zip(grid, values):
            if a > 0:
                tail = tail_probability(d, a)
                res.record("chernoff", tail <= math.exp(-v), w, float(a), seed,
                           f"tail={tail!r} bound={math.exp(-v)!r}")

    b = rng.uniform(-0.99, 0.99, t.n)
    grad = psi1_star_grad(b)
    h = 1e-6
    worst = 0.0
    for i in range(t.n):
        e = np.zeros(t.n)
        e[i] = h
        fd = (psi1_star(b + e) - psi1_star(b - e)) / (2 * h)
        worst = max(worst, abs(fd - grad[i]) / max(abs(grad[i]), 1e-3))
    res.record("gradient_fd", worst <= FD_RTOL, w, None, seed, f"max rel err {worst:.3g}")


def run_suite(n_instances: int = 100, seed: int = 42, cfg: Optional[SolverConfig] = None,
              weights=None) -> SuiteResult:
    """Run the suite on ``n_instances`` random weight vectors, or on ``weights`` alone."""
    res = SuiteResult()
    rng = np.random.default_rng(seed)
    if weights is not None:
        check_instance(weights, res, cfg, seed, rng)
        return res
    for _ in range(n_instances):
        check_instance(random_instance(rng), res, cfg, seed, rng)
    return res
