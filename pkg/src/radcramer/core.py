"""Scalar kernels and the cumulant functionals of a weighted Rademacher sum.

For weights ``t`` the series ``X = sum_i t_i * eps_i`` with fair random signs
has cumulant generating function

.. math::

    \\psi_t(s) = \\sum_i \\ln\\cosh(s t_i),

and the entropy functional on sign means ``b in [-1, 1]^n`` is

.. math::

    \\psi_1^*(b) = \\tfrac12 \\sum_i f(b_i), \\qquad
    f(x) = (1+x)\\ln(1+x) + (1-x)\\ln(1-x).

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlog1py

from .errors import BoundaryError, DomainError

__all__ = [
    "LN2",
    "LN_COSH_THRESHOLD",
    "WeightVector",
    "DualVector",
    "as_weights",
    "ln_cosh",
    "entropy_f",
    "cgf",
    "cgf_prime",
    "cgf_second",
    "psi1_star",
    "psi1_star_grad",
]

LN2 = float(np.log(2.0))

# beyond this |x| the remainder log1p(exp(-2|x|)) < 5e-18
LN_COSH_THRESHOLD = 20.0


@dataclass(frozen=True)
class WeightVector:
    """Finite weight sequence ``t`` with cached norms.

    Zero weights are kept (they fix the length of dual vectors) but are
    skipped by every sum in this package.
    """

    weights: np.ndarray
    l1_norm: float = field(init=False)
    l2_norm: float = field(init=False)
    nonzero_count: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "l1_norm", float(np.sum(np.abs(w))))
        object.__setattr__(self, "l2_norm", float(np.sqrt(np.sum(w * w))))
        object.__setattr__(self, "nonzero_count", int(np.count_nonzero(w)))

    def __len__(self):
        return self.weights.size

    @property
    def n(self) -> int:
        return self.weights.size

    @property
    def degenerate(self) -> bool:
        """True when every weight is zero (rate function is the indicator of {0})."""
        return self.nonzero_count == 0

    @property
    def nonzero_mask(self) -> np.ndarray:
        return self.weights != 0.0

    def tolist(self) -> list:
        return self.weights.tolist()



def as_weights(t) -> WeightVector:
    """Coerce a sequence (or an existing WeightVector) to a WeightVector."""
    if isinstance(t, WeightVector):
        return t
    return WeightVector(np.atleast_1d(np.asarray(t, dtype=np.float64)))


@dataclass(frozen=True)
class DualVector:
    """Sign-mean vector ``b`` with ``|b_i| <= 1``; the endpoints are allowed."""

    values: np.ndarray

    def __post_init__(self):
        b = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(b)):
            raise DomainError("dual vector entries must be finite")
        if np.any(np.abs(b) > 1.0):
            raise DomainError("dual vector entries must satisfy |b_i| <= 1")
        b.setflags(write=False)
        object.__setattr__(self, "values", b)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def tolist(self) -> list:
        return self.values.tolist()


def _values(b) -> np.ndarray:
    if isinstance(b, DualVector):
        return b.values
    return np.asarray(b, dtype=np.float64)


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def ln_cosh(x):
    """Overflow-free ``log(cosh(x))``, elementwise.

    Uses ``|x| - ln 2 + log1p(exp(-2|x|))`` once ``|x|`` exceeds
    :data:`LN_COSH_THRESHOLD`.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DomainError("ln_cosh requires finite input")
    a = np.abs(x)
    small = a <= LN_COSH_THRESHOLD
    out = np.empty_like(a)
    out[small] = np.log(np.cosh(a[small]))
    big = a[~small]
    out[~small] = (big - LN2) + np.log1p(np.exp(-2.0 * big))
    return _scalar_or_array(out)


_F_SMALL = 0.5


def entropy_f(x):
    """``(1+x) ln(1+x) + (1-x) ln(1-x)`` with ``0 ln 0 = 0``.

    Defined on the closed interval ``[-1, 1]`` (``f(+-1) = 2 ln 2``); returns
    ``inf`` outside it rather than raising.
    """
    x = np.asarray(x, dtype=np.float64)
    inside = np.abs(x) <= 1.0
    xc = np.where(inside, x, 0.0)
    out = xlog1py(1.0 + xc, xc) + xlog1py(1.0 - xc, -xc)
    # near 0 the two xlog1py terms cancel to O(x^2); 2x atanh(x) + log1p(-x^2)
    # only cancels 2:1 and keeps full relative precision
    small = np.abs(xc) <= _F_SMALL
    xs = np.where(small, xc, 0.0)
    out = np.where(small, 2.0 * xs * np.arctanh(xs) + np.log1p(-xs * xs), out)
    out = np.where(inside, out, np.inf)
    return _scalar_or_array(out)


def cgf(t, s: float) -> float:
    """Cumulant generating function ``sum_i ln cosh(s t_i)``."""
    t = as_weights(t)
    s = float(s)
    if not np.isfinite(s):
        raise DomainError("s must be finite")
    w = t.weights[t.nonzero_mask]
    if w.size == 0:
        return 0.0
    return float(np.sum(ln_cosh(s * w)))


def cgf_prime(t, s: float) -> float:
    """Derivative ``sum_i t_i tanh(s t_i)``; strictly increasing when some t_i != 0."""
    t = as_weights(t)
    s = float(s)
    if not np.isfinite(s):
        raise DomainError("s must be finite")
    w = t.weights[t.nonzero_mask]
    return float(np.sum(w * np.tanh(s * w)))


def cgf_second(t, s: float) -> float:
    """Second derivative ``sum_i t_i^2 sech^2(s t_i)``."""
    t = as_weights(t)
    s = float(s)
    if not np.isfinite(s):
        raise DomainError("s must be finite")
    w = t.weights[t.nonzero_mask]
    # sech^2 via exp keeps precision where 1 - tanh^2 would cancel
    a = np.abs(s * w)
    e = np.exp(-2.0 * a)
    sech2 = 4.0 * e / (1.0 + e) ** 2
    return float(np.sum(w * w * sech2))


def psi1_star(b) -> float:
    """Entropy functional ``(1/2) sum_i f(b_i)``; ``inf`` if some ``|b_i| > 1``."""
    v = _values(b)
    return float(0.5 * np.sum(entropy_f(v)))


def psi1_star_grad(b) -> np.ndarray:
    """Gradient of :func:`psi1_star`, componentwise ``arctanh(b_i)``.

    Raises
    ------
    BoundaryError
        If any ``|b_i| >= 1``, where the gradient is unbounded.
    """
    v = _values(b)
    if np.any(np.abs(v) >= 1.0):
        raise BoundaryError("gradient of the entropy functional is unbounded at |b_i| = 1")
    return np.arctanh(v)
