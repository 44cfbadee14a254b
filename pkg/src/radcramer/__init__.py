"""Cramér transform of weighted Rademacher sums.

Two independent routes to the rate function ``psi_t^*`` of
``X_t = sum_i t_i eps_i``: Legendre inversion of the CGF derivative
(:mod:`radcramer.legendre`) and constrained entropy minimization
(:mod:`radcramer.variational`), with exact oracles (:mod:`radcramer.oracle`)
and large-deviation experiments (:mod:`radcramer.ldp`).
"""

__version__ = "0.1.0"

from .core import (
    LN2,
    DualVector,
    WeightVector,
    as_weights,
    cgf,
    cgf_prime,
    cgf_second,
    entropy_f,
    ln_cosh,
    psi1_star,
    psi1_star_grad,
)
from .errors import (
    BoundaryError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    ExteriorError,
    InfeasibleError,
    RadCramerError,
    SizeError,
)
from .legendre import RatePoint, SolverConfig, cramer_transform, rate_domain, solve_tilt
from .oracle import (
    ExactDist,
    conjugate_by_grid,
    convolve_iid,
    exact_cgf,
    exact_distribution,
    tail_probability,
)
from .variational import (
    VariationalSolution,
    kkt_certificate,
    minimize_entropy,
    project_box_hyperplane,
)
from .ldp import (
    ExperimentReport,
    chernoff_check,
    mc_tail_probability,
    rate_convergence,
    sample_series,
    tilted_sampler,
)

__all__ = [
    "__version__",
    "LN2", "DualVector", "WeightVector", "as_weights", "cgf", "cgf_prime", "cgf_second",
    "entropy_f", "ln_cosh", "psi1_star", "psi1_star_grad",
    "BoundaryError", "ConvergenceError", "DegenerateError", "DomainError", "ExteriorError",
    "InfeasibleError", "RadCramerError", "SizeError",
    "RatePoint", "SolverConfig", "cramer_transform", "rate_domain", "solve_tilt",
    "ExactDist", "conjugate_by_grid", "convolve_iid", "exact_cgf", "exact_distribution",
    "tail_probability",
    "VariationalSolution", "kkt_certificate", "minimize_entropy", "project_box_hyperplane",
    "ExperimentReport", "chernoff_check", "mc_tail_probability", "rate_convergence",
    "sample_series", "tilted_sampler",
]
