"""Discrete optimal transport: costs, couplings, distances, interpolation."""

from .assignment import solve_exact_assignment
from .discrete import CostMatrix, DiscreteDistribution, build_cost_matrix
from .interpolate import (
    ATOM_PRUNE_THRESHOLD,
    GaussianMoments,
    centered_decomposition_check,
    gaussian_w2_interpolate,
    mccann_interpolate,
    wasserstein_distance_squared,
)
from .plan import TransportPlan
from .sinkhorn import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    LOG_DOMAIN_COST_FRACTION,
    SinkhornError,
    SinkhornState,
    sinkhorn,
)

__all__ = [
    "ATOM_PRUNE_THRESHOLD",
    "CostMatrix",
    "DEFAULT_MAX_ITERATIONS",
    "DEFAULT_TOLERANCE",
    "DiscreteDistribution",
    "GaussianMoments",
    "LOG_DOMAIN_COST_FRACTION",
    "SinkhornError",
    "SinkhornState",
    "TransportPlan",
    "build_cost_matrix",
    "centered_decomposition_check",
    "gaussian_w2_interpolate",
    "mccann_interpolate",
    "sinkhorn",
    "solve_exact_assignment",
    "wasserstein_distance_squared",
]
