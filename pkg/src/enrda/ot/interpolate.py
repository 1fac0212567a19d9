"""Displacement interpolation and 2-Wasserstein distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import solve_exact_assignment
from .discrete import DiscreteDistribution, build_cost_matrix
from .plan import TransportPlan
from .sinkhorn import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE, sinkhorn

# McCann atoms lighter than this fraction of total mass are dropped
ATOM_PRUNE_THRESHOLD = 1e-12


def mccann_interpolate(
    plan: TransportPlan,
    source: DiscreteDistribution,
    target: DiscreteDistribution,
    eta: float,
    prune_threshold: float = ATOM_PRUNE_THRESHOLD,
) -> DiscreteDistribution:
    """Displacement interpolant of a coupling: mass u_ij sits at
    z_ij = eta * x_i + (1 - eta) * y_j.

    eta = 1 reproduces the source histogram, eta = 0 the target.  Atoms
    below ``prune_threshold`` of the total mass are dropped and the rest
    renormalized, which keeps entropic plans from bloating the support with
    numerically-zero atoms.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"displacement parameter must lie in [0, 1], got {eta}")
    m, n = plan.mass.shape
    if source.n_atoms != m or target.n_atoms != n:
        raise ValueError("plan shape does not match the source/target supports")
    x = source.support[:, None, :]  # (M, 1, d)
    y = target.support[None, :, :]  # (1, N, d)
    points = (eta * x + (1.0 - eta) * y).reshape(m * n, -1)
    weights = plan.mass.reshape(m * n)
    keep = weights >= prune_threshold * weights.sum()
    weights = weights[keep]
    return DiscreteDistribution(points[keep], weights / weights.sum())


@dataclass(frozen=True)
class GaussianMoments:
    """Mean and covariance of a Gaussian, the closed-form endpoint of the
    discrete pipeline."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float).ravel()
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise ValueError("covariance shape does not match the mean")
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(cov)) < -1e-12 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance must be positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)


def _spd_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    return (eigenvectors * np.sqrt(np.maximum(eigenvalues, 0.0))) @ eigenvectors.T


def gaussian_w2_interpolate(
    a: GaussianMoments, b: GaussianMoments, eta: float
) -> GaussianMoments:
    """Wasserstein geodesic between two Gaussians, weight eta on ``a``.

    mean_eta = eta mu_a + (1-eta) mu_b and
    cov_eta  = S^-1/2 (eta S + (1-eta)(S^1/2 cov_b S^1/2)^1/2)^2 S^-1/2
    with S = cov_a, which must be strictly positive definite.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"displacement parameter must lie in [0, 1], got {eta}")
    eigenvalues = np.linalg.eigvalsh(a.covariance)
    if np.min(eigenvalues) <= 0:
        raise ValueError(
            "first covariance is singular; add diagonal jitter before interpolating"
        )
    mean = eta * a.mean + (1.0 - eta) * b.mean
    root = _spd_sqrt(a.covariance)
    inverse_root = np.linalg.inv(root)
    cross = _spd_sqrt(root @ b.covariance @ root)
    inner = eta * a.covariance + (1.0 - eta) * cross
    covariance = inverse_root @ inner @ inner @ inverse_root
    covariance = 0.5 * (covariance + covariance.T)
    return GaussianMoments(mean, covariance)


def wasserstein_distance_squared(
    source: DiscreteDistribution,
    target: DiscreteDistribution,
    gamma: float = 0.0,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Squared 2-Wasserstein distance <C, U*> with squared-Euclidean cost.

    gamma = 0 uses the exact assignment solve and therefore requires
    uniform, equal-size marginals; any positive gamma uses the entropic
    solver, whose value upper-bounds the exact one.
    """
    cost = build_cost_matrix(source, target, q=2.0)
    if gamma == 0.0:
        uniform_ok = (
            source.n_atoms == target.n_atoms
            and np.allclose(source.weights, 1.0 / source.n_atoms, atol=1e-12)
            and np.allclose(target.weights, 1.0 / target.n_atoms, atol=1e-12)
        )
        if not uniform_ok:
            raise ValueError(
                "gamma=0 requires uniform equal-size marginals (assignment case); "
                "pass gamma > 0 for general histograms"
            )
        return solve_exact_assignment(cost).transport_cost
    plan, _ = sinkhorn(
        cost, source.weights, target.weights, gamma, tolerance, max_iterations
    )
    return plan.transport_cost


def centered_decomposition_check(
    source: DiscreteDistribution,
    target: DiscreteDistribution,
    gamma: float = 0.0,
) -> tuple[float, float, float]:
    """Split the squared distance into shape and translation parts:
    d2(p, q) = d2(centered p, centered q) + ||mean p - mean q||^2.

    Returns (total, centered, mean_shift); the identity is exact for the
    assignment solve and approximate under entropic smoothing.
    """
    total = wasserstein_distance_squared(source, target, gamma)
    centered = wasserstein_distance_squared(source.centered(), target.centered(), gamma)
    shift = source.mean() - target.mean()
    return total, centered, float(shift @ shift)
