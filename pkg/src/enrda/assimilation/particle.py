"""Sequential importance resampling with a Gaussian likelihood."""

from __future__ import annotations

import numpy as np

from ..ensembles import Ensemble, multinomial_resample
from ..ot import DiscreteDistribution
from .result import AnalysisResult, CycleDiagnostics


def likelihood_weights(
    particles: np.ndarray, observation: np.ndarray, obs_cov: np.ndarray
) -> np.ndarray:
    """Normalized Gaussian likelihood weights w_i ~ exp(-0.5 d_i^T R^-1 d_i).

    The shared normalizing constant cancels; the largest log-weight is
    subtracted before exponentiation so at least one weight is exp(0)."""
    particles = np.atleast_2d(np.asarray(particles, dtype=float))
    observation = np.asarray(observation, dtype=float).ravel()
    deviations = observation[None, :] - particles
    solved = np.linalg.solve(np.atleast_2d(obs_cov), deviations.T)
    log_weights = -0.5 * np.einsum("im,mi->i", deviations, solved)
    log_weights -= log_weights.max()
    weights = np.exp(log_weights)
    total = weights.sum()
    if not np.isfinite(total) or total <= 0.0:
        # unreachable after the max shift; kept as a degeneracy guard
        raise ValueError("particle weights degenerated to zero")
    return weights / total


def particle_filter_analysis(
    particles: Ensemble,
    observation: np.ndarray,
    obs_cov: np.ndarray,
    rng: np.random.Generator,
) -> AnalysisResult:
    """Reweight by the observation likelihood, then multinomial-resample
    back to equal weights."""
    weights = likelihood_weights(particles.members, observation, obs_cov)
    ess = float(1.0 / np.sum(weights**2))
    posterior = DiscreteDistribution(particles.members, weights)
    resampled = multinomial_resample(posterior, particles.size, rng, time=particles.time)
    diagnostics = CycleDiagnostics(
        method="particle_filter",
        time=particles.time,
        effective_sample_size=ess,
    )
    return AnalysisResult(diagnostics=diagnostics, ensemble=resampled)
