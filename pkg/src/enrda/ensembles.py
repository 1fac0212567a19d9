"""Ensemble <-> histogram bridging, stochastic sampling, moment estimation.

Shared by every assimilator: ensembles become uniform histograms, given
observations become perturbed-observation histograms, analysis histograms
are resampled back into ensembles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ot import DiscreteDistribution


@dataclass
class Ensemble:
    """M equally-weighted state vectors in R^m at a model time."""

    members: np.ndarray  # (M, m)
    time: float = 0.0

    def __post_init__(self) -> None:
        members = np.asarray(self.members, dtype=float)
        if members.ndim == 1:
            members = members.reshape(-1, 1)
        if members.ndim != 2 or members.shape[0] < 1:
            raise ValueError("members must be a (M, m) array with M >= 1")
        self.members = members

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @property
    def dim(self) -> int:
        return self.members.shape[1]

    def mean(self) -> np.ndarray:
        return self.members.mean(axis=0)


@dataclass
class CovarianceEstimate:
    """Unbiased sample covariance with its mean."""

    matrix: np.ndarray
    mean: np.ndarray


def ensemble_to_histogram(ensemble: Ensemble) -> DiscreteDistribution:
    """Uniform histogram on the member locations; duplicate members stay
    separate atoms."""
    m = ensemble.size
    return DiscreteDistribution(ensemble.members, np.full(m, 1.0 / m))


def psd_factor(covariance: np.ndarray) -> np.ndarray:
    """Factor F with F F^T = covariance for a (numerically) PSD matrix.

    Diagonal matrices take the cheap square-root path; otherwise Cholesky
    with a trace-scaled jitter retry, falling back to an eigendecomposition
    with clipped eigenvalues.
    """
    covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
    n = covariance.shape[0]
    if covariance.shape != (n, n):
        raise ValueError("covariance must be square")
    diag = np.diagonal(covariance)
    if np.count_nonzero(covariance - np.diag(diag)) == 0:
        if np.any(diag < 0):
            raise ValueError("covariance has negative diagonal entries")
        return np.diag(np.sqrt(diag))
    try:
        return np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError:
        pass
    jitter = 1e-12 * np.trace(covariance) / n
    if jitter > 0:
        try:
            return np.linalg.cholesky(covariance + jitter * np.eye(n))
        except np.linalg.LinAlgError:
            pass
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    if eigenvalues.min() < -1e-8 * max(1.0, eigenvalues.max()):
        raise ValueError("covariance is not positive semidefinite")
    return eigenvectors * np.sqrt(np.maximum(eigenvalues, 0.0))


def perturb_observations(
    observation: np.ndarray,
    covariance: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> DiscreteDistribution:
    """Histogram of N atoms y + v_j, v_j ~ N(0, R), uniform weights.

    The spread of the atoms is what encodes the observation density, so the
    weights stay uniform.
    """
    if n < 1:
        raise ValueError("need at least one perturbed observation")
    observation = np.asarray(observation, dtype=float).ravel()
    factor = psd_factor(covariance)
    if factor.shape[0] != observation.size:
        raise ValueError("covariance size does not match the observation")
    noise = rng.standard_normal((n, observation.size)) @ factor.T
    return DiscreteDistribution(observation[None, :] + noise, np.full(n, 1.0 / n))


def multinomial_resample(
    distribution: DiscreteDistribution,
    m: int,
    rng: np.random.Generator,
    time: float = 0.0,
) -> Ensemble:
    """Draw M members i.i.d. from the categorical law over the atoms."""
    if m < 1:
        raise ValueError("need at least one resampled member")
    counts = rng.multinomial(m, distribution.weights)
    members = np.repeat(distribution.support, counts, axis=0)
    return Ensemble(members, time=time)


def estimate_covariance(ensemble: Ensemble) -> CovarianceEstimate:
    """Sample mean and unbiased (1/(M-1)) covariance of the members."""
    if ensemble.size < 2:
        raise ValueError("covariance estimation needs at least two members")
    mean = ensemble.mean()
    anomalies = ensemble.members - mean
    matrix = anomalies.T @ anomalies / (ensemble.size - 1)
    return CovarianceEstimate(matrix=matrix, mean=mean)
