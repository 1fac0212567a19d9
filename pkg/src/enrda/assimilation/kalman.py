"""Stochastic (perturbed-observation) ensemble Kalman analysis."""

from __future__ import annotations

import numpy as np

from ..ensembles import Ensemble, estimate_covariance, psd_factor
from .result import AnalysisResult, CycleDiagnostics
from .variational import kalman_gain


def enkf_update(
    members: np.ndarray,
    observation: np.ndarray,
    background_cov: np.ndarray,
    obs_cov: np.ndarray,
    perturbations: np.ndarray,
) -> tuple[np.ndarray, float]:
    """x_ai = x_i + K (y + v_i - x_i) with K = B (B + R)^-1 and identity
    observation operator; returns the analysis members and ||K||_F."""
    gain = kalman_gain(background_cov, obs_cov)
    innovations = observation[None, :] + perturbations - members
    return members + innovations @ gain.T, float(np.linalg.norm(gain))


def enkf_analysis(
    background: Ensemble,
    observation: np.ndarray,
    obs_cov: np.ndarray,
    rng: np.random.Generator,
) -> AnalysisResult:
    """Each member is updated with an independently perturbed observation;
    the gain uses the unbiased ensemble covariance."""
    if background.size < 2:
        raise ValueError("the ensemble Kalman update needs at least two members")
    observation = np.asarray(observation, dtype=float).ravel()
    background_cov = estimate_covariance(background).matrix
    factor = psd_factor(obs_cov)
    perturbations = rng.standard_normal((background.size, observation.size)) @ factor.T
    updated, gain_norm = enkf_update(
        background.members, observation, background_cov, obs_cov, perturbations
    )
    diagnostics = CycleDiagnostics(
        method="enkf",
        time=background.time,
        gain_norm=gain_norm,
    )
    return AnalysisResult(
        diagnostics=diagnostics, ensemble=Ensemble(updated, time=background.time)
    )
