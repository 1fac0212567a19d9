"""Forecast-propagate-analyze dispatch shared by the experiment runner."""

from __future__ import annotations

import hashlib

import numpy as np

from ..dynamics import DynamicsSpec, propagate_members
from ..ensembles import Ensemble
from .config import AssimilatorConfig
from .kalman import enkf_analysis
from .particle import particle_filter_analysis
from .result import AnalysisResult, CycleDiagnostics
from .transport import enrda_analysis
from .variational import three_d_var_analysis

# union of per-method carried states: ensembles for the ensemble methods,
# a bare state vector for the variational method
MethodState = Ensemble | np.ndarray


def observation_digest(observation: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(observation).tobytes()).hexdigest()[:16]


def heteroscedastic_background_cov(
    background_mean: np.ndarray, fraction: float, alpha_target: float | None,
    obs_cov: np.ndarray,
) -> np.ndarray:
    """Diagonal B with entries fraction * x_b^2 (the model-noise structure),
    floored for positive definiteness; optionally rescaled so that
    tr(R) / (tr(R) + tr(B)) equals ``alpha_target``."""
    base = fraction * np.asarray(background_mean, dtype=float).ravel() ** 2
    floor = max(1e-10 * float(base.max(initial=0.0)), 1e-12)
    entries = base + floor
    if alpha_target is not None:
        trace_r = float(np.trace(obs_cov))
        scale = trace_r * (1.0 - alpha_target) / (alpha_target * entries.sum())
        entries = entries * scale
    return np.diag(entries)


def floored_diagonal(cov: np.ndarray) -> np.ndarray:
    """Add a tiny diagonal floor so heteroscedastic covariances with zero
    entries stay factorizable."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    floor = max(1e-10 * float(np.max(np.diagonal(cov), initial=0.0)), 1e-12)
    return cov + floor * np.eye(cov.shape[0])


def run_assimilation_cycle(
    state: MethodState,
    observation: np.ndarray,
    obs_cov: np.ndarray,
    cfg: AssimilatorConfig,
    spec: DynamicsSpec,
    n_steps: int,
    model_rng: np.random.Generator | None,
    analysis_rng: np.random.Generator,
    noise_fraction: float | None = None,
) -> tuple[MethodState, AnalysisResult]:
    """Propagate the carried state ``n_steps`` biased-model steps with model
    noise, then apply the configured analysis.

    ``noise_fraction`` feeds the variational background-covariance
    construction (defaults to the dynamics model-noise level).  Returns the
    state to carry into the next cycle plus the analysis result.
    """
    observation = np.asarray(observation, dtype=float).ravel()
    fraction = noise_fraction if noise_fraction is not None else spec.model_noise.level

    if cfg.method == "three_d_var":
        if not isinstance(state, np.ndarray):
            raise TypeError("the variational method carries a bare state vector")
        forecast = state
        if n_steps:
            forecast = propagate_members(
                forecast[None, :], spec, n_steps, rng=model_rng
            )[0]
        if cfg.background_cov is not None:
            background_cov = np.asarray(cfg.background_cov, dtype=float)
        elif cfg.covariance_shape == "uniform":
            n = observation.size
            r_bar = float(np.trace(obs_cov)) / n
            obs_cov = r_bar * np.eye(n)
            kappa = r_bar * (1.0 - cfg.alpha_target) / cfg.alpha_target
            background_cov = kappa * np.eye(n)
        else:
            background_cov = heteroscedastic_background_cov(
                forecast, fraction, cfg.alpha_target, obs_cov
            )
        analysis_state = three_d_var_analysis(
            forecast, observation, background_cov, obs_cov
        )
        alpha = float(
            np.trace(obs_cov) / (np.trace(obs_cov) + np.trace(background_cov))
        )
        result = AnalysisResult(
            diagnostics=CycleDiagnostics(
                method=cfg.method,
                time=0.0,
                background_weight=alpha,
                observation_digest=observation_digest(observation),
            ),
            state=analysis_state,
        )
        return analysis_state, result

    if not isinstance(state, Ensemble):
        raise TypeError("ensemble methods carry an Ensemble state")
    members = state.members
    if n_steps:
        members = propagate_members(members, spec, n_steps, rng=model_rng)
    forecast = Ensemble(members, time=state.time + n_steps * spec.dt)

    if cfg.method == "enrda":
        result = enrda_analysis(forecast, observation, obs_cov, cfg, analysis_rng)
    elif cfg.method == "enkf":
        result = enkf_analysis(forecast, observation, obs_cov, analysis_rng)
    elif cfg.method == "particle_filter":
        result = particle_filter_analysis(forecast, observation, obs_cov, analysis_rng)
    else:
        raise ValueError(f"unknown method {cfg.method!r}")
    result.diagnostics.observation_digest = observation_digest(observation)
    return result.ensemble, result
