"""Twin-experiment building blocks: truth trajectories, synthetic
observations, and biased-model forecast propagation.

Each dynamics spec carries a truth parameterization (generates the ground
truth and the observations) and a biased one (drives every forecast), plus
the noise levels of the experiment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .advection_diffusion import (
    AdvectionDiffusionParams,
    GridField,
    advect_diffuse_values,
    gaussian_blob,
)
from .lorenz63 import BIASED_PARAMS, TRUTH_PARAMS, Lorenz63Params, lorenz63_step
from .noise import HETEROSCEDASTIC, HOMOSCEDASTIC, ModelNoiseSpec, apply_noise_values

LORENZ_INITIAL_STATE = (1.508870, -1.531271, 25.46091)


@dataclass(frozen=True)
class Lorenz63Spec:
    truth: Lorenz63Params = TRUTH_PARAMS
    biased: Lorenz63Params = BIASED_PARAMS
    initial_state: tuple[float, float, float] = LORENZ_INITIAL_STATE
    initial_spread_variance: float = 2.0
    model_noise: ModelNoiseSpec = ModelNoiseSpec(HOMOSCEDASTIC, 0.02)
    observation_variance: float = 2.0
    observation_correlations: tuple[float, float] = (0.5, 0.25)

    kind = "lorenz63"

    @property
    def dt(self) -> float:
        return self.truth.dt

    def observation_covariance(self) -> np.ndarray:
        first, second = self.observation_correlations
        correlation = np.array(
            [[1.0, first, second], [first, 1.0, first], [second, first, 1.0]]
        )
        return self.observation_variance * correlation


def _ad_params(velocity, diffusivity, spacing, dt, extent) -> AdvectionDiffusionParams:
    return AdvectionDiffusionParams(
        velocity=tuple(velocity),
        diffusivity=tuple(diffusivity),
        spacing=tuple(spacing),
        dt=dt,
        extent=tuple(extent),
    )


@dataclass(frozen=True)
class Advection1DSpec:
    truth: AdvectionDiffusionParams = field(
        default_factory=lambda: _ad_params((0.8,), (0.25,), (0.1,), 0.5, (60.0,))
    )
    biased: AdvectionDiffusionParams = field(
        default_factory=lambda: _ad_params((0.12,), (0.4,), (0.1,), 0.5, (60.0,))
    )
    # (mass, age): point masses released at the origin and evolved with the
    # truth parameters for `age` time units before the experiment starts
    sources: tuple[tuple[float, float], ...] = ((300.0, 15.0), (300.0, 25.0))
    model_noise: ModelNoiseSpec = ModelNoiseSpec(HETEROSCEDASTIC, 0.02)
    observation_noise_fraction: float = 0.05

    kind = "ad1d"

    @property
    def dt(self) -> float:
        return self.truth.dt


@dataclass(frozen=True)
class Advection2DSpec:
    truth: AdvectionDiffusionParams = field(
        default_factory=lambda: _ad_params(
            (0.08, 0.08), (0.02, 0.02), (0.2, 0.2), 0.5, (10.0, 10.0)
        )
    )
    biased: AdvectionDiffusionParams = field(
        default_factory=lambda: _ad_params(
            (0.12, 0.12), (0.01, 0.01), (0.2, 0.2), 0.5, (10.0, 10.0)
        )
    )
    sources: tuple[tuple[float, float], ...] = ((1000.0, 25.0), (4000.0, 35.0))
    observation_sources: tuple[tuple[float, float], ...] = ((800.0, 25.0), (2400.0, 35.0))
    box_average_factor: int = 2
    model_noise: ModelNoiseSpec = ModelNoiseSpec(HETEROSCEDASTIC, 0.02)
    observation_noise_fraction: float = 0.05

    kind = "ad2d"

    @property
    def dt(self) -> float:
        return self.truth.dt


DynamicsSpec = Lorenz63Spec | Advection1DSpec | Advection2DSpec


def evolved_sources_field(
    params: AdvectionDiffusionParams,
    sources: tuple[tuple[float, float], ...],
    elapsed: float = 0.0,
) -> GridField:
    """Superposition of origin point-masses evolved for (age + elapsed)
    under ``params``, via the closed-form fundamental solution."""
    axes = params.axes()
    total = np.zeros(params.shape)
    for mass, age in sources:
        t = age + elapsed
        center = [v * t for v in params.velocity]
        variance = [2.0 * d * t for d in params.diffusivity]
        total += gaussian_blob(params, mass, center, variance).values
    return GridField(total, axes)


def make_truth_trajectory(spec: DynamicsSpec, horizon: float) -> tuple[np.ndarray, np.ndarray]:
    """Noise-free truth run under the truth parameters.

    Returns (times, states); states has shape (T+1, m) with the flattened
    state per time.  The 2-D experiment is a single snapshot (horizon 0).
    """
    if isinstance(spec, Lorenz63Spec):
        n_steps = int(round(horizon / spec.dt))
        state = np.asarray(spec.initial_state, dtype=float)
        states = np.empty((n_steps + 1, 3))
        states[0] = state
        for k in range(1, n_steps + 1):
            state = lorenz63_step(state, spec.truth)
            states[k] = state
        return spec.dt * np.arange(n_steps + 1), states
    if isinstance(spec, Advection1DSpec):
        n_steps = int(round(horizon / spec.dt))
        state = evolved_sources_field(spec.truth, spec.sources).values
        states = np.empty((n_steps + 1, state.size))
        states[0] = state
        for k in range(1, n_steps + 1):
            state = advect_diffuse_values(state, spec.truth)
            states[k] = state
        return spec.dt * np.arange(n_steps + 1), states
    if isinstance(spec, Advection2DSpec):
        state = evolved_sources_field(spec.truth, spec.sources).values
        return np.zeros(1), state.reshape(1, -1)
    raise ValueError(f"unknown dynamics kind {spec!r}")


def box_average_upsample(values: np.ndarray, factor: int) -> np.ndarray:
    """Average disjoint factor x factor blocks, then replicate each block
    value back onto the fine grid (sensor resolving coarser scales)."""
    n1, n2 = values.shape
    if n1 % factor or n2 % factor:
        raise ValueError("grid size must be divisible by the box-average factor")
    coarse = values.reshape(n1 // factor, factor, n2 // factor, factor).mean(axis=(1, 3))
    return np.repeat(np.repeat(coarse, factor, axis=0), factor, axis=1)


def synthesize_observations(
    truth: np.ndarray,
    kind: str,
    params,
    rng: np.random.Generator,
) -> np.ndarray:
    """Corrupt a truth state into an observation vector (identity operator).

    kinds: ``heteroscedastic`` (params = variance fraction),
    ``correlated-gaussian`` (params = covariance matrix), and
    ``representativeness-2d`` (params = Advection2DSpec; builds the
    low-mass twin field, box-averages it, and adds heteroscedastic noise).
    """
    truth = np.asarray(truth, dtype=float)
    if kind == "heteroscedastic":
        fraction = float(params)
        noise = ModelNoiseSpec(HETEROSCEDASTIC, fraction)
        return apply_noise_values(truth, noise, rng)
    if kind == "correlated-gaussian":
        covariance = np.asarray(params, dtype=float)
        factor = np.linalg.cholesky(covariance)
        return truth + factor @ rng.standard_normal(truth.shape[-1])
    if kind == "representativeness-2d":
        spec: Advection2DSpec = params
        twin = evolved_sources_field(spec.truth, spec.observation_sources).values
        averaged = box_average_upsample(twin, spec.box_average_factor)
        noise = ModelNoiseSpec(HETEROSCEDASTIC, spec.observation_noise_fraction)
        return apply_noise_values(averaged, noise, rng).reshape(truth.shape)
    raise ValueError(f"unknown observation kind {kind!r}")


def heteroscedastic_covariance(values: np.ndarray, fraction: float) -> np.ndarray:
    """Diagonal covariance with variance fraction * value^2 per entry, the
    assimilators' proxy for state-proportional observation noise."""
    return np.diag(fraction * np.asarray(values, dtype=float).ravel() ** 2)


def propagate_members(
    members: np.ndarray,
    spec: DynamicsSpec,
    n_steps: int,
    rng: np.random.Generator | None = None,
    biased: bool = True,
) -> np.ndarray:
    """Advance flattened states (M, m) by ``n_steps`` model steps; the
    biased parameters plus per-step model noise when ``rng`` is given."""
    members = np.asarray(members, dtype=float)
    if isinstance(spec, Lorenz63Spec):
        params = spec.biased if biased else spec.truth
        for _ in range(n_steps):
            members = lorenz63_step(members, params)
            if rng is not None:
                members = apply_noise_values(members, spec.model_noise, rng)
        return members
    if isinstance(spec, (Advection1DSpec, Advection2DSpec)):
        params = spec.biased if biased else spec.truth
        shape = members.shape[:-1] + params.shape
        states = members.reshape(shape)
        for _ in range(n_steps):
            states = advect_diffuse_values(states, params)
            if rng is not None:
                states = apply_noise_values(states, spec.model_noise, rng)
        return states.reshape(members.shape)
    raise ValueError(f"unknown dynamics kind {spec!r}")
