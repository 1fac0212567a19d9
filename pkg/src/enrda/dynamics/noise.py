"""Additive stochastic model error applied between deterministic steps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ensembles import Ensemble
from .advection_diffusion import GridField

HETEROSCEDASTIC = "heteroscedastic-relative"
HOMOSCEDASTIC = "homoscedastic-isotropic"


@dataclass(frozen=True)
class ModelNoiseSpec:
    """Either N(0, level * x^2) per entry (relative) or N(0, level * I)."""

    kind: str
    level: float

    def __post_init__(self) -> None:
        if self.kind not in (HETEROSCEDASTIC, HOMOSCEDASTIC):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.level < 0:
            raise ValueError("noise level must be nonnegative")


def apply_noise_values(
    values: np.ndarray, spec: ModelNoiseSpec, rng: np.random.Generator
) -> np.ndarray:
    if spec.level == 0.0:
        return values
    draw = rng.standard_normal(values.shape)
    if spec.kind == HETEROSCEDASTIC:
        # variance level * x^2, which vanishes where the state is zero
        return values + np.sqrt(spec.level) * np.abs(values) * draw
    return values + np.sqrt(spec.level) * draw


def apply_model_noise(state, spec: ModelNoiseSpec, rng: np.random.Generator):
    """Perturb an Ensemble, GridField, or bare array; returns the same type."""
    if isinstance(state, Ensemble):
        return Ensemble(apply_noise_values(state.members, spec, rng), time=state.time)
    if isinstance(state, GridField):
        return GridField(apply_noise_values(state.values, spec, rng), state.axes)
    return apply_noise_values(np.asarray(state, dtype=float), spec, rng)
