"""Forward models and twin-experiment scaffolding."""

from .advection_diffusion import (
    AdvectionDiffusionParams,
    GridField,
    advect_diffuse_step,
    advect_diffuse_values,
    gaussian_blob,
)
from .lorenz63 import (
    BIASED_PARAMS,
    TRUTH_PARAMS,
    Lorenz63Params,
    fixed_points,
    lorenz63_step,
)
from .noise import HETEROSCEDASTIC, HOMOSCEDASTIC, ModelNoiseSpec, apply_model_noise
from .twin import (
    Advection1DSpec,
    Advection2DSpec,
    DynamicsSpec,
    Lorenz63Spec,
    box_average_upsample,
    evolved_sources_field,
    heteroscedastic_covariance,
    make_truth_trajectory,
    propagate_members,
    synthesize_observations,
)

__all__ = [
    "Advection1DSpec",
    "Advection2DSpec",
    "AdvectionDiffusionParams",
    "BIASED_PARAMS",
    "DynamicsSpec",
    "GridField",
    "HETEROSCEDASTIC",
    "HOMOSCEDASTIC",
    "Lorenz63Params",
    "Lorenz63Spec",
    "ModelNoiseSpec",
    "TRUTH_PARAMS",
    "advect_diffuse_step",
    "advect_diffuse_values",
    "apply_model_noise",
    "box_average_upsample",
    "evolved_sources_field",
    "fixed_points",
    "gaussian_blob",
    "heteroscedastic_covariance",
    "lorenz63_step",
    "make_truth_trajectory",
    "propagate_members",
    "synthesize_observations",
]
