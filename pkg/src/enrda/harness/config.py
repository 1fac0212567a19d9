"""Experiment configuration: a YAML key-value tree <-> typed dataclasses.

The schema is deliberately flat and explicit so every constant of the two
reference setups is expressible and diffs stay readable.  ``validate``
raises :class:`ConfigError` with the dotted path of the offending field.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import yaml

from ..assimilation import AssimilatorConfig, EtaPolicy, GammaPolicy, SinkhornSettings
from ..dynamics import (
    Advection1DSpec,
    Advection2DSpec,
    AdvectionDiffusionParams,
    DynamicsSpec,
    Lorenz63Params,
    Lorenz63Spec,
    ModelNoiseSpec,
)
from .metrics import BIAS_MODES

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "ENRDA_OUT"


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dynamics: DynamicsSpec
    horizon: float
    assimilation_interval: int
    assimilators: tuple[AssimilatorConfig, ...]
    replicates: int = 1
    base_seed: int = 0
    output_dir: str | None = None
    workers: int | None = None
    bias_mode: str = "absolute_mean"
    dump_members: bool = False

    def resolved_output_dir(self, override: str | None = None) -> Path:
        """CLI flag wins, then the environment override, then the config."""
        chosen = override or os.environ.get(OUTPUT_DIR_ENV) or self.output_dir
        if not chosen:
            raise ConfigError("output_dir: no output directory configured")
        return Path(chosen)


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: required field is missing")
    return mapping[key]


def _as_tuple(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def _noise_from_dict(data: dict, path: str) -> ModelNoiseSpec:
    try:
        return ModelNoiseSpec(
            kind=_require(data, "kind", path), level=float(_require(data, "level", path))
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _ad_params_from_dict(data: dict, path: str) -> AdvectionDiffusionParams:
    try:
        return AdvectionDiffusionParams(
            velocity=_as_tuple(_require(data, "velocity", path)),
            diffusivity=_as_tuple(_require(data, "diffusivity", path)),
            spacing=_as_tuple(_require(data, "spacing", path)),
            dt=float(_require(data, "dt", path)),
            extent=_as_tuple(_require(data, "extent", path)),
        )
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def _dynamics_from_dict(data: dict, path: str = "dynamics") -> DynamicsSpec:
    kind = _require(data, "kind", path)
    try:
        if kind == "lorenz63":
            truth = data.get("truth", {})
            biased = data.get("biased", {})
            return Lorenz63Spec(
                truth=Lorenz63Params(**truth) if truth else Lorenz63Params(),
                biased=Lorenz63Params(**biased)
                if biased
                else Lorenz63Spec().biased,
                initial_state=tuple(
                    data.get("initial_state", Lorenz63Spec().initial_state)
                ),
                initial_spread_variance=float(data.get("initial_spread_variance", 2.0)),
                model_noise=_noise_from_dict(
                    data.get(
                        "model_noise",
                        {"kind": "homoscedastic-isotropic", "level": 0.02},
                    ),
                    f"{path}.model_noise",
                ),
                observation_variance=float(data.get("observation_variance", 2.0)),
                observation_correlations=tuple(
                    data.get("observation_correlations", (0.5, 0.25))
                ),
            )
        if kind in ("ad1d", "ad2d"):
            default = Advection1DSpec() if kind == "ad1d" else Advection2DSpec()
            truth = (
                _ad_params_from_dict(data["truth"], f"{path}.truth")
                if "truth" in data
                else default.truth
            )
            biased = (
                _ad_params_from_dict(data["biased"], f"{path}.biased")
                if "biased" in data
                else default.biased
            )
            noise = _noise_from_dict(
                data.get(
                    "model_noise", {"kind": "heteroscedastic-relative", "level": 0.02}
                ),
                f"{path}.model_noise",
            )
            sources = tuple(
                (float(m), float(a)) for m, a in data.get("sources", default.sources)
            )
            fraction = float(data.get("observation_noise_fraction", 0.05))
            if kind == "ad1d":
                return Advection1DSpec(
                    truth=truth,
                    biased=biased,
                    sources=sources,
                    model_noise=noise,
                    observation_noise_fraction=fraction,
                )
            return Advection2DSpec(
                truth=truth,
                biased=biased,
                sources=sources,
                observation_sources=tuple(
                    (float(m), float(a))
                    for m, a in data.get("observation_sources", default.observation_sources)
                ),
                box_average_factor=int(data.get("box_average_factor", 2)),
                model_noise=noise,
                observation_noise_fraction=fraction,
            )
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{path}: {err}") from err
    raise ConfigError(f"{path}.kind: unknown dynamics kind {kind!r}")


def _assimilator_from_dict(data: dict, path: str) -> AssimilatorConfig:
    try:
        eta_data = data.get("eta", {"policy": "trace_ratio"})
        eta = EtaPolicy(
            kind=eta_data.get("policy", "trace_ratio"),
            value=eta_data.get("value"),
        )
        gamma_data = data.get("gamma", {"policy": "median_fraction", "value": 0.05})
        gamma = GammaPolicy(
            kind=gamma_data.get("policy", "median_fraction"),
            value=float(gamma_data.get("value", 0.05)),
        )
        sink_data = data.get("sinkhorn", {})
        sinkhorn = SinkhornSettings(
            tolerance=float(sink_data.get("tolerance", 1e-8)),
            max_iterations=int(sink_data.get("max_iterations", 10_000)),
            failure_residual=float(sink_data.get("failure_residual", 1e-3)),
        )
        alpha = data.get("alpha_target")
        return AssimilatorConfig(
            method=_require(data, "method", path),
            name=data.get("name", ""),
            ensemble_size=int(data.get("ensemble_size", 100)),
            observation_atoms=int(data.get("observation_atoms", 100)),
            eta=eta,
            gamma=gamma,
            sinkhorn=sinkhorn,
            alpha_target=float(alpha) if alpha is not None else None,
            transport_space=data.get("transport_space", "members"),
            covariance_shape=data.get("covariance_shape", "per-cell"),
            background_cov=(
                tuple(tuple(float(v) for v in row) for row in data["background_cov"])
                if data.get("background_cov") is not None
                else None
            ),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{path}: {err}") from err


def from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a mapping at the top level")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}"
        )
    dynamics = _dynamics_from_dict(_require(data, "dynamics", "config"))
    assim_data = _require(data, "assimilators", "config")
    if not isinstance(assim_data, list) or not assim_data:
        raise ConfigError("assimilators: expected a non-empty list")
    assimilators = tuple(
        _assimilator_from_dict(entry, f"assimilators[{i}]")
        for i, entry in enumerate(assim_data)
    )
    names = [a.name for a in assimilators]
    if len(set(names)) != len(names):
        raise ConfigError("assimilators: names must be unique (set `name`)")
    config = ExperimentConfig(
        name=str(data.get("name", "experiment")),
        dynamics=dynamics,
        horizon=float(_require(data, "horizon", "config")),
        assimilation_interval=int(_require(data, "assimilation_interval", "config")),
        assimilators=assimilators,
        replicates=int(data.get("replicates", 1)),
        base_seed=int(data.get("base_seed", 0)),
        output_dir=data.get("output_dir"),
        workers=data.get("workers"),
        bias_mode=str(data.get("bias_mode", "absolute_mean")),
        dump_members=bool(data.get("dump_members", False)),
    )
    validate(config)
    return config


def validate(config: ExperimentConfig) -> None:
    if config.replicates < 1:
        raise ConfigError("replicates: must be at least 1")
    if config.assimilation_interval < 1:
        raise ConfigError("assimilation_interval: must be at least 1")
    if config.horizon < 0:
        raise ConfigError("horizon: must be nonnegative")
    if config.bias_mode not in BIAS_MODES:
        raise ConfigError(f"bias_mode: expected one of {BIAS_MODES}")
    if config.workers is not None and config.workers < 1:
        raise ConfigError("workers: must be at least 1 when set")
    if not isinstance(config.dynamics, Advection2DSpec):
        dt = config.dynamics.dt
        steps = config.horizon / dt
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigError("horizon: must be a multiple of the dynamics dt")
        if round(steps) < config.assimilation_interval:
            raise ConfigError(
                "assimilation_interval: exceeds the number of model steps"
            )


def _dynamics_to_dict(spec: DynamicsSpec) -> dict:
    if isinstance(spec, Lorenz63Spec):
        return {
            "kind": "lorenz63",
            "truth": {
                "sigma": spec.truth.sigma,
                "rho": spec.truth.rho,
                "beta": spec.truth.beta,
                "dt": spec.truth.dt,
            },
            "biased": {
                "sigma": spec.biased.sigma,
                "rho": spec.biased.rho,
                "beta": spec.biased.beta,
                "dt": spec.biased.dt,
            },
            "initial_state": list(spec.initial_state),
            "initial_spread_variance": spec.initial_spread_variance,
            "model_noise": {
                "kind": spec.model_noise.kind,
                "level": spec.model_noise.level,
            },
            "observation_variance": spec.observation_variance,
            "observation_correlations": list(spec.observation_correlations),
        }
    base = {
        "truth": {
            "velocity": list(spec.truth.velocity),
            "diffusivity": list(spec.truth.diffusivity),
            "spacing": list(spec.truth.spacing),
            "dt": spec.truth.dt,
            "extent": list(spec.truth.extent),
        },
        "biased": {
            "velocity": list(spec.biased.velocity),
            "diffusivity": list(spec.biased.diffusivity),
            "spacing": list(spec.biased.spacing),
            "dt": spec.biased.dt,
            "extent": list(spec.biased.extent),
        },
        "sources": [list(s) for s in spec.sources],
        "model_noise": {
            "kind": spec.model_noise.kind,
            "level": spec.model_noise.level,
        },
        "observation_noise_fraction": spec.observation_noise_fraction,
    }
    if isinstance(spec, Advection1DSpec):
        return {"kind": "ad1d", **base}
    return {
        "kind": "ad2d",
        **base,
        "observation_sources": [list(s) for s in spec.observation_sources],
        "box_average_factor": spec.box_average_factor,
    }


def to_dict(config: ExperimentConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "dynamics": _dynamics_to_dict(config.dynamics),
        "horizon": config.horizon,
        "assimilation_interval": config.assimilation_interval,
        "replicates": config.replicates,
        "base_seed": config.base_seed,
        "output_dir": config.output_dir,
        "workers": config.workers,
        "bias_mode": config.bias_mode,
        "dump_members": config.dump_members,
        "assimilators": [
            {
                "method": a.method,
                "name": a.name,
                "ensemble_size": a.ensemble_size,
                "observation_atoms": a.observation_atoms,
                "eta": {"policy": a.eta.kind, "value": a.eta.value},
                "gamma": {"policy": a.gamma.kind, "value": a.gamma.value},
                "sinkhorn": {
                    "tolerance": a.sinkhorn.tolerance,
                    "max_iterations": a.sinkhorn.max_iterations,
                    "failure_residual": a.sinkhorn.failure_residual,
                },
                "alpha_target": a.alpha_target,
                "transport_space": a.transport_space,
                "covariance_shape": a.covariance_shape,
                "background_cov": (
                    [list(row) for row in a.background_cov]
                    if a.background_cov is not None
                    else None
                ),
            }
            for a in config.assimilators
        ],
    }


def load(path: str | Path) -> ExperimentConfig:
    with open(path, "r") as handle:
        data = yaml.safe_load(handle)
    return from_dict(data)


def dump(config: ExperimentConfig, path: str | Path) -> None:
    with open(path, "w") as handle:
        yaml.safe_dump(to_dict(config), handle, sort_keys=False)
