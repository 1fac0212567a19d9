"""Assimilator configuration: method choice and its policies."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..ot.sinkhorn import DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE

METHODS = ("enrda", "three_d_var", "enkf", "particle_filter")


@dataclass(frozen=True)
class EtaPolicy:
    """Displacement-parameter policy: a fixed value in [0, 1] or the
    per-cycle trace ratio tr(R) / (tr(R) + tr(B)) with ensemble B."""

    kind: str = "trace_ratio"
    value: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "trace_ratio"):
            raise ValueError(f"unknown eta policy {self.kind!r}")
        if self.kind == "fixed":
            if self.value is None or not 0.0 <= self.value <= 1.0:
                raise ValueError("fixed eta must lie in [0, 1]")

    def resolve(self, obs_cov: np.ndarray, background_cov: np.ndarray) -> float:
        if self.kind == "fixed":
            return float(self.value)
        eta = float(np.trace(obs_cov) / (np.trace(obs_cov) + np.trace(background_cov)))
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"trace-ratio eta fell outside [0, 1]: {eta}")
        return eta


@dataclass(frozen=True)
class GammaPolicy:
    """Entropic regularization: fixed, or a fraction of the median ground
    cost recomputed each cycle (the costs change with the forecast)."""

    kind: str = "median_fraction"
    value: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in ("fixed", "median_fraction"):
            raise ValueError(f"unknown gamma policy {self.kind!r}")
        if self.value <= 0:
            raise ValueError("gamma must be positive")

    def resolve(self, cost_entries: np.ndarray) -> float:
        if self.kind == "fixed":
            return float(self.value)
        median = float(np.median(cost_entries))
        if median <= 0:
            # degenerate instance (all costs zero): any gamma couples it
            return float(self.value)
        return self.value * median


@dataclass(frozen=True)
class SinkhornSettings:
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    # analysis aborts when the scaling leaves marginals worse than this
    failure_residual: float = 1e-3


@dataclass(frozen=True)
class AssimilatorConfig:
    """One assimilator in an experiment.

    ``alpha_target`` rescales the variational background covariance so that
    tr(R)/(tr(R)+tr(B)) hits a prescribed weight (used to match the
    transport assimilator's displacement parameter).  The observation
    operator is the identity throughout; ``jacobian_determinant`` is the
    constant-determinant hook for a future linear bijective operator and
    multiplies the observation histogram weights (a no-op while constant).
    """

    method: str
    name: str = ""
    ensemble_size: int = 100
    observation_atoms: int = 100
    eta: EtaPolicy = field(default_factory=EtaPolicy)
    gamma: GammaPolicy = field(default_factory=GammaPolicy)
    sinkhorn: SinkhornSettings = field(default_factory=SinkhornSettings)
    alpha_target: float | None = None
    jacobian_determinant: float = 1.0
    # "members" couples the forecast-member cloud with observation atoms;
    # "field" transports the gridded state itself as a density (the
    # single-snapshot image experiments)
    transport_space: str = "members"
    # "uniform" collapses the variational covariances to scalar multiples of
    # the identity (requires alpha_target), giving a spatially uniform blend
    covariance_shape: str = "per-cell"
    # fixed background covariance for the variational method (overrides the
    # state-derived construction; row-major nested tuples)
    background_cov: tuple | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.name:
            object.__setattr__(self, "name", self.method)
        if self.ensemble_size < 1:
            raise ValueError("ensemble_size must be at least 1")
        if self.observation_atoms < 1:
            raise ValueError("observation_atoms must be at least 1")
        if self.alpha_target is not None and not 0.0 < self.alpha_target < 1.0:
            raise ValueError("alpha_target must lie in (0, 1)")
        if self.transport_space not in ("members", "field"):
            raise ValueError("transport_space must be 'members' or 'field'")
        if self.transport_space == "field" and self.eta.kind != "fixed":
            raise ValueError("field transport requires a fixed eta")
        if self.transport_space == "field" and self.gamma.kind != "fixed":
            raise ValueError("field transport requires a fixed gamma")
        if self.covariance_shape not in ("per-cell", "uniform"):
            raise ValueError("covariance_shape must be 'per-cell' or 'uniform'")
        if self.covariance_shape == "uniform" and self.alpha_target is None:
            raise ValueError("uniform covariance shape requires alpha_target")
