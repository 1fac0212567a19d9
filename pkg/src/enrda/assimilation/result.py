"""Per-cycle analysis output shared by all assimilators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..ensembles import Ensemble


@dataclass
class CycleDiagnostics:
    """Observable per-cycle quantities; fields stay None where a method has
    nothing to report (e.g. transport cost for the Kalman update)."""

    method: str
    time: float
    transport_cost: float | None = None
    sinkhorn_iterations: int | None = None
    marginal_residual: float | None = None
    eta: float | None = None
    gamma: float | None = None
    effective_sample_size: float | None = None
    gain_norm: float | None = None
    background_weight: float | None = None
    observation_digest: str | None = None

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "time": self.time,
            "transport_cost": self.transport_cost,
            "sinkhorn_iterations": self.sinkhorn_iterations,
            "marginal_residual": self.marginal_residual,
            "eta": self.eta,
            "gamma": self.gamma,
            "effective_sample_size": self.effective_sample_size,
            "gain_norm": self.gain_norm,
            "background_weight": self.background_weight,
            "observation_digest": self.observation_digest,
        }


@dataclass
class AnalysisResult:
    """Either an analysis ensemble (ensemble methods) or a single analysis
    state vector (variational method), plus the cycle diagnostics."""

    diagnostics: CycleDiagnostics
    ensemble: Ensemble | None = None
    state: np.ndarray | None = None

    def __post_init__(self) -> None:
        if (self.ensemble is None) == (self.state is None):
            raise ValueError("exactly one of ensemble/state must be set")

    def mean(self) -> np.ndarray:
        if self.ensemble is not None:
            return self.ensemble.mean()
        return np.asarray(self.state, dtype=float)

    def spread(self) -> np.ndarray:
        if self.ensemble is not None and self.ensemble.size > 1:
            return self.ensemble.members.std(axis=0, ddof=1)
        return np.zeros_like(self.mean())
