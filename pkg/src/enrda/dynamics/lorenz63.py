"""Lorenz-63 convection model stepped with fourth-order Runge-Kutta."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Lorenz63Params:
    """Prandtl number, normalized Rayleigh number, wave-number parameter,
    and the integration step."""

    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = 0.01

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("integration step must be positive")


TRUTH_PARAMS = Lorenz63Params(10.0, 28.0, 8.0 / 3.0)
BIASED_PARAMS = Lorenz63Params(10.5, 27.0, 10.0 / 3.0)


def derivative(state: np.ndarray, p: Lorenz63Params) -> np.ndarray:
    """Right-hand side; ``state`` is (..., 3) so ensembles step in one call."""
    x = state[..., 0]
    y = state[..., 1]
    z = state[..., 2]
    out = np.empty_like(state)
    out[..., 0] = -p.sigma * (x - y)
    out[..., 1] = p.rho * x - y - x * z
    out[..., 2] = x * y - p.beta * z
    return out


def lorenz63_step(state: np.ndarray, p: Lorenz63Params) -> np.ndarray:
    """One RK4 step of size ``p.dt``; raises on non-finite output."""
    state = np.asarray(state, dtype=float)
    dt = p.dt
    k1 = derivative(state, p)
    k2 = derivative(state + 0.5 * dt * k1, p)
    k3 = derivative(state + 0.5 * dt * k2, p)
    k4 = derivative(state + dt * k3, p)
    out = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(out).all():
        raise FloatingPointError("Lorenz-63 integration diverged to non-finite state")
    return out


def fixed_points(p: Lorenz63Params) -> np.ndarray:
    """The two unstable stationary points of the chaotic regime."""
    radius = np.sqrt(p.beta * (p.rho - 1.0))
    return np.array(
        [[radius, radius, p.rho - 1.0], [-radius, -radius, p.rho - 1.0]]
    )
