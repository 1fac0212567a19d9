"""Variational analysis with Gaussian background/observation statistics."""

from __future__ import annotations

import numpy as np


def three_d_var_analysis(
    background_mean: np.ndarray,
    observation: np.ndarray,
    background_cov: np.ndarray,
    obs_cov: np.ndarray,
) -> np.ndarray:
    """Minimizer of ||x - x_b||^2_{B^-1} + ||y - x||^2_{R^-1} for the
    identity observation operator.

    Computed as x_b + B (B + R)^-1 (y - x_b) through a Cholesky solve of
    the SPD sum, which equals the information-form minimizer
    (B^-1 + R^-1)^-1 (B^-1 x_b + R^-1 y) without forming any inverse.
    """
    x_b = np.asarray(background_mean, dtype=float).ravel()
    y = np.asarray(observation, dtype=float).ravel()
    b = np.atleast_2d(np.asarray(background_cov, dtype=float))
    r = np.atleast_2d(np.asarray(obs_cov, dtype=float))
    if x_b.size != y.size or b.shape != (x_b.size, x_b.size) or r.shape != b.shape:
        raise ValueError("inconsistent shapes for the variational update")
    total = b + r
    try:
        lower = np.linalg.cholesky(total)
        np.linalg.cholesky(b)  # positive-definiteness checks
        np.linalg.cholesky(r)
    except np.linalg.LinAlgError as err:
        raise ValueError(
            "background/observation covariance is singular; add jitter"
        ) from err
    innovation = y - x_b
    z = np.linalg.solve(lower, innovation)
    z = np.linalg.solve(lower.T, z)
    return x_b + b @ z


def kalman_gain(background_cov: np.ndarray, obs_cov: np.ndarray) -> np.ndarray:
    """K = B (B + R)^-1 for the identity operator; solved, not inverted."""
    b = np.atleast_2d(np.asarray(background_cov, dtype=float))
    r = np.atleast_2d(np.asarray(obs_cov, dtype=float))
    total = b + r
    try:
        return np.linalg.solve(total, b).T
    except np.linalg.LinAlgError as err:
        raise ValueError(
            "B + R is singular; add diagonal jitter to the covariances"
        ) from err
