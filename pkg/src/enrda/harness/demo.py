"""Transport showcase artifacts: Gaussian geodesics, a gamma-to-Gaussian
displacement sweep, and the regularization sweep of a mixture coupling.

These CSVs feed the offline plot scripts; nothing here is consumed by the
assimilation pipeline.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..ot import (
    DiscreteDistribution,
    GaussianMoments,
    build_cost_matrix,
    gaussian_w2_interpolate,
    mccann_interpolate,
    sinkhorn,
)

# the two Gaussians of the geodesic illustration
GAUSS_A = (-1.1, 0.4)
GAUSS_B = (1.4, 0.01)
# gamma(shape 2, scale 2) against N(6.5, 1)
GAMMA_SHAPE, GAMMA_SCALE = 2.0, 2.0
GAUSS_TARGET = (6.5, 1.0)
# Gaussian-mixture pair for the regularization sweep
MIX_BACKGROUND = ((0.5, -12.0, 0.4), (0.5, -8.0, 0.8))
MIX_OBSERVATION = ((0.55, 5.0, 4.0), (0.45, 9.5, 4.0))
COUPLING_GAMMAS = (0.001, 1.0, 10.0)


def _write_csv(path: Path, header: tuple[str, ...], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def gaussian_geodesic_rows(n_eta: int = 11):
    a = GaussianMoments([GAUSS_A[0]], [[GAUSS_A[1]]])
    b = GaussianMoments([GAUSS_B[0]], [[GAUSS_B[1]]])
    for eta in np.linspace(0.0, 1.0, n_eta):
        point = gaussian_w2_interpolate(a, b, float(eta))
        yield float(eta), float(point.mean[0]), float(point.covariance[0, 0])


def _gamma_histogram(n: int = 120, upper: float = 16.0) -> DiscreteDistribution:
    grid = np.linspace(1e-3, upper, n)
    pdf = grid ** (GAMMA_SHAPE - 1.0) * np.exp(-grid / GAMMA_SCALE)
    return DiscreteDistribution.from_scalars(grid, pdf / pdf.sum())


def _gaussian_histogram(mean, variance, n=120, span=4.0) -> DiscreteDistribution:
    sigma = np.sqrt(variance)
    grid = np.linspace(mean - span * sigma, mean + span * sigma, n)
    pdf = np.exp(-0.5 * (grid - mean) ** 2 / variance)
    return DiscreteDistribution.from_scalars(grid, pdf / pdf.sum())


def displacement_sweep_rows(n_eta: int = 11, gamma: float = 0.05):
    source = _gamma_histogram()
    target = _gaussian_histogram(*GAUSS_TARGET)
    cost = build_cost_matrix(source, target)
    plan, _ = sinkhorn(
        cost, source.weights, target.weights, gamma, tolerance=1e-10
    )
    for eta in np.linspace(0.0, 1.0, n_eta):
        interp = mccann_interpolate(plan, source, target, float(eta))
        order = np.argsort(interp.support[:, 0])
        for idx in order:
            yield float(eta), float(interp.support[idx, 0]), float(interp.weights[idx])


def _mixture_histogram(components, lower, upper, n: int = 80) -> DiscreteDistribution:
    grid = np.linspace(lower, upper, n)
    pdf = np.zeros_like(grid)
    for weight, mean, variance in components:
        pdf += weight * np.exp(-0.5 * (grid - mean) ** 2 / variance) / np.sqrt(
            2.0 * np.pi * variance
        )
    return DiscreteDistribution.from_scalars(grid, pdf / pdf.sum())


def coupling_sweep_rows():
    source = _mixture_histogram(MIX_BACKGROUND, -14.8, -5.0)
    target = _mixture_histogram(MIX_OBSERVATION, -1.0, 16.0)
    cost = build_cost_matrix(source, target)
    for gamma in COUPLING_GAMMAS:
        plan, _ = sinkhorn(
            cost, source.weights, target.weights, gamma, max_iterations=20_000
        )
        for i in range(plan.mass.shape[0]):
            for j in range(plan.mass.shape[1]):
                yield (
                    gamma,
                    float(source.support[i, 0]),
                    float(target.support[j, 0]),
                    float(plan.mass[i, j]),
                )


def write_ot_demo(out_dir: str | Path) -> dict[str, Path]:
    """Emit the three showcase CSVs; returns the artifact paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "gaussian_interpolation": out / "gaussian_interpolation.csv",
        "displacement_sweep": out / "displacement_sweep.csv",
        "coupling_sweep": out / "coupling_sweep.csv",
    }
    _write_csv(
        paths["gaussian_interpolation"],
        ("eta", "mean", "variance"),
        gaussian_geodesic_rows(),
    )
    _write_csv(
        paths["displacement_sweep"],
        ("eta", "position", "weight"),
        displacement_sweep_rows(),
    )
    _write_csv(
        paths["coupling_sweep"],
        ("gamma", "source_position", "target_position", "mass"),
        coupling_sweep_rows(),
    )
    return paths
