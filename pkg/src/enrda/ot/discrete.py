"""Weighted point clouds and ground transportation costs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability histogram over a finite support in R^m.

    ``support`` has shape (K, m), ``weights`` shape (K,); weights are
    nonnegative and sum to one within ``WEIGHT_SUM_TOL``.
    """

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=float)
        if support.ndim == 1:
            support = support.reshape(-1, 1)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if support.ndim != 2 or support.shape[1] < 1:
            raise ValueError("support must be a (K, m) array with m >= 1")
        if support.shape[0] != weights.size:
            raise ValueError(
                f"support has {support.shape[0]} atoms but weights has {weights.size}"
            )
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        total = weights.sum()
        if abs(total - 1.0) > max(WEIGHT_SUM_TOL, 1e-9 * weights.size):
            raise ValueError(f"weights sum to {total!r}, expected 1")
        if not np.isfinite(support).all():
            raise ValueError("support contains non-finite points")
        object.__setattr__(self, "support", np.ascontiguousarray(support))
        object.__setattr__(self, "weights", np.ascontiguousarray(weights))

    @classmethod
    def uniform(cls, points: np.ndarray) -> "DiscreteDistribution":
        """Equal-weight atoms; a 1-D input is read as K scalar atoms."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        k = points.shape[0]
        return cls(points, np.full(k, 1.0 / k))

    @classmethod
    def from_scalars(cls, values, weights=None) -> "DiscreteDistribution":
        values = np.asarray(values, dtype=float).reshape(-1, 1)
        if weights is None:
            weights = np.full(values.shape[0], 1.0 / values.shape[0])
        return cls(values, weights)

    @property
    def n_atoms(self) -> int:
        return self.support.shape[0]

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def mean(self) -> np.ndarray:
        return self.weights @ self.support

    def centered(self) -> "DiscreteDistribution":
        return DiscreteDistribution(self.support - self.mean(), self.weights)

    def prune(self, threshold: float) -> "DiscreteDistribution":
        """Drop atoms lighter than ``threshold`` (fraction of total mass) and
        renormalize; keeps at least the heaviest atom."""
        keep = self.weights >= threshold * self.weights.sum()
        if not keep.any():
            keep[np.argmax(self.weights)] = True
        w = self.weights[keep]
        return DiscreteDistribution(self.support[keep], w / w.sum())


@dataclass(frozen=True)
class CostMatrix:
    """Ground cost c_ij = ||x_i - y_j||_q^q between two supports."""

    entries: np.ndarray
    exponent: float

    def __post_init__(self) -> None:
        entries = np.ascontiguousarray(np.asarray(self.entries, dtype=float))
        if entries.ndim != 2:
            raise ValueError("cost entries must be a matrix")
        if np.any(entries < 0):
            raise ValueError("cost entries must be nonnegative")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def build_cost_matrix(
    source: DiscreteDistribution, target: DiscreteDistribution, q: float = 2.0
) -> CostMatrix:
    """Pairwise transport costs ||x_i - y_j||_q^q (default squared Euclidean)."""
    if q <= 0:
        raise ValueError(f"cost exponent must be positive, got {q}")
    if source.dim != target.dim:
        raise ValueError(
            f"dimension mismatch: source is {source.dim}-d, target is {target.dim}-d"
        )
    x, y = source.support, target.support
    if q == 2.0:
        sq = (
            np.sum(x * x, axis=1)[:, None]
            + np.sum(y * y, axis=1)[None, :]
            - 2.0 * (x @ y.T)
        )
        entries = np.maximum(sq, 0.0)
    else:
        diff = np.abs(x[:, None, :] - y[None, :, :])
        entries = np.sum(diff**q, axis=2)
    return CostMatrix(entries, q)
