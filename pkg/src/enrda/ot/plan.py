"""Transport plan container shared by the exact and entropic solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TransportPlan:
    """Nonnegative coupling of two histograms.

    ``mass`` is the M x N joint-mass matrix; ``transport_cost`` is the
    Frobenius inner product of the ground cost with ``mass``; ``gamma`` is
    the entropic regularization that produced it (0 for exact solves).
    """

    mass: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    transport_cost: float
    gamma: float

    def __post_init__(self) -> None:
        mass = np.ascontiguousarray(np.asarray(self.mass, dtype=float))
        if np.any(mass < 0):
            raise ValueError("transport plan mass must be nonnegative")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "row_marginal", np.asarray(self.row_marginal, dtype=float))
        object.__setattr__(self, "col_marginal", np.asarray(self.col_marginal, dtype=float))

    def marginal_violation(self) -> float:
        """Largest inf-norm violation of either marginal constraint."""
        row = np.max(np.abs(self.mass.sum(axis=1) - self.row_marginal))
        col = np.max(np.abs(self.mass.sum(axis=0) - self.col_marginal))
        return float(max(row, col))

    def entropy(self) -> float:
        """Gibbs-Boltzmann entropy -<U, log U - 1> with 0 log 0 = 0.

        Concave in the plan; larger regularization yields larger entropy.
        """
        mass = self.mass
        positive = mass > 0
        return float(-np.sum(mass[positive] * (np.log(mass[positive]) - 1.0)))
