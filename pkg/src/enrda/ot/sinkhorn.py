"""Entropic-regularized coupling via alternating marginal scaling.

The solver alternates v <- p / (K w), w <- q / (K^T v) on the Gibbs kernel
K = exp(-C/gamma) until both marginals of diag(v) K diag(w) are satisfied
in inf-norm.  When gamma is small relative to the costs the kernel
underflows, so the same fixed point is computed with log-sum-exp updates
instead (switch below ``LOG_DOMAIN_COST_FRACTION`` * max cost), warm-started
through a geometric annealing of gamma; plain fixed-gamma scaling stalls at
small gamma (residual decays like 1/iterations) while annealed potentials
land near the fixed point.  If the sweep budget still ends above tolerance,
the plan is projected onto the marginal polytope by row/column clipping
plus a rank-one correction, which perturbs the transport cost by at most
the pre-projection violation times the largest cost.  The actual sweeps
live in :mod:`enrda._kernels` (compiled extension with a NumPy fallback).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from .discrete import CostMatrix
from .plan import TransportPlan

# switch to log-domain updates when gamma < fraction * max(cost)
LOG_DOMAIN_COST_FRACTION = 1e-2
# atoms lighter than this fraction of total mass are pruned before solving
MARGINAL_PRUNE_THRESHOLD = 1e-12
# feasibility projection is applied only to qualitatively-converged scalings
ROUNDING_RESIDUAL_CEILING = 1e-3

# annealing schedule for the log-domain path
ANNEAL_START_COST_FRACTION = 0.1
ANNEAL_RATIO = 0.5
ANNEAL_STAGE_TOLERANCE = 1e-4
ANNEAL_STAGE_SWEEPS = 500

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 10_000


class SinkhornError(RuntimeError):
    """Scaling failed to produce a usable coupling."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


@dataclass
class SinkhornState:
    """Solver byproducts.

    ``marginal_residual`` is the violation of the returned plan;
    ``scaling_residual`` is what the scaling sweeps achieved before any
    feasibility projection (they coincide unless ``rounded``).
    """

    scaling_v: np.ndarray
    scaling_w: np.ndarray
    gibbs_kernel: np.ndarray
    iterations_used: int
    marginal_residual: float
    scaling_residual: float
    log_domain: bool = False
    rounded: bool = False


def _validate_marginal(weights: np.ndarray, name: str) -> np.ndarray:
    weights = np.asarray(weights, dtype=float).ravel()
    if np.any(weights < 0):
        raise ValueError(f"{name} has negative entries")
    if abs(weights.sum() - 1.0) > 1e-8:
        raise ValueError(f"{name} sums to {weights.sum()!r}, expected 1")
    return weights


def _round_to_marginals(
    plan: np.ndarray, p: np.ndarray, q: np.ndarray
) -> np.ndarray:
    """Project an almost-feasible plan onto the coupling polytope: scale
    rows then columns down to their marginals and distribute the missing
    mass as a rank-one term."""
    rows = plan.sum(axis=1)
    plan = plan * np.minimum(1.0, p / np.where(rows > 0, rows, 1.0))[:, None]
    cols = plan.sum(axis=0)
    plan = plan * np.minimum(1.0, q / np.where(cols > 0, cols, 1.0))[None, :]
    missing_rows = np.maximum(p - plan.sum(axis=1), 0.0)
    missing_cols = np.maximum(q - plan.sum(axis=0), 0.0)
    total = missing_rows.sum()
    if total > 0:
        plan = plan + np.outer(missing_rows, missing_cols) / total
    return plan


def _anneal_log_domain(
    cost: np.ndarray,
    log_p: np.ndarray,
    log_q: np.ndarray,
    gamma: float,
    tolerance: float,
    max_iterations: int,
) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Run warm-started log-domain sweeps over a geometric gamma schedule
    ending at the target; returns the final potentials and total sweeps."""
    start = ANNEAL_START_COST_FRACTION * float(cost.max())
    schedule = []
    value = start
    while value > 2.0 * gamma:
        schedule.append(value)
        value *= ANNEAL_RATIO
    schedule.append(gamma)

    m, n = cost.shape
    u = np.zeros(m)
    v = np.zeros(n)
    used = 0
    residual = np.inf
    # the target stage always gets at least half the budget so the returned
    # potentials are scaled for the requested gamma, not a coarser stage
    final_reserve = max(max_iterations // 2, 1)
    previous_gamma: float | None = None
    for index, stage_gamma in enumerate(schedule):
        final = index == len(schedule) - 1
        if previous_gamma is not None:
            # physical potentials gamma*u carry across the gamma change
            factor = previous_gamma / stage_gamma
            u = u * factor
            v = v * factor
        previous_gamma = stage_gamma
        if final:
            stage_tol, stage_cap = tolerance, max_iterations - used
        else:
            stage_tol = max(tolerance, ANNEAL_STAGE_TOLERANCE)
            stage_cap = min(ANNEAL_STAGE_SWEEPS, max_iterations - final_reserve - used)
            if stage_cap <= 0:
                continue
        u, v, sweeps, residual = _kernels.scale_log(
            cost, log_p, log_q, stage_gamma, stage_tol, stage_cap, u, v
        )
        used += sweeps
    return u, v, used, residual


def sinkhorn(
    cost: CostMatrix | np.ndarray,
    row_marginal: np.ndarray,
    col_marginal: np.ndarray,
    gamma: float,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> tuple[TransportPlan, SinkhornState]:
    """Solve the gamma-regularized coupling of two histograms.

    Zero-weight atoms (below ``MARGINAL_PRUNE_THRESHOLD`` of total mass) are
    pruned before scaling and re-inserted as empty rows/columns of the plan.
    Stops when the inf-norm marginal violation drops below ``tolerance`` or
    after ``max_iterations`` sweeps in total; the achieved violation is
    reported in the returned state either way.
    """
    entries = cost.entries if isinstance(cost, CostMatrix) else np.asarray(cost, dtype=float)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    p = _validate_marginal(row_marginal, "row marginal")
    q = _validate_marginal(col_marginal, "col marginal")
    m, n = entries.shape
    if p.size != m or q.size != n:
        raise ValueError("marginal lengths do not match the cost matrix")

    keep_rows = p >= MARGINAL_PRUNE_THRESHOLD
    keep_cols = q >= MARGINAL_PRUNE_THRESHOLD
    sub_cost = np.ascontiguousarray(entries[np.ix_(keep_rows, keep_cols)])
    sub_p = p[keep_rows] / p[keep_rows].sum()
    sub_q = q[keep_cols] / q[keep_cols].sum()

    max_cost = float(sub_cost.max()) if sub_cost.size else 0.0
    log_domain = gamma < LOG_DOMAIN_COST_FRACTION * max_cost

    if log_domain:
        u, v_log, iterations, residual = _anneal_log_domain(
            sub_cost, np.log(sub_p), np.log(sub_q), gamma, tolerance, max_iterations
        )
        with np.errstate(under="ignore"):
            sub_plan = np.exp(u[:, None] + (-sub_cost / gamma) + v_log[None, :])
        with np.errstate(over="ignore"):
            scaling_v = np.exp(u)
            scaling_w = np.exp(v_log)
    else:
        kernel = np.exp(-sub_cost / gamma)
        if not np.isfinite(kernel).all() or np.any(kernel <= 0.0):
            raise SinkhornError(
                f"Gibbs kernel exp(-cost/gamma) degenerated; gamma={gamma} is too "
                "small for the plain scaling path"
            )
        scaling_v, scaling_w, iterations, residual = _kernels.scale_plain(
            kernel, sub_p, sub_q, tolerance, max_iterations
        )
        sub_plan = scaling_v[:, None] * kernel * scaling_w[None, :]

    if not np.isfinite(sub_plan).all():
        raise SinkhornError(
            f"scaling diverged (gamma={gamma} too small for the cost scale); "
            f"marginal residual {residual!r}",
            residual=residual,
        )

    rounded = False
    plan_residual = residual
    if tolerance < residual <= ROUNDING_RESIDUAL_CEILING:
        sub_plan = _round_to_marginals(sub_plan, sub_p, sub_q)
        rounded = True
        row_violation = np.max(np.abs(sub_plan.sum(axis=1) - sub_p))
        col_violation = np.max(np.abs(sub_plan.sum(axis=0) - sub_q))
        plan_residual = float(max(row_violation, col_violation))

    mass = np.zeros((m, n))
    mass[np.ix_(keep_rows, keep_cols)] = sub_plan
    transport_cost = float(np.sum(entries * mass))
    plan = TransportPlan(
        mass=mass,
        row_marginal=p,
        col_marginal=q,
        transport_cost=transport_cost,
        gamma=gamma,
    )

    full_kernel = np.zeros((m, n))
    with np.errstate(under="ignore"):
        full_kernel[np.ix_(keep_rows, keep_cols)] = np.exp(-sub_cost / gamma)
    state = SinkhornState(
        scaling_v=scaling_v,
        scaling_w=scaling_w,
        gibbs_kernel=full_kernel,
        iterations_used=int(iterations),
        marginal_residual=float(plan_residual),
        scaling_residual=float(residual),
        log_domain=log_domain,
        rounded=rounded,
    )
    return plan, state
