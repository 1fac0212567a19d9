"""NumPy implementation of the marginal-scaling iterations.

Reference semantics for the compiled kernel: the Cython module must agree
with these functions up to floating-point reassociation.
"""

from __future__ import annotations

import numpy as np


def scale_plain(
    kernel: np.ndarray,
    row_marginal: np.ndarray,
    col_marginal: np.ndarray,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Alternate v <- p / (K w), w <- q / (K^T v) until the plan
    diag(v) K diag(w) satisfies both marginals within ``tol`` (inf-norm).

    Returns (v, w, iterations, residual).  The column marginal is exact by
    construction after each sweep, so the reported residual is the row
    violation.  A non-finite scaling vector (kernel underflow) aborts the
    sweep with residual = inf.
    """
    m, n = kernel.shape
    v = np.ones(m)
    w = np.ones(n)
    kw = kernel @ w
    iterations = 0
    residual = np.inf
    for iterations in range(1, max_iter + 1):
        v = row_marginal / kw
        w = col_marginal / (kernel.T @ v)
        if not (np.isfinite(v).all() and np.isfinite(w).all()):
            return v, w, iterations, np.inf
        kw = kernel @ w
        residual = float(np.max(np.abs(v * kw - row_marginal)))
        if residual <= tol:
            break
    return v, w, iterations, residual


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    peak = np.max(a, axis=1)
    return peak + np.log(np.sum(np.exp(a - peak[:, None]), axis=1))


def scale_log(
    cost: np.ndarray,
    log_row: np.ndarray,
    log_col: np.ndarray,
    gamma: float,
    tol: float,
    max_iter: int,
    u0: np.ndarray | None = None,
    v0: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, int, float]:
    """Log-domain variant of :func:`scale_plain`.

    Works with additive potentials u, v such that the plan is
    exp(u_i - c_ij/gamma + v_j); same fixed point as the plain scaling with
    v_plain = exp(u), w_plain = exp(v), but immune to exp(-c/gamma)
    underflow.  ``u0``/``v0`` warm-start the potentials (used by the
    regularization-annealing driver).  Returns (u, v, iterations, residual).
    """
    g = -cost / gamma
    m, n = g.shape
    u = np.zeros(m) if u0 is None else np.asarray(u0, dtype=float).copy()
    v = np.zeros(n) if v0 is None else np.asarray(v0, dtype=float).copy()
    row = np.exp(log_row)
    lse_rows = _logsumexp_rows(g + v[None, :])
    iterations = 0
    residual = np.inf
    for iterations in range(1, max_iter + 1):
        u = log_row - lse_rows
        v = log_col - _logsumexp_rows(g.T + u[None, :])
        lse_rows = _logsumexp_rows(g + v[None, :])
        residual = float(np.max(np.abs(np.exp(u + lse_rows) - row)))
        if residual <= tol:
            break
    return u, v, iterations, residual
