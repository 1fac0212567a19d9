"""Bias and unbiased RMSE of analysis series against the truth.

Per dimension d over analysis times t, with e = analysis - truth:

    bias_d   = |mean_t e_d|          ("absolute_mean", default)
               mean_t |e_d|          ("mean_absolute")
    ubrmse_d = sqrt(mean_t[((a_d - mean_t a_d) - (x_d - mean_t x_d))^2])

so sign-alternating errors cancel in the bias while the ubrmse measures
error magnitude with both series' time means removed.  The per-cycle
(snapshot) statistics are the spatial analogues: the same formulas with
the roles of time and dimension swapped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BIAS_MODES = ("absolute_mean", "mean_absolute")


@dataclass
class MetricSeries:
    """Per-dimension and per-cycle error statistics for one method."""

    times: np.ndarray
    bias_per_dim: np.ndarray
    ubrmse_per_dim: np.ndarray
    bias_overall: float
    ubrmse_overall: float
    cycle_bias: np.ndarray
    cycle_ubrmse: np.ndarray
    bias_mode: str = "absolute_mean"


def _bias(errors: np.ndarray, axis: int, mode: str) -> np.ndarray:
    if mode == "absolute_mean":
        return np.abs(errors.mean(axis=axis))
    if mode == "mean_absolute":
        return np.abs(errors).mean(axis=axis)
    raise ValueError(f"unknown bias mode {mode!r}; expected one of {BIAS_MODES}")


def _ubrmse(analysis: np.ndarray, truth: np.ndarray, axis: int) -> np.ndarray:
    centered = (analysis - analysis.mean(axis=axis, keepdims=True)) - (
        truth - truth.mean(axis=axis, keepdims=True)
    )
    return np.sqrt((centered**2).mean(axis=axis))


def compute_metrics(
    times: np.ndarray,
    analysis: np.ndarray,
    truth: np.ndarray,
    bias_mode: str = "absolute_mean",
) -> MetricSeries:
    """Statistics of an analysis series (T, m) against the aligned truth.

    For single-snapshot experiments (T = 1) the temporal statistics
    degenerate, so the overall numbers fall back to the spatial per-cycle
    statistics of that snapshot.
    """
    times = np.asarray(times, dtype=float)
    analysis = np.atleast_2d(np.asarray(analysis, dtype=float))
    truth = np.atleast_2d(np.asarray(truth, dtype=float))
    if analysis.shape != truth.shape or analysis.shape[0] != times.size:
        raise ValueError(
            f"misaligned series: analysis {analysis.shape}, truth {truth.shape}, "
            f"{times.size} times"
        )
    errors = analysis - truth
    bias_per_dim = _bias(errors, 0, bias_mode)
    ubrmse_per_dim = _ubrmse(analysis, truth, 0)
    cycle_bias = _bias(errors, 1, bias_mode)
    cycle_ubrmse = _ubrmse(analysis, truth, 1)
    if times.size > 1:
        bias_overall = float(bias_per_dim.mean())
        ubrmse_overall = float(ubrmse_per_dim.mean())
    else:
        bias_overall = float(cycle_bias[0])
        ubrmse_overall = float(cycle_ubrmse[0])
    return MetricSeries(
        times=times,
        bias_per_dim=bias_per_dim,
        ubrmse_per_dim=ubrmse_per_dim,
        bias_overall=bias_overall,
        ubrmse_overall=ubrmse_overall,
        cycle_bias=cycle_bias,
        cycle_ubrmse=cycle_ubrmse,
        bias_mode=bias_mode,
    )
