import numpy as np
import pytest

from enrda.harness import compute_metrics


def test_perfect_analysis_scores_zero():
    times = np.arange(4.0)
    truth = np.random.default_rng(0).normal(size=(4, 3))
    metric = compute_metrics(times, truth, truth)
    np.testing.assert_allclose(metric.bias_per_dim, 0.0, atol=1e-15)
    np.testing.assert_allclose(metric.ubrmse_per_dim, 0.0, atol=1e-15)
    assert metric.bias_overall == 0.0
    assert metric.ubrmse_overall == 0.0


def test_constant_offset_is_pure_bias():
    times = np.arange(5.0)
    truth = np.random.default_rng(1).normal(size=(5, 2))
    metric = compute_metrics(times, truth + 3.0, truth)
    np.testing.assert_allclose(metric.bias_per_dim, 3.0, atol=1e-12)
    np.testing.assert_allclose(metric.ubrmse_per_dim, 0.0, atol=1e-12)


def test_two_cycle_hand_computation():
    # analysis (0, 2), truth (1, 1): errors (-1, +1) cancel in the bias;
    # demeaned difference is (-1, +1) so the ubrmse is 1
    times = np.array([1.0, 2.0])
    analysis = np.array([[0.0], [2.0]])
    truth = np.array([[1.0], [1.0]])
    metric = compute_metrics(times, analysis, truth)
    assert metric.bias_per_dim[0] == pytest.approx(0.0, abs=1e-15)
    assert metric.ubrmse_per_dim[0] == pytest.approx(1.0)


def test_mean_absolute_mode_keeps_magnitude():
    times = np.array([1.0, 2.0])
    analysis = np.array([[0.0], [2.0]])
    truth = np.array([[1.0], [1.0]])
    metric = compute_metrics(times, analysis, truth, bias_mode="mean_absolute")
    assert metric.bias_per_dim[0] == pytest.approx(1.0)


def test_cycle_statistics_are_spatial_analogues():
    times = np.array([0.5])
    analysis = np.array([[1.0, 2.0, 3.0, 4.0]])
    truth = np.array([[1.0, 1.0, 1.0, 1.0]])
    metric = compute_metrics(times, analysis, truth)
    errors = analysis[0] - truth[0]  # (0, 1, 2, 3)
    assert metric.cycle_bias[0] == pytest.approx(abs(errors.mean()))
    centered = (analysis[0] - analysis[0].mean()) - (truth[0] - truth[0].mean())
    assert metric.cycle_ubrmse[0] == pytest.approx(np.sqrt((centered**2).mean()))
    # single snapshot: overall falls back to the spatial statistics
    assert metric.bias_overall == pytest.approx(metric.cycle_bias[0])
    assert metric.ubrmse_overall == pytest.approx(metric.cycle_ubrmse[0])


def test_misaligned_series_rejected():
    with pytest.raises(ValueError, match="misaligned"):
        compute_metrics(np.arange(3.0), np.zeros((3, 2)), np.zeros((4, 2)))


def test_unknown_bias_mode_rejected():
    with pytest.raises(ValueError, match="bias mode"):
        compute_metrics(
            np.arange(2.0), np.zeros((2, 1)), np.zeros((2, 1)), bias_mode="rms"
        )
