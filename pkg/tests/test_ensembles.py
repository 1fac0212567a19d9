import numpy as np
import pytest

from enrda.ensembles import (
    Ensemble,
    ensemble_to_histogram,
    estimate_covariance,
    multinomial_resample,
    perturb_observations,
)
from enrda.ot import DiscreteDistribution


class TestEnsembleToHistogram:
    def test_single_member(self):
        hist = ensemble_to_histogram(Ensemble(np.array([[1.0, 2.0]])))
        assert hist.n_atoms == 1
        assert hist.weights[0] == pytest.approx(1.0)

    def test_four_members(self):
        hist = ensemble_to_histogram(Ensemble(np.arange(8.0).reshape(4, 2)))
        np.testing.assert_allclose(hist.weights, 0.25)

    def test_hundred_members_uniform_hundredths(self):
        rng = np.random.default_rng(0)
        hist = ensemble_to_histogram(Ensemble(rng.normal(size=(100, 3))))
        assert hist.n_atoms == 100
        np.testing.assert_allclose(hist.weights, 0.01)

    def test_duplicates_stay_separate_atoms(self):
        hist = ensemble_to_histogram(Ensemble(np.zeros((3, 2))))
        assert hist.n_atoms == 3
        np.testing.assert_allclose(hist.weights, 1.0 / 3)


class TestPerturbObservations:
    def test_zero_covariance_gives_identical_atoms(self):
        rng = np.random.default_rng(1)
        hist = perturb_observations(np.array([1.0, -2.0]), np.zeros((2, 2)), 5, rng)
        np.testing.assert_allclose(hist.support, [[1.0, -2.0]] * 5)

    def test_sample_covariance_converges(self):
        rng = np.random.default_rng(2)
        hist = perturb_observations(np.zeros(2), np.eye(2), 10_000, rng)
        sample_cov = np.cov(hist.support.T)
        assert np.max(np.abs(sample_cov - np.eye(2))) < 0.05

    def test_banded_correlation_pattern(self):
        # correlation 1 on the diagonal, 0.5 one off, 0.25 two off
        corr = np.array([[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])
        rng = np.random.default_rng(3)
        hist = perturb_observations(np.zeros(3), 2.0 * corr, 100_000, rng)
        sample = np.corrcoef(hist.support.T)
        assert sample[0, 1] == pytest.approx(0.5, abs=0.025)
        assert sample[0, 2] == pytest.approx(0.25, abs=0.025)
        assert sample[1, 2] == pytest.approx(0.5, abs=0.025)

    def test_bit_reproducible_for_fixed_seed(self):
        first = perturb_observations(
            np.zeros(3), np.eye(3), 50, np.random.default_rng(42)
        )
        second = perturb_observations(
            np.zeros(3), np.eye(3), 50, np.random.default_rng(42)
        )
        assert np.array_equal(first.support, second.support)

    def test_estimated_covariance_recovers_r(self):
        r = np.array([[2.0, 0.4], [0.4, 1.0]])
        rng = np.random.default_rng(4)
        hist = perturb_observations(np.zeros(2), r, 100_000, rng)
        estimate = estimate_covariance(Ensemble(hist.support))
        frob = np.linalg.norm(estimate.matrix - r) / np.linalg.norm(r)
        assert frob < 0.05

    def test_non_psd_rejected(self):
        with pytest.raises(ValueError, match="positive semidefinite"):
            perturb_observations(
                np.zeros(2),
                np.array([[1.0, 2.0], [2.0, 1.0]]),
                3,
                np.random.default_rng(0),
            )


class TestMultinomialResample:
    def test_single_atom_copies(self):
        d = DiscreteDistribution([[3.0, 4.0]], [1.0])
        members = multinomial_resample(d, 7, np.random.default_rng(0)).members
        np.testing.assert_allclose(members, [[3.0, 4.0]] * 7)

    def test_degenerate_weights(self):
        d = DiscreteDistribution([0.0, 1.0], [1.0, 0.0])
        members = multinomial_resample(d, 9, np.random.default_rng(0)).members
        np.testing.assert_allclose(members, 0.0)

    def test_count_concentration(self):
        d = DiscreteDistribution([0.0, 1.0], [0.3, 0.7])
        members = multinomial_resample(d, 100_000, np.random.default_rng(5)).members
        ones = int(members.sum())
        assert abs(ones - 70_000) <= 700
        assert abs((100_000 - ones) - 30_000) <= 700

    def test_resampling_preserves_expectation(self):
        rng = np.random.default_rng(6)
        weights = rng.uniform(0.1, 1.0, size=12)
        weights /= weights.sum()
        d = DiscreteDistribution(rng.normal(size=(12, 2)), weights)
        resampled = multinomial_resample(d, 100_000, np.random.default_rng(7))
        scale = np.linalg.norm(d.mean()) + 1.0
        assert np.linalg.norm(resampled.mean() - d.mean()) / scale < 0.01


class TestEstimateCovariance:
    def test_two_member_hand_computation(self):
        est = estimate_covariance(Ensemble(np.array([[0.0], [2.0]])))
        assert est.mean[0] == pytest.approx(1.0)
        assert est.matrix[0, 0] == pytest.approx(2.0)

    def test_identical_members_zero_matrix(self):
        est = estimate_covariance(Ensemble(np.ones((5, 3))))
        np.testing.assert_allclose(est.matrix, 0.0, atol=1e-15)

    def test_sampling_check_diagonal(self):
        rng = np.random.default_rng(8)
        draws = rng.normal(size=(100_000, 2)) * np.sqrt([1.0, 4.0])
        est = estimate_covariance(Ensemble(draws))
        assert est.matrix[0, 0] == pytest.approx(1.0, rel=0.03)
        assert est.matrix[1, 1] == pytest.approx(4.0, rel=0.03)

    def test_single_member_rejected(self):
        with pytest.raises(ValueError, match="two members"):
            estimate_covariance(Ensemble(np.zeros((1, 2))))
