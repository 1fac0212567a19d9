import numpy as np
import pytest

from enrda.assimilation import (
    AssimilatorConfig,
    EtaPolicy,
    GammaPolicy,
    enkf_analysis,
    enkf_update,
    enrda_analysis,
    kalman_gain,
    likelihood_weights,
    particle_filter_analysis,
    run_assimilation_cycle,
    three_d_var_analysis,
    transport_analysis,
)
from enrda.dynamics import Lorenz63Spec
from enrda.ensembles import Ensemble, ensemble_to_histogram, multinomial_resample
from enrda.ot import DiscreteDistribution


def fixed_eta_config(eta, gamma=0.05, atoms=100, members=100):
    return AssimilatorConfig(
        method="enrda",
        ensemble_size=members,
        observation_atoms=atoms,
        eta=EtaPolicy("fixed", eta),
        gamma=GammaPolicy("fixed", gamma),
    )


class TestTransportAnalysis:
    def test_hand_two_by_two_coupling(self):
        # background {0, 1}, observation atoms {0.1, 1.1}: the identity
        # pairing costs 0.5*(0.01 + 0.01), the swap 0.5*(1.21 + 0.81), so
        # the displaced atoms are {0.05, 1.05} with weights {0.5, 0.5}
        background = DiscreteDistribution.uniform([0.0, 1.0])
        observations = DiscreteDistribution.uniform([0.1, 1.1])
        analysis, info = transport_analysis(
            background, observations, eta=0.5, gamma=1e-4
        )
        order = np.argsort(analysis.support[:, 0])
        np.testing.assert_allclose(
            analysis.support[order, 0], [0.05, 1.05], atol=1e-9
        )
        np.testing.assert_allclose(analysis.weights[order], [0.5, 0.5], atol=1e-9)
        assert info["transport_cost"] == pytest.approx(0.01, rel=1e-6)

    def test_eta_one_recovers_background_histogram(self):
        rng = np.random.default_rng(0)
        background = DiscreteDistribution.uniform(rng.normal(size=(6, 2)))
        observations = DiscreteDistribution.uniform(rng.normal(size=(5, 2)) + 3.0)
        analysis, _ = transport_analysis(background, observations, 1.0, gamma=0.5)
        # all displaced atoms sit on background support; aggregated weights
        # recover the background histogram
        totals = {}
        for point, weight in zip(analysis.support, analysis.weights):
            key = tuple(np.round(point, 10))
            totals[key] = totals.get(key, 0.0) + weight
        for point, weight in zip(background.support, background.weights):
            assert totals[tuple(np.round(point, 10))] == pytest.approx(weight, abs=1e-7)

    def test_analysis_mean_interpolates_linearly(self):
        rng = np.random.default_rng(1)
        background = DiscreteDistribution.uniform(rng.normal(size=(8, 3)))
        observations = DiscreteDistribution.uniform(rng.normal(size=(8, 3)) + 2.0)
        for eta in (0.0, 0.3, 0.7, 1.0):
            analysis, _ = transport_analysis(
                background, observations, eta, gamma=0.05
            )
            expected = eta * background.mean() + (1 - eta) * observations.mean()
            np.testing.assert_allclose(analysis.mean(), expected, atol=1e-6)


class TestEnrdaAnalysis:
    def test_eta_one_is_resample_of_background(self):
        rng = np.random.default_rng(2)
        background = Ensemble(rng.normal(size=(12, 2)))
        cfg = fixed_eta_config(1.0, atoms=8, members=12)
        result = enrda_analysis(
            background, np.array([5.0, 5.0]), np.eye(2), cfg, np.random.default_rng(7)
        )
        # observation-independent: every analysis member is a background member
        background_rows = {tuple(np.round(row, 10)) for row in background.members}
        for row in result.ensemble.members:
            assert tuple(np.round(row, 10)) in background_rows

    def test_eta_zero_tight_obs_collapses_to_observation(self):
        rng = np.random.default_rng(3)
        background = Ensemble(rng.normal(size=(6, 2)))
        cfg = fixed_eta_config(0.0, atoms=1, members=6)
        y = np.array([4.0, -1.0])
        result = enrda_analysis(
            background, y, np.zeros((2, 2)), cfg, np.random.default_rng(8)
        )
        np.testing.assert_allclose(result.ensemble.members, np.tile(y, (6, 1)), atol=1e-12)

    def test_trace_ratio_eta_recorded(self):
        rng = np.random.default_rng(4)
        background = Ensemble(rng.normal(size=(40, 3)) * 2.0)
        spec = Lorenz63Spec()
        obs_cov = spec.observation_covariance()
        cfg = AssimilatorConfig(method="enrda", ensemble_size=40, observation_atoms=40)
        result = enrda_analysis(
            background, np.zeros(3), obs_cov, cfg, np.random.default_rng(9)
        )
        eta = result.diagnostics.eta
        assert 0.0 < eta < 1.0
        # eta = tr(R) / (tr(R) + tr(B)) with the unbiased ensemble covariance
        anomalies = background.members - background.members.mean(axis=0)
        trace_b = float((anomalies**2).sum() / (background.size - 1))
        expected = np.trace(obs_cov) / (np.trace(obs_cov) + trace_b)
        assert eta == pytest.approx(expected, rel=1e-12)

    def test_ensemble_size_preserved(self):
        rng = np.random.default_rng(5)
        background = Ensemble(rng.normal(size=(30, 2)))
        cfg = fixed_eta_config(0.4, atoms=25, members=30)
        result = enrda_analysis(
            background, np.zeros(2), 0.5 * np.eye(2), cfg, np.random.default_rng(10)
        )
        assert result.ensemble.size == 30


class TestThreeDVar:
    def test_equal_weights_average(self):
        x_a = three_d_var_analysis(
            np.array([1.0, 2.0]), np.array([3.0, 6.0]), 2.0 * np.eye(2), 2.0 * np.eye(2)
        )
        np.testing.assert_allclose(x_a, [2.0, 4.0], atol=1e-12)

    def test_tight_observations_dominate(self):
        x_a = three_d_var_analysis(
            np.zeros(2), np.array([5.0, -5.0]), np.eye(2), 1e-10 * np.eye(2)
        )
        np.testing.assert_allclose(x_a, [5.0, -5.0], atol=1e-6)

    def test_scalar_hand_computation(self):
        # b = 4, r = 1, x_b = 0, y = 5 -> x_a = (0/4 + 5/1) / (1/4 + 1/1) = 4
        x_a = three_d_var_analysis([0.0], [5.0], [[4.0]], [[1.0]])
        assert x_a[0] == pytest.approx(4.0, rel=1e-12)

    def test_matches_information_form_oracle(self):
        # oracle: the naive (B^-1 + R^-1)^-1 (B^-1 x_b + R^-1 y) with
        # explicit inverses, cross-checked against the solver's gain form
        rng = np.random.default_rng(6)
        for _ in range(5):
            m = 4
            a = rng.normal(size=(m, m))
            b_cov = a @ a.T + np.eye(m)
            c = rng.normal(size=(m, m))
            r_cov = c @ c.T + 0.5 * np.eye(m)
            x_b = rng.normal(size=m)
            y = rng.normal(size=m)
            information = np.linalg.inv(
                np.linalg.inv(b_cov) + np.linalg.inv(r_cov)
            ) @ (np.linalg.inv(b_cov) @ x_b + np.linalg.inv(r_cov) @ y)
            kalman = x_b + b_cov @ np.linalg.solve(b_cov + r_cov, y - x_b)
            solved = three_d_var_analysis(x_b, y, b_cov, r_cov)
            np.testing.assert_allclose(solved, information, atol=1e-10)
            np.testing.assert_allclose(solved, kalman, atol=1e-10)

    def test_singular_covariance_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            three_d_var_analysis([0.0], [1.0], [[0.0]], [[1.0]])


class TestEnKF:
    def test_huge_observation_noise_keeps_background(self):
        rng = np.random.default_rng(7)
        background = Ensemble(rng.normal(size=(20, 2)))
        result = enkf_analysis(
            background, np.array([100.0, 100.0]), 1e8 * np.eye(2), np.random.default_rng(0)
        )
        # gain ~ 1/R while the drawn perturbations are ~ sqrt(R)
        np.testing.assert_allclose(result.ensemble.members, background.members, atol=1e-3)

    def test_collapsed_ensemble_gives_zero_gain(self):
        background = Ensemble(np.tile([1.0, 2.0], (10, 1)))
        result = enkf_analysis(
            background, np.array([9.0, 9.0]), np.eye(2), np.random.default_rng(1)
        )
        np.testing.assert_allclose(result.ensemble.members, background.members, atol=1e-12)
        assert result.diagnostics.gain_norm == pytest.approx(0.0, abs=1e-12)

    def test_scalar_gain_arithmetic(self):
        # B = 4, R = 1: K = 4/5; member 0, y = 5, v = 0 -> analysis 4
        updated, gain_norm = enkf_update(
            np.array([[0.0]]), np.array([5.0]), np.array([[4.0]]), np.array([[1.0]]),
            np.array([[0.0]]),
        )
        assert updated[0, 0] == pytest.approx(4.0, rel=1e-12)
        assert gain_norm == pytest.approx(0.8, rel=1e-12)

    def test_consistency_with_exact_kalman_posterior(self):
        # linear-Gaussian scalar case: with 1e5 members the analysis moments
        # match the conjugate posterior within 2%
        rng = np.random.default_rng(8)
        prior_mean, prior_var, obs, obs_var = 1.0, 4.0, 3.0, 1.0
        members = prior_mean + np.sqrt(prior_var) * rng.standard_normal((100_000, 1))
        result = enkf_analysis(
            Ensemble(members), np.array([obs]), np.array([[obs_var]]), rng
        )
        posterior_var = 1.0 / (1.0 / prior_var + 1.0 / obs_var)
        posterior_mean = posterior_var * (prior_mean / prior_var + obs / obs_var)
        assert result.ensemble.mean()[0] == pytest.approx(posterior_mean, rel=0.02)
        assert result.ensemble.members.var(ddof=1) == pytest.approx(
            posterior_var, rel=0.02
        )

    def test_singular_sum_rejected(self):
        background = Ensemble(np.array([[0.0], [0.0]]))
        with pytest.raises(ValueError, match="singular"):
            enkf_analysis(background, np.array([1.0]), np.array([[0.0]]), np.random.default_rng(0))


class TestParticleFilter:
    def test_equidistant_particles_get_uniform_weights(self):
        particles = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        weights = likelihood_weights(particles, np.zeros(2), np.eye(2))
        np.testing.assert_allclose(weights, 0.25, atol=1e-12)

    def test_dominant_particle_takes_all(self):
        particles = np.array([[0.0], [1e6], [2e6]])
        result = particle_filter_analysis(
            Ensemble(particles), np.zeros(1), np.eye(1), np.random.default_rng(0)
        )
        np.testing.assert_allclose(result.ensemble.members, 0.0, atol=1e-12)
        assert result.diagnostics.effective_sample_size == pytest.approx(1.0)

    def test_likelihood_ratio_identity(self):
        # two particles at distances 1 and 2 with R = I: w1/w2 = exp(1.5)
        particles = np.array([[1.0, 0.0], [2.0, 0.0]])
        weights = likelihood_weights(particles, np.zeros(2), np.eye(2))
        assert weights[0] / weights[1] == pytest.approx(np.exp(1.5), rel=1e-12)

    def test_weights_normalized_and_ess_in_range(self):
        rng = np.random.default_rng(9)
        particles = rng.normal(size=(50, 3))
        weights = likelihood_weights(particles, np.zeros(3), 0.5 * np.eye(3))
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        ess = 1.0 / np.sum(weights**2)
        assert 1.0 <= ess <= 50.0


class TestCycle:
    def test_zero_interval_analyzes_current_forecast(self):
        rng = np.random.default_rng(10)
        spec = Lorenz63Spec()
        ensemble = Ensemble(
            np.asarray(spec.initial_state) + rng.normal(size=(20, 3)), time=0.0
        )
        cfg = AssimilatorConfig(method="enkf", ensemble_size=20)
        obs_cov = spec.observation_covariance()
        _, with_propagation = run_assimilation_cycle(
            ensemble, np.zeros(3), obs_cov, cfg, spec, 0,
            None, np.random.default_rng(3),
        )
        direct = enkf_analysis(ensemble, np.zeros(3), obs_cov, np.random.default_rng(3))
        np.testing.assert_allclose(
            with_propagation.ensemble.members, direct.ensemble.members
        )

    def test_identical_seeds_reproduce_bitwise(self):
        spec = Lorenz63Spec()
        cfg = AssimilatorConfig(
            method="enrda", ensemble_size=15, observation_atoms=15,
            gamma=GammaPolicy("median_fraction", 0.05),
        )
        obs_cov = spec.observation_covariance()

        def run():
            rng = np.random.default_rng(11)
            ensemble = Ensemble(
                np.asarray(spec.initial_state) + rng.normal(size=(15, 3))
            )
            return run_assimilation_cycle(
                ensemble, np.array([1.0, 0.0, 25.0]), obs_cov, cfg, spec, 10,
                np.random.default_rng(21), np.random.default_rng(22),
            )

        first_state, first = run()
        second_state, second = run()
        assert np.array_equal(first_state.members, second_state.members)
        assert first.diagnostics.transport_cost == second.diagnostics.transport_cost
        assert first.diagnostics.observation_digest == second.diagnostics.observation_digest

    def test_three_d_var_carries_state_vector(self):
        spec = Lorenz63Spec()
        cfg = AssimilatorConfig(method="three_d_var")
        state = np.asarray(spec.initial_state)
        new_state, result = run_assimilation_cycle(
            state, np.array([1.0, -1.0, 25.0]), spec.observation_covariance(),
            cfg, spec, 5, np.random.default_rng(1), np.random.default_rng(2),
        )
        assert isinstance(new_state, np.ndarray)
        assert result.state is not None
        assert 0.0 < result.diagnostics.background_weight < 1.0

    def test_three_d_var_prescribed_background_covariance(self):
        spec = Lorenz63Spec()
        prescribed = tuple(tuple(row) for row in (4.0 * np.eye(3)).tolist())
        cfg = AssimilatorConfig(method="three_d_var", background_cov=prescribed)
        state = np.zeros(3)
        observation = np.array([5.0, 5.0, 5.0])
        obs_cov = np.eye(3)
        _, result = run_assimilation_cycle(
            state, observation, obs_cov, cfg, spec, 0, None, np.random.default_rng(0)
        )
        expected = three_d_var_analysis(state, observation, 4.0 * np.eye(3), obs_cov)
        np.testing.assert_allclose(result.state, expected, atol=1e-12)
