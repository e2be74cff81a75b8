import math
import warnings

import numpy as np
import pytest

from calibdesign import (
    DegenerateDataError,
    Design,
    DomainError,
    ModelParams,
    PowerSpec,
    SimSpec,
    TwoGroupSimSpec,
    mean_estimator_variance,
    monte_carlo_power,
    monte_carlo_se,
    simulate_dataset,
)

HOVELL1_RAW = ModelParams.from_raw(alpha0=1.63, alpha1=0.84, sigma2_eps=0.551,
                                   sigma2_phi=0.692, sigma2_delta=0.237)


def quiet_design(N, n, K):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Design(n_total=N, n_direct=n, k_reps=K)


class TestSimulateDataset:
    def test_noise_free_limit(self):
        # noise variances below double-precision resolution: every value
        # collapses to the true mean
        params = ModelParams.from_raw(alpha0=0.0, alpha1=1.0, sigma2_eps=5e-324,
                                      sigma2_phi=0.0, sigma2_delta=0.0)
        spec = SimSpec(params=params, design=quiet_design(8, 5, 2), mu=5.0,
                       replications=1, seed=1)
        data = simulate_dataset(spec)
        g = data.group(1)
        assert np.all(g.q == 5.0)
        assert np.all(g.replicates[:5] == 5.0)

    def test_determinism(self):
        spec = SimSpec(params=HOVELL1_RAW, design=quiet_design(30, 12, 3), mu=2.0,
                       replications=1, seed=99)
        a = simulate_dataset(spec).group(1)
        b = simulate_dataset(spec).group(1)
        assert np.array_equal(a.q, b.q)
        assert np.array_equal(a.replicates, b.replicates, equal_nan=True)
        c = simulate_dataset(spec, replicate=1).group(1)
        assert not np.array_equal(a.q, c.q)

    def test_structure(self):
        spec = SimSpec(params=HOVELL1_RAW, design=quiet_design(30, 12, 3), mu=2.0,
                       replications=1, seed=5)
        g = simulate_dataset(spec).group(1)
        assert g.n_total == 30
        assert g.n_direct == 12
        assert g.k_reps == 3
        assert len(set(g.subject_ids)) == 30

    def test_sample_moments_match_model(self):
        spec = SimSpec(params=HOVELL1_RAW, design=quiet_design(500, 500, 3), mu=2.0,
                       replications=1, seed=31)
        g = simulate_dataset(spec).group(1)
        nu = 1.63 + 0.84 * 2.0
        sigma2_q = 0.84**2 * 0.551 + 0.692
        se_mean = math.sqrt(sigma2_q / 500)
        se_var = sigma2_q * math.sqrt(2.0 / 499)
        assert abs(g.q.mean() - nu) < 3 * se_mean
        assert abs(g.q.var(ddof=1) - sigma2_q) < 3 * se_var

    def test_requires_raw_parameters(self):
        with pytest.raises(DomainError, match="raw parameters"):
            SimSpec(params=ModelParams(sigma2_eps=1, r_delta=1, r_phi=1),
                    design=quiet_design(10, 5, 2), mu=0.0, replications=1, seed=1)


class TestMonteCarloSE:
    def test_reduces_to_sample_mean_case(self):
        # n = N, K = 1, no direct noise: the estimator is the plain mean of T
        params = ModelParams.from_raw(alpha0=0.0, alpha1=1.0, sigma2_eps=1.0,
                                      sigma2_phi=1.0, sigma2_delta=0.0)
        spec = SimSpec(params=params, design=quiet_design(64, 64, 1), mu=0.0,
                       replications=3000, seed=17)
        mc = monte_carlo_se(spec)
        assert abs(mc.empirical_se - 1 / 8) < 4 * mc.mc_error

    def test_matches_closed_form_fixed_point(self):
        params = ModelParams.from_raw(alpha0=0.0, alpha1=1.0, sigma2_eps=1.0,
                                      sigma2_phi=1.0, sigma2_delta=1.0)
        spec = SimSpec(params=params, design=quiet_design(60, 30, 2), mu=3.0,
                       replications=4000, seed=23)
        mc = monte_carlo_se(spec)
        assert math.isclose(mc.closed_form_se, math.sqrt(2055 / 48600), rel_tol=1e-12)
        assert abs(mc.empirical_se - mc.closed_form_se) < 4 * mc.mc_error

    def test_mc_error_shrinks_with_replications(self):
        params = ModelParams.from_raw(alpha0=0.0, alpha1=1.0, sigma2_eps=1.0,
                                      sigma2_phi=1.0, sigma2_delta=1.0)
        base = SimSpec(params=params, design=quiet_design(40, 20, 2), mu=0.0,
                       replications=1000, seed=29)
        double = SimSpec(params=params, design=quiet_design(40, 20, 2), mu=0.0,
                         replications=2000, seed=29)
        r1 = monte_carlo_se(base)
        r2 = monte_carlo_se(double)
        assert 1.2 < r1.mc_error / r2.mc_error < 1.7

    def test_worker_count_does_not_change_results(self):
        params = ModelParams.from_raw(alpha0=0.5, alpha1=0.9, sigma2_eps=1.0,
                                      sigma2_phi=0.7, sigma2_delta=0.5)
        spec = SimSpec(params=params, design=quiet_design(25, 10, 2), mu=1.0,
                       replications=400, seed=37)
        serial = monte_carlo_se(spec, workers=1)
        threaded = monte_carlo_se(spec, workers=4)
        assert serial.empirical_se == threaded.empirical_se
        assert serial.mean_estimate == threaded.mean_estimate

    def test_degenerate_replicates_abort(self):
        # indirect measure is pure noise-free constant: every replicate fails
        params = ModelParams.from_raw(alpha0=1.0, alpha1=1.0, sigma2_eps=5e-324,
                                      sigma2_phi=0.0, sigma2_delta=0.0)
        spec = SimSpec(params=params, design=quiet_design(12, 6, 1), mu=2.0,
                       replications=50, seed=3)
        with pytest.raises(DegenerateDataError, match="failed"):
            monte_carlo_se(spec)


class TestMonteCarloPower:
    params2 = ModelParams.from_raw(alpha0=1.729, alpha1=0.868, sigma2_eps=0.705,
                                   sigma2_phi=0.740, sigma2_delta=0.237)

    def _two_spec(self, mu2, reps, seed=71):
        return TwoGroupSimSpec(
            params1=HOVELL1_RAW, design1=quiet_design(120, 120, 1), mu1=2.0,
            params2=self.params2, design2=quiet_design(130, 130, 1), mu2=mu2,
            replications=reps, seed=seed)

    def test_size_under_null(self):
        mc = monte_carlo_power(self._two_spec(mu2=2.0, reps=2000),
                               PowerSpec(alpha=0.05, power=0.8, delta=0.0))
        assert abs(mc.rejection_rate - 0.05) < 4 * mc.mc_error + 0.005

    def test_huge_effect_always_rejected(self):
        spec = self._two_spec(mu2=2.0 + 10 * 0.11, reps=500)
        mc = monte_carlo_power(spec, PowerSpec(alpha=0.05, power=0.8, delta=1.1))
        assert mc.rejection_rate > 0.99

    def test_agrees_with_analytic_power(self):
        from calibdesign import power_from_se

        spec = self._two_spec(mu2=2.3, reps=3000)
        pw = PowerSpec(alpha=0.05, power=0.8, delta=0.3)
        mc = monte_carlo_power(spec, pw)
        analytic = power_from_se(mc.closed_form_se, pw)
        assert abs(mc.rejection_rate - analytic) < 4 * mc.mc_error + 0.005

    def test_closed_form_se_matches_formula(self):
        spec = self._two_spec(mu2=2.1, reps=1)
        mc = monte_carlo_power(spec, PowerSpec(alpha=0.05, power=0.8, delta=0.1))
        expected = math.sqrt(
            mean_estimator_variance(HOVELL1_RAW, quiet_design(120, 120, 1))
            + mean_estimator_variance(self.params2, quiet_design(130, 130, 1)))
        assert math.isclose(mc.closed_form_se, expected, rel_tol=1e-12)
