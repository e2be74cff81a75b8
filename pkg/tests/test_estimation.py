import io
import math
import warnings

import numpy as np
import pytest

from calibdesign import (
    DegenerateDataError,
    DomainError,
    GroupData,
    InsufficientDataError,
    ModelParams,
    PilotDataset,
    TruncatedVarianceWarning,
    estimate_model_params,
    mle_mean,
    read_pilot_csv,
    write_pilot_csv,
)


def dataset(q, m_rows, group_id=1):
    """Build a one-group dataset: q per subject; m_rows shorter than q pads
    the remaining subjects with no replicates."""
    q = np.asarray(q, dtype=float)
    k = max((len(r) for r in m_rows), default=1)
    m = np.full((q.size, k), math.nan)
    for i, row in enumerate(m_rows):
        m[i, :len(row)] = row
    ids = [f"s{i}" for i in range(q.size)]
    return PilotDataset(groups={group_id: GroupData(
        group_id=group_id, subject_ids=ids, q=q, replicates=m)})


def mle_by_hand(q_all, m_bar):
    """Literal transcription of the mean-MLE formulas; the oracle."""
    n = len(m_bar)
    q_cal = q_all[:n]
    qbar_n = sum(q_cal) / n
    mbar_n = sum(m_bar) / n
    num = sum(m * q for m, q in zip(m_bar, q_cal)) - n * mbar_n * qbar_n
    den = sum((q - qbar_n) ** 2 for q in q_cal)
    beta1 = num / den
    beta0 = mbar_n - beta1 * qbar_n
    nu = sum(q_all) / len(q_all)
    return beta0 + beta1 * nu


class TestMleMean:
    def test_perfect_correlation_identity(self):
        q = [1.0, 2.0, 3.0, 4.0, 5.0]
        data = dataset(q, [[v] for v in q])
        est = mle_mean(data)
        assert math.isclose(est.beta1_hat, 1.0, rel_tol=1e-12)
        assert abs(est.beta0_hat) < 1e-12
        assert math.isclose(est.mu_hat, 3.0, rel_tol=1e-12)

    def test_full_sampling_returns_direct_mean(self):
        rng = np.random.default_rng(3)
        q = rng.normal(2.0, 1.0, 12)
        m = rng.normal(1.0, 1.0, (12, 2))
        data = dataset(q, list(m))
        est = mle_mean(data)
        assert math.isclose(est.mu_hat, m.mean(axis=1).mean(), rel_tol=1e-12)

    def test_six_subject_oracle(self):
        rng = np.random.default_rng(20240615)
        q_all = list(rng.normal(3.0, 1.2, 6))
        m_rows = [list(rng.normal(2.0, 0.8, 2)) for _ in range(4)]
        data = dataset(q_all, m_rows)
        est = mle_mean(data)
        m_bar = [sum(r) / len(r) for r in m_rows]
        assert math.isclose(est.mu_hat, mle_by_hand(q_all, m_bar), rel_tol=1e-12)

    def test_decomposition_identity(self):
        # mu_hat = mean_n(M) + beta1 * (mean_N(Q) - mean_n(Q)) always
        rng = np.random.default_rng(8)
        for _ in range(25):
            N = int(rng.integers(6, 40))
            n = int(rng.integers(4, N + 1))
            q = rng.normal(0, 2, N)
            m = rng.normal(1, 1, (n, 3))
            est = mle_mean(dataset(q, list(m)))
            lhs = est.mu_hat
            rhs = m.mean() + est.beta1_hat * (q.mean() - q[:n].mean())
            assert math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-12)

    def test_scale_equivariance_in_direct_measure(self):
        rng = np.random.default_rng(9)
        q = rng.normal(0, 1, 15)
        m = rng.normal(2, 1, (9, 2))
        base = mle_mean(dataset(q, list(m))).mu_hat
        scaled = mle_mean(dataset(q, list(3.5 * m))).mu_hat
        assert math.isclose(scaled, 3.5 * base, rel_tol=1e-12)

    def test_q_shift_invariance_at_full_sampling(self):
        rng = np.random.default_rng(10)
        q = rng.normal(0, 1, 10)
        m = rng.normal(2, 1, (10, 2))
        base = mle_mean(dataset(q, list(m))).mu_hat
        shifted = mle_mean(dataset(q + 11.0, list(m))).mu_hat
        assert math.isclose(shifted, base, rel_tol=1e-9)

    def test_insufficient_calibration(self):
        with pytest.raises(InsufficientDataError):
            mle_mean(dataset([1.0, 2.0, 3.0, 4.0], [[1.0], [2.0], [3.0]]))

    def test_degenerate_q(self):
        with pytest.raises(DegenerateDataError):
            mle_mean(dataset([2.0] * 6, [[1.0], [2.0], [1.5], [2.5]]))

    def test_unknown_group(self):
        with pytest.raises(DomainError, match="no data for group"):
            mle_mean(dataset([1, 2, 3, 4], [[1], [2], [1], [2]]), group=2)


class TestEstimateModelParams:
    def test_identical_replicates_mean_zero_direct_noise(self):
        rng = np.random.default_rng(4)
        q = rng.normal(0, 1, 10)
        m = [[v, v, v] for v in rng.normal(1, 1, 10)]
        est = estimate_model_params(dataset(q, m))
        # identical replicates: zero within-subject spread (up to fp rounding
        # of the row means)
        assert est.sigma2_delta == pytest.approx(0.0, abs=1e-24)
        assert est.r_delta == pytest.approx(0.0, abs=1e-20)

    def test_single_replicate_not_identifiable(self):
        rng = np.random.default_rng(5)
        q = rng.normal(0, 1, 8)
        m = [[v] for v in rng.normal(1, 1, 8)]
        with pytest.raises(DegenerateDataError, match="r_delta externally"):
            estimate_model_params(dataset(q, m))

    def test_unequal_replicate_counts_rejected(self):
        q = [0.1, 0.9, 2.0, 3.2, 1.1]
        m = [[1.0, 2.0], [2.0, 1.0], [1.5], [2.5, 2.0], [0.5, 1.5]]
        with pytest.raises(DegenerateDataError, match="unequal replicate"):
            estimate_model_params(dataset(q, m))

    def test_truncation_branch(self):
        # nearly identical subject means but huge within-subject spread
        rng = np.random.default_rng(6)
        centers = 5.0 + 1e-6 * rng.normal(size=8)
        m = [[c + 3.0, c - 3.0] for c in centers]
        q = rng.normal(0, 1, 8)
        with pytest.warns(TruncatedVarianceWarning):
            est = estimate_model_params(dataset(q, m))
        assert est.sigma2_eps > 0
        assert est.notes

    def test_moment_round_trip(self):
        # the forward identities reproduce the consumed sample moments
        # (data from the actual model, so no truncation interferes)
        rng = np.random.default_rng(12)
        N, n, K = 60, 24, 3
        t = rng.normal(3.0, 1.1, N)
        q = 1.5 + 0.9 * t + rng.normal(0, 0.8, N)
        m = t[:n, None] + rng.normal(0, 0.7, (n, K))
        est = estimate_model_params(dataset(q, list(m)))
        assert not est.notes
        q_cal = q[:n]
        m_bar = m.mean(axis=1)
        assert math.isclose(est.alpha0 + est.alpha1 * m_bar.mean(), q_cal.mean(), rel_tol=1e-9)
        assert math.isclose(est.alpha1**2 * est.sigma2_eps + est.sigma2_phi,
                            q_cal.var(ddof=1), rel_tol=1e-9)
        assert math.isclose(est.sigma2_eps + est.sigma2_delta / K,
                            m_bar.var(ddof=1), rel_tol=1e-9)
        assert math.isclose(est.r_delta, est.sigma2_delta / est.sigma2_eps, rel_tol=1e-12)
        assert math.isclose(est.r_phi, est.sigma2_phi / (est.alpha1**2 * est.sigma2_eps),
                            rel_tol=1e-12)

    def test_recovers_generating_parameters(self):
        # data simulated from known raw parameters; estimator means must sit
        # within 3 standard errors of the truth over 200 replications
        from calibdesign import Design, SimSpec, simulate_dataset

        truth = ModelParams.from_raw(alpha0=1.63, alpha1=0.84, sigma2_eps=0.551,
                                     sigma2_phi=0.692, sigma2_delta=0.237)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d = Design(n_total=500, n_direct=500, k_reps=3)
        spec = SimSpec(params=truth, design=d, mu=2.0, replications=1, seed=424242)
        keys = ("alpha0", "alpha1", "sigma2_eps", "sigma2_phi", "sigma2_delta")
        draws = {k: [] for k in keys}
        for rep in range(200):
            est = estimate_model_params(simulate_dataset(spec, replicate=rep))
            for k in keys:
                draws[k].append(getattr(est, k))
        expected = dict(alpha0=1.63, alpha1=0.84, sigma2_eps=0.551,
                        sigma2_phi=0.692, sigma2_delta=0.237)
        for k in keys:
            values = np.asarray(draws[k])
            sem = values.std(ddof=1) / math.sqrt(values.size)
            assert abs(values.mean() - expected[k]) < 3 * sem, (
                f"{k}: mean {values.mean():.4f} vs {expected[k]} (sem {sem:.4f})")

    def test_estimation_error_shrinks_with_sample_size(self):
        from calibdesign import Design, SimSpec, simulate_dataset

        truth = ModelParams.from_raw(alpha0=0.5, alpha1=1.2, sigma2_eps=1.0,
                                     sigma2_phi=0.8, sigma2_delta=0.6)
        keys = ("alpha1", "sigma2_eps", "sigma2_delta", "sigma2_phi")
        truth_vals = dict(alpha1=1.2, sigma2_eps=1.0, sigma2_delta=0.6, sigma2_phi=0.8)
        mae = {}
        for N in (100, 400, 1600):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                d = Design(n_total=N, n_direct=N, k_reps=2)
            spec = SimSpec(params=truth, design=d, mu=0.0, replications=1, seed=777)
            errs = {k: [] for k in keys}
            for rep in range(100):
                est = estimate_model_params(simulate_dataset(spec, replicate=rep))
                for k in keys:
                    errs[k].append(abs(getattr(est, k) - truth_vals[k]))
            mae[N] = {k: float(np.mean(errs[k])) for k in keys}
        for k in keys:
            assert mae[100][k] > mae[400][k] > mae[1600][k]

    def test_plug_in_se_present(self):
        rng = np.random.default_rng(13)
        q = rng.normal(0, 1, 30)
        m = rng.normal(1, 1, (12, 2))
        est = estimate_model_params(dataset(q, list(m)))
        assert est.se_mu is not None and est.se_mu > 0


class TestCsvIO:
    CSV = (
        "subject_id,group,q,m1,m2\n"
        "a1,1,2.5,1.0,1.4\n"
        "a2,1,3.5,2.0,1.8\n"
        "a3,1,1.5,0.5,0.7\n"
        "a4,1,2.0,1.1,0.9\n"
        "a5,1,2.8,,\n"
        "b1,2,4.0,2.0,2.2\n"
        "b2,2,4.4,2.4,2.0\n"
        "b3,2,3.6,1.6,1.8\n"
        "b4,2,4.1,2.1,2.3\n"
    )

    def test_read_inline_text(self):
        data = read_pilot_csv(self.CSV)
        assert data.group_ids() == [1, 2]
        g1 = data.group(1)
        assert g1.n_total == 5 and g1.n_direct == 4 and g1.k_reps == 2

    def test_round_trip(self, tmp_path):
        data = read_pilot_csv(self.CSV)
        path = tmp_path / "pilot.csv"
        write_pilot_csv(data, path)
        again = read_pilot_csv(path)
        for gid in (1, 2):
            a, b = data.group(gid), again.group(gid)
            assert a.subject_ids == b.subject_ids
            assert np.array_equal(a.q, b.q)
            assert np.array_equal(a.replicates, b.replicates, equal_nan=True)

    def test_missing_header(self):
        with pytest.raises(DomainError, match="header"):
            read_pilot_csv("a1,1,2.5,1.0\na2,1,3.5,2.0\n")

    def test_bad_group_value(self):
        bad = "subject_id,group,q,m1\nx,3,1.0,2.0\n"
        with pytest.raises(DomainError, match="group must be 1 or 2"):
            read_pilot_csv(bad)

    def test_duplicate_subjects_rejected(self):
        bad = "subject_id,group,q,m1\nx,1,1.0,2.0\nx,1,1.5,2.5\n"
        with pytest.raises(DomainError, match="duplicate"):
            read_pilot_csv(bad)

    def test_bad_replicate_cell(self):
        bad = "subject_id,group,q,m1\nx,1,1.0,oops\n"
        with pytest.raises(DomainError, match="bad replicate"):
            read_pilot_csv(bad)

    def test_estimates_from_file_stream(self):
        data = read_pilot_csv(io.StringIO(self.CSV))
        est = estimate_model_params(data, 1)
        assert est.n_total == 5 and est.n_direct == 4 and est.k_reps == 2
