"""Monte Carlo generation and validation.

Datasets are drawn from the measurement model with normal errors. Every
replicate uses its own substream, a PCG64 generator seeded with
SeedSequence((seed, replicate_index)), so results are identical for a
given SimSpec regardless of execution order or worker count. Variates are
drawn in a fixed documented order per group: population deviations, then
indirect-measurement noise, then the replicate-by-replicate direct noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .estimation import GroupData, PilotDataset, mle_mean
from .formulas import mean_estimator_variance
from .types import (
    DegenerateDataError,
    Design,
    DomainError,
    ModelParams,
    PowerSpec,
)

__all__ = [
    "SimSpec",
    "TwoGroupSimSpec",
    "MonteCarloSE",
    "MonteCarloPower",
    "simulate_dataset",
    "monte_carlo_se",
    "monte_carlo_power",
]


def _require_raw(params: ModelParams, label: str) -> None:
    if not params.has_raw:
        raise DomainError(
            f"{label}: simulation needs raw parameters (alpha0, alpha1, "
            "sigma2_phi, sigma2_delta); build them with ModelParams.from_raw")


@dataclass(frozen=True)
class SimSpec:
    """One-group simulation: model parameters (raw values required), an
    integer design, the true mean, replication count and master seed."""

    params: ModelParams
    design: Design
    mu: float
    replications: int
    seed: int
    group_id: int = 1

    def __post_init__(self):
        _require_raw(self.params, "SimSpec.params")
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class TwoGroupSimSpec:
    """Two-arm simulation for power checks; one master seed drives both
    groups of each replicate."""

    params1: ModelParams
    design1: Design
    mu1: float
    params2: ModelParams
    design2: Design
    mu2: float
    replications: int
    seed: int

    def __post_init__(self):
        _require_raw(self.params1, "TwoGroupSimSpec.params1")
        _require_raw(self.params2, "TwoGroupSimSpec.params2")
        if self.replications < 1:
            raise DomainError(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class MonteCarloSE:
    empirical_se: float
    mc_error: float
    mean_estimate: float
    replications: int
    n_failed: int
    closed_form_se: float
    values: tuple[float, ...] | None = None  # per-replicate estimates on request


@dataclass(frozen=True)
class MonteCarloPower:
    rejection_rate: float
    mc_error: float
    closed_form_se: float
    replications: int
    n_failed: int
    values: tuple[float, ...] | None = None  # per-replicate 0/1 rejections


def _rng_for(seed: int, replicate: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, replicate))))


@lru_cache(maxsize=8)
def _subject_ids(group_id: int, n_total: int) -> tuple[str, ...]:
    return tuple(f"g{group_id}s{i + 1}" for i in range(n_total))


def _draw_group(rng: np.random.Generator, params: ModelParams, design: Design,
                mu: float, group_id: int) -> GroupData:
    N, n, K = design.n_total, design.n_direct, design.k_reps
    t = mu + math.sqrt(params.sigma2_eps) * rng.standard_normal(N)
    q = params.alpha0 + params.alpha1 * t + math.sqrt(params.sigma2_phi) * rng.standard_normal(N)
    m = np.full((N, K), math.nan)
    m[:n] = t[:n, None] + math.sqrt(params.sigma2_delta) * rng.standard_normal((n, K))
    return GroupData(group_id=group_id, subject_ids=list(_subject_ids(group_id, N)),
                     q=q, replicates=m)


def simulate_dataset(spec: SimSpec, replicate: int = 0) -> PilotDataset:
    """Draw one dataset; the first n subjects form the calibration
    subsample. Deterministic in (spec.seed, replicate)."""
    rng = _rng_for(spec.seed, replicate)
    g = _draw_group(rng, spec.params, spec.design, spec.mu, spec.group_id)
    return PilotDataset(groups={spec.group_id: g})


def _run_replicates(total: int, worker, workers: int) -> np.ndarray:
    """Evaluate worker(r) for r in range(total) into a float array; results
    are placed by index so any execution order gives identical output."""
    out = np.full(total, math.nan)
    if workers <= 1:
        for r in range(total):
            out[r] = worker(r)
        return out
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for r, value in zip(range(total), pool.map(worker, range(total))):
            out[r] = value
    return out


def monte_carlo_se(spec: SimSpec, workers: int = 1,
                   collect_values: bool = False) -> MonteCarloSE:
    """Empirical SE of the mean MLE across replicate datasets, with its
    asymptotic Monte Carlo error sd/sqrt(2(R-1)). Aborts if more than 1%
    of replicates fail estimation. ``collect_values`` keeps the
    per-replicate estimates (failures as NaN) for dumps."""

    def one(r: int) -> float:
        try:
            return mle_mean(simulate_dataset(spec, r), spec.group_id).mu_hat
        except DegenerateDataError:
            return math.nan

    values = _run_replicates(spec.replications, one, workers)
    ok = np.isfinite(values)
    n_failed = int((~ok).sum())
    if n_failed > 0.01 * spec.replications:
        raise DegenerateDataError(
            f"{n_failed}/{spec.replications} replicates failed estimation")
    kept = values[ok]
    if kept.size < 2:
        raise DomainError("need at least 2 successful replicates for an empirical SE")
    se = float(kept.std(ddof=1))
    return MonteCarloSE(
        empirical_se=se,
        mc_error=se / math.sqrt(2.0 * (kept.size - 1)),
        mean_estimate=float(kept.mean()),
        replications=spec.replications,
        n_failed=n_failed,
        closed_form_se=math.sqrt(mean_estimator_variance(spec.params, spec.design)),
        values=tuple(float(v) for v in values) if collect_values else None,
    )


def monte_carlo_power(sim: TwoGroupSimSpec, spec: PowerSpec, workers: int = 1,
                      collect_values: bool = False) -> MonteCarloPower:
    """Empirical rejection rate of the two-sided Wald test of equal means,
    using the closed-form SE of the effect estimator at the true
    parameters as the test's scale."""
    from scipy.stats import norm

    v1 = mean_estimator_variance(sim.params1, sim.design1)
    v2 = mean_estimator_variance(sim.params2, sim.design2)
    se_closed = math.sqrt(v1 + v2)
    z_crit = float(norm.ppf(1.0 - spec.alpha / 2.0))

    def one(r: int) -> float:
        rng = _rng_for(sim.seed, r)
        try:
            g1 = _draw_group(rng, sim.params1, sim.design1, sim.mu1, 1)
            g2 = _draw_group(rng, sim.params2, sim.design2, sim.mu2, 2)
            data = PilotDataset(groups={1: g1, 2: g2})
            m1 = mle_mean(data, 1).mu_hat
            m2 = mle_mean(data, 2).mu_hat
        except DegenerateDataError:
            return math.nan
        return 1.0 if abs((m2 - m1) / se_closed) > z_crit else 0.0

    values = _run_replicates(sim.replications, one, workers)
    ok = np.isfinite(values)
    n_failed = int((~ok).sum())
    if n_failed > 0.01 * sim.replications:
        raise DegenerateDataError(
            f"{n_failed}/{sim.replications} replicates failed estimation")
    kept = values[ok]
    rate = float(kept.mean())
    return MonteCarloPower(
        rejection_rate=rate,
        mc_error=math.sqrt(max(rate * (1.0 - rate), 1e-12) / kept.size),
        closed_form_se=se_closed,
        replications=sim.replications,
        n_failed=n_failed,
        values=tuple(float(v) for v in values) if collect_values else None,
    )
