"""Closed-form variance, power and SE-target formulas.

All functions are pure, operate in double precision, and validate their
domains. ``_variance_kernel`` accepts numpy arrays so the optimizer can
scan designs vectorized; the public functions take scalars.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm

from .types import (
    MIN_CALIBRATION,
    ConstraintError,
    CostModel,
    Design,
    DomainError,
    ModelParams,
    PowerSpec,
)

__all__ = [
    "mean_estimator_variance",
    "full_sampling_variance",
    "budget_exhausted_variance",
    "power_from_se",
    "se_target",
]


def _variance_kernel(sigma2_eps, r_delta, r_phi, n_total, n_direct, k_reps):
    """Variance of the estimated group mean, array-friendly.

    sigma2_eps / (N n (n-3)) * [ (Nn - 2N - n)(1 + r_delta/K)
                                 - (N - n)(n - 2) / (1 + r_phi) ]
    """
    N, n, K = n_total, n_direct, k_reps
    bracket = (N * n - 2.0 * N - n) * (1.0 + r_delta / K) \
        - (N - n) * (n - 2.0) / (1.0 + r_phi)
    return sigma2_eps * bracket / (N * n * (n - 3.0))


def _check_design_numbers(n_total: float, n_direct: float, k_reps: float) -> None:
    if k_reps < 1:
        raise DomainError(f"k_reps must be >= 1, got {k_reps}")
    if n_direct < MIN_CALIBRATION:
        raise DomainError(
            f"calibration subsample too small: n_direct={n_direct} < {MIN_CALIBRATION}")
    if n_direct > n_total:
        raise ConstraintError(f"n_direct={n_direct} exceeds n_total={n_total}")


def mean_estimator_variance(params: ModelParams, design: Design) -> float:
    """Variance of the estimated mean exposure under the given design.

    Strictly decreasing in n; in N it is linear in 1/N, decreasing iff
    (n-2)/(1+r_phi) > 1 + r_delta/K. At n = N it reduces to
    (sigma2_eps/n)(1 + r_delta/K) and is independent of r_phi.
    """
    _check_design_numbers(design.n_total, design.n_direct, design.k_reps)
    return float(_variance_kernel(
        params.sigma2_eps, params.r_delta, params.r_phi,
        design.n_total, design.n_direct, design.k_reps))


def full_sampling_variance(params: ModelParams, cost: CostModel, k_reps: int) -> float:
    """Variance when every participant gets K direct measurements (n = N)
    and the budget is spent continuously: N = C / (K*C_B + C_Q).

    Equals (sigma2_eps/C) * (C_Q*r_delta/K + K*C_B + C_Q + C_B*r_delta).
    """
    if k_reps < 1:
        raise DomainError(f"k_reps must be >= 1, got {k_reps}")
    n_affordable = math.floor(cost.c_total / (k_reps * cost.c_b + cost.c_q))
    if n_affordable < MIN_CALIBRATION:
        raise ConstraintError(
            f"budget {cost.c_total} admits only {n_affordable} fully-sampled "
            f"participants at K={k_reps}; at least {MIN_CALIBRATION} required",
            min_feasible_budget=MIN_CALIBRATION * (k_reps * cost.c_b + cost.c_q))
    return params.sigma2_eps / cost.c_total * (
        cost.c_q * params.r_delta / k_reps
        + k_reps * cost.c_b + cost.c_q + cost.c_b * params.r_delta)


def budget_exhausted_variance(params: ModelParams, cost: CostModel,
                              n_direct: int, k_reps: int) -> float:
    """Variance with N chosen (continuously) to spend the budget exactly:
    N = r_C - n*K*r_CB. Diagnostic form; the optimizer uses integer N.
    """
    if k_reps < 1:
        raise DomainError(f"k_reps must be >= 1, got {k_reps}")
    if n_direct < MIN_CALIBRATION:
        raise DomainError(
            f"calibration subsample too small: n_direct={n_direct} < {MIN_CALIBRATION}")
    n_total = cost.r_c - n_direct * k_reps * cost.r_cb
    if n_total < n_direct:
        raise ConstraintError(
            f"budget {cost.c_total} cannot fund n_direct={n_direct} at K={k_reps}: "
            f"implied N={n_total:.2f} < n")
    return float(_variance_kernel(
        params.sigma2_eps, params.r_delta, params.r_phi,
        n_total, n_direct, k_reps))


def power_from_se(se_combined: float, spec: PowerSpec) -> float:
    """Approximate power of the two-sided level-alpha test given the SE of
    the effect estimator: Phi(|delta|/SE - z_{1-alpha/2}).

    The approximation ignores rejections in the wrong direction, so at
    delta = 0 it returns alpha/2 rather than alpha.
    """
    if not (se_combined > 0 and math.isfinite(se_combined)):
        raise DomainError(f"se_combined must be positive, got {se_combined}")
    z_crit = norm.ppf(1.0 - spec.alpha / 2.0)
    return float(norm.cdf(abs(spec.delta) / se_combined - z_crit))


def se_target(spec: PowerSpec) -> float:
    """Largest SE of the effect estimator that still attains the target
    power: |delta| / (z_{1-alpha/2} + z_power)."""
    if spec.delta == 0:
        raise DomainError("se_target requires a nonzero effect size")
    return abs(spec.delta) / (norm.ppf(1.0 - spec.alpha / 2.0) + norm.ppf(spec.power))
