"""Integer design optimization and minimum-budget search.

The search is deterministic and exact: for fixed (n, K) the variance is
linear in 1/N, so the optimal N is either n or the budget-exhausting
N = floor((C - n*K*C_B)/C_Q), chosen by the slope sign. That reduces the
single-group problem to an exhaustive scan over (n, K), vectorized over n.
The two-group problem adds a grid search over the budget split with local
refinement. The minimum-budget search iterates multiplicative corrections
C -> C * (SE(C)/SE_target)^2 and finishes with bisection once the target
is bracketed, returning the smallest feasible budget to within the
configured relative resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .formulas import _variance_kernel, mean_estimator_variance, se_target
from .types import (
    MIN_CALIBRATION,
    ConstraintError,
    ConvergenceError,
    CostModel,
    Design,
    DomainError,
    ModelParams,
    PowerSpec,
    TwoGroupDesign,
)

__all__ = [
    "OptimizerConfig",
    "DesignReport",
    "BudgetIteration",
    "BudgetSearchResult",
    "optimal_replicates",
    "optimize_single_group",
    "optimize_two_groups",
    "initial_budget",
    "minimize_budget",
]

_CHUNK = 1 << 18  # n-scan block size; caps temporary-array memory


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the deterministic searches.

    allocation_grid: step of the budget-fraction grid. 0.01 reproduces the
        published two-group allocations; finer grids can find marginally
        better splits with lopsided flush-fit designs.
    k_max_extra: how far above the closed-form optimal K to scan.
    tie_tolerance: relative variance tolerance under which designs are
        considered tied (smaller K, then smaller n, wins; allocations
        closest to 0.5 win).
    budget_tolerance: relative convergence resolution of the budget search.
    fraction_report_epsilon: if raising N above n improves variance by less
        than this (relative), the sampling fraction is reported as 1.
    """

    k_max_extra: int = 2
    allocation_grid: float = 0.01
    tie_tolerance: float = 1e-12
    budget_tolerance: float = 1e-5
    max_iterations: int = 50
    fraction_report_epsilon: float = 1e-4

    def __post_init__(self):
        if self.k_max_extra < 0:
            raise DomainError("k_max_extra must be >= 0")
        if not (0.0 < self.allocation_grid < 0.5):
            raise DomainError("allocation_grid must be in (0, 0.5)")
        for name in ("tie_tolerance", "budget_tolerance"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.fraction_report_epsilon <= 0:
            raise DomainError("fraction_report_epsilon must be positive")


DEFAULT_CONFIG = OptimizerConfig()


@dataclass(frozen=True)
class DesignReport:
    """Result of a design optimization.

    ``design`` is a Design (single group) or TwoGroupDesign. Group-wise
    tuples have one entry per group. ``achieved_variance`` is the variance
    of the effect estimator (sum over groups); ``achieved_se`` its root.
    """

    design: Design | TwoGroupDesign
    variances: tuple[float, ...]
    achieved_variance: float
    achieved_se: float
    sampling_fractions_reported: tuple[float, ...]
    spent_budget: float
    slack_budget: float
    allocation: float | None = None

    @property
    def group_designs(self) -> tuple[Design, ...]:
        if isinstance(self.design, TwoGroupDesign):
            return (self.design.group1, self.design.group2)
        return (self.design,)


@dataclass(frozen=True)
class BudgetIteration:
    index: int
    phase: str  # "correction" or "bisect"
    budget: float
    se: float | None  # None when the budget was infeasible


@dataclass(frozen=True)
class BudgetSearchResult:
    budget: float
    report: DesignReport
    trace: tuple[BudgetIteration, ...]
    corrections: int
    converged_by: str  # "tolerance" or "bisection"
    se_target: float


def optimal_replicates(r_delta: float, r_cb: float) -> int:
    """Optimal replicate count when everyone is directly measured:
    the largest k with k(k-1) < r_delta/r_cb (at least 1)."""
    if r_delta < 0:
        raise DomainError(f"r_delta must be >= 0, got {r_delta}")
    if r_cb <= 0:
        raise DomainError(f"r_cb must be positive, got {r_cb}")
    ratio = r_delta / r_cb
    k = 1
    while (k + 1) * k < ratio:
        k += 1
    return k


def _k_range(params: ModelParams, cost_ratio_cb: float, config: OptimizerConfig,
             fixed_k: int | None) -> range:
    if fixed_k is not None:
        if fixed_k < 1:
            raise DomainError(f"fixed_k must be >= 1, got {fixed_k}")
        return range(fixed_k, fixed_k + 1)
    k_star = optimal_replicates(params.r_delta, cost_ratio_cb)
    return range(1, k_star + config.k_max_extra + 1)


def _scan_candidates(params: ModelParams, c_q: float, c_b: float, budget: float,
                     k_values: range, tie_tol: float):
    """Exact scan over (n, K) with N in {n, budget-exhausting N}.

    Returns (variance, k, n, N) applying the tie rules, or None when no
    feasible design exists. Chunked so huge budgets stay within memory.
    """
    sig2, r_d, r_p = params.sigma2_eps, params.r_delta, params.r_phi

    def chunk_eval(K, lo, hi):
        n = np.arange(lo, hi + 1, dtype=np.float64)
        n_exhaust = np.floor((budget - n * K * c_b) / c_q)
        # variance is linear in 1/N; exhaust the budget only when that helps
        decreasing = (n - 2.0) / (1.0 + r_p) > 1.0 + r_d / K
        N = np.where(decreasing, n_exhaust, n)
        v = _variance_kernel(sig2, r_d, r_p, N, n, K)
        return n, N, v

    per_k: dict[int, float] = {}
    for K in k_values:
        n_max = int(budget // (K * c_b + c_q))
        if n_max < MIN_CALIBRATION:
            continue
        best = math.inf
        for lo in range(MIN_CALIBRATION, n_max + 1, _CHUNK):
            _, _, v = chunk_eval(K, lo, min(lo + _CHUNK - 1, n_max))
            best = min(best, float(v.min()))
        per_k[K] = best
    if not per_k:
        return None

    v_star = min(per_k.values())
    threshold = v_star * (1.0 + tie_tol)
    for K in sorted(per_k):  # smallest tied K wins
        if per_k[K] > threshold:
            continue
        n_max = int(budget // (K * c_b + c_q))
        for lo in range(MIN_CALIBRATION, n_max + 1, _CHUNK):
            n, N, v = chunk_eval(K, lo, min(lo + _CHUNK - 1, n_max))
            hits = np.nonzero(v <= threshold)[0]
            if hits.size:  # smallest tied n wins
                i = int(hits[0])
                return float(v[i]), K, int(n[i]), int(N[i])
    raise AssertionError("tie scan must find the recorded minimum")


def _min_group_budget(c_q: float, c_b: float, fixed_k: int | None) -> float:
    k = fixed_k if fixed_k is not None else 1
    return MIN_CALIBRATION * (k * c_b + c_q)


def _fraction_reported(params: ModelParams, design: Design, epsilon: float) -> float:
    """Sampling-fraction reporting rule: if allowing N > n buys less than
    ``epsilon`` relative variance, report the fraction as 1."""
    if design.n_total == design.n_direct:
        return 1.0
    v = mean_estimator_variance(params, design)
    clamped = Design(design.n_direct, design.n_direct, design.k_reps)
    v_clamped = mean_estimator_variance(params, clamped)
    if (v_clamped - v) / v < epsilon:
        return 1.0
    return design.sampling_fraction


def _single_group_report(params: ModelParams, cost: CostModel, design: Design,
                         config: OptimizerConfig) -> DesignReport:
    variance = mean_estimator_variance(params, design)
    spent = design.cost(cost)
    return DesignReport(
        design=design,
        variances=(variance,),
        achieved_variance=variance,
        achieved_se=math.sqrt(variance),
        sampling_fractions_reported=(
            _fraction_reported(params, design, config.fraction_report_epsilon),),
        spent_budget=spent,
        slack_budget=cost.c_total - spent,
    )


def optimize_single_group(params: ModelParams, cost: CostModel,
                          config: OptimizerConfig = DEFAULT_CONFIG,
                          fixed_k: int | None = None) -> DesignReport:
    """Minimize the group-mean variance over integer designs (N, n, K)
    within the budget. Exhaustive over n and K; exact in N by monotonicity."""
    k_values = _k_range(params, cost.r_cb, config, fixed_k)
    found = _scan_candidates(params, cost.c_q, cost.c_b, cost.c_total,
                             k_values, config.tie_tolerance)
    if found is None:
        min_budget = _min_group_budget(cost.c_q, cost.c_b, fixed_k)
        raise ConstraintError(
            f"budget {cost.c_total} infeasible: the smallest design "
            f"({MIN_CALIBRATION} fully-sampled participants) costs {min_budget}",
            min_feasible_budget=min_budget)
    _, k, n, n_tot = found
    design = Design(n_total=n_tot, n_direct=n, k_reps=k)
    return _single_group_report(params, cost, design, config)


def optimize_two_groups(params1: ModelParams, params2: ModelParams, cost: CostModel,
                        config: OptimizerConfig = DEFAULT_CONFIG,
                        fixed_k: int | None = None) -> DesignReport:
    """Split the budget between two groups and optimize each side.

    Grid search over the allocation fraction with one local refinement pass
    at a tenth of the grid step. Ties (within tie_tolerance) resolve toward
    the most balanced allocation.
    """
    min_g = _min_group_budget(cost.c_q, cost.c_b, fixed_k)
    if cost.c_total < 2 * min_g:
        raise ConstraintError(
            f"budget {cost.c_total} infeasible for two groups: minimal feasible "
            f"budget is {2 * min_g}", min_feasible_budget=2 * min_g)

    k_values1 = _k_range(params1, cost.r_cb, config, fixed_k)
    k_values2 = _k_range(params2, cost.r_cb, config, fixed_k)
    tie = config.tie_tolerance

    best: tuple[float, float, tuple, tuple] | None = None  # (v, a, found1, found2)

    def scan(numerators, denom):
        # allocations as exact rationals k/denom; group budgets via a single
        # multiply-divide so flush-fit designs are not lost to float dust
        nonlocal best
        for k in numerators:
            a = k / denom
            b1 = cost.c_total * k / denom
            b2 = cost.c_total * (denom - k) / denom
            if b1 < min_g or b2 < min_g:
                continue
            f1 = _scan_candidates(params1, cost.c_q, cost.c_b, b1, k_values1, tie)
            f2 = _scan_candidates(params2, cost.c_q, cost.c_b, b2, k_values2, tie)
            if f1 is None or f2 is None:
                continue
            v = f1[0] + f2[0]
            if best is None or v < best[0] * (1.0 - tie):
                best = (v, a, f1, f2)
            elif v <= best[0] * (1.0 + tie):
                # tie: prefer the more balanced split, then the smaller one
                if (abs(a - 0.5), a) < (abs(best[1] - 0.5), best[1]):
                    best = (v, a, f1, f2)

    steps = max(2, int(round(1.0 / config.allocation_grid)))
    scan(range(1, steps), steps)
    if best is None:
        raise ConstraintError(
            f"no feasible allocation at budget {cost.c_total}",
            min_feasible_budget=2 * min_g)

    # one-step local refinement at a tenth of the grid; a finer split must
    # improve materially (beyond the negligible-change threshold), otherwise
    # the coarse optimum stays the canonical answer
    coarse = best
    k0 = int(round(coarse[1] * steps)) * 10
    scan([k0 + j for j in range(-10, 11) if j != 0], steps * 10)
    if best is not coarse and best[0] >= coarse[0] * (1.0 - config.fraction_report_epsilon):
        best = coarse

    _, a, f1, f2 = best
    d1 = Design(n_total=f1[3], n_direct=f1[2], k_reps=f1[1])
    d2 = Design(n_total=f2[3], n_direct=f2[2], k_reps=f2[1])
    v1 = mean_estimator_variance(params1, d1)
    v2 = mean_estimator_variance(params2, d2)
    spent = d1.cost(cost) + d2.cost(cost)
    eps = config.fraction_report_epsilon
    return DesignReport(
        design=TwoGroupDesign(group1=d1, group2=d2, allocation=a),
        variances=(v1, v2),
        achieved_variance=v1 + v2,
        achieved_se=math.sqrt(v1 + v2),
        sampling_fractions_reported=(
            _fraction_reported(params1, d1, eps), _fraction_reported(params2, d2, eps)),
        spent_budget=spent,
        slack_budget=cost.c_total - spent,
        allocation=a,
    )


def initial_budget(params1: ModelParams, params2: ModelParams,
                   c_q: float, c_b: float, se_target_value: float) -> float:
    """Starting budget for the minimum-budget search: assumes n = N, an
    equal split, and the closed-form optimal K per group, under which the
    combined SE scales exactly as C**-0.5."""
    if se_target_value <= 0:
        raise DomainError("se_target_value must be positive")
    if c_q <= 0 or c_b <= 0:
        raise DomainError("unit costs must be positive")
    r_cb = c_b / c_q
    total = 0.0
    for p in (params1, params2):
        k = optimal_replicates(p.r_delta, r_cb)
        a = c_q * p.r_delta / k + k * c_b + c_q + c_b * p.r_delta
        total += p.sigma2_eps * a
    return 2.0 * total / se_target_value**2


def minimize_budget(params1: ModelParams, params2: ModelParams,
                    c_q: float, c_b: float, spec: PowerSpec,
                    config: OptimizerConfig = DEFAULT_CONFIG) -> BudgetSearchResult:
    """Smallest budget whose optimal two-group design meets the power target.

    Phase 1 applies multiplicative corrections C -> C*(SE(C)/SE_target)^2
    from the closed-form initial budget, stopping early if the achieved SE
    lands within budget_tolerance below the target. Phase 2 bisects once a
    feasible/infeasible pair brackets the target, returning the smallest
    feasible budget at relative resolution budget_tolerance.
    """
    target = se_target(spec)
    budget = initial_budget(params1, params2, c_q, c_b, target)
    trace: list[BudgetIteration] = []

    lo: float | None = None           # largest budget known to miss the target
    hi: float | None = None           # smallest budget known to meet it
    hi_report: DesignReport | None = None
    corrections = 0
    feasible_floor = 2 * _min_group_budget(c_q, c_b, None)

    def evaluate(c: float):
        try:
            return optimize_two_groups(params1, params2, CostModel(c_q, c_b, c), config)
        except ConstraintError as err:
            # remember the floor so bisection never searches below it
            nonlocal feasible_floor
            if err.min_feasible_budget is not None:
                feasible_floor = max(feasible_floor, err.min_feasible_budget)
            return None

    for i in range(config.max_iterations):
        report = evaluate(budget)
        se = report.achieved_se if report is not None else None
        trace.append(BudgetIteration(index=i, phase="correction", budget=budget, se=se))
        if report is None:
            lo = max(lo or 0.0, budget, feasible_floor * (1 - 1e-12))
            budget = max(feasible_floor, 2.0 * budget)
            corrections += 1
            continue
        if se <= target:
            if hi is None or budget < hi:
                hi, hi_report = budget, report
            if (target - se) / target <= config.budget_tolerance:
                return BudgetSearchResult(
                    budget=budget, report=report, trace=tuple(trace),
                    corrections=corrections, converged_by="tolerance",
                    se_target=target)
        else:
            lo = max(lo or 0.0, budget)
        if lo is not None and hi is not None:
            break
        budget = budget * (se / target) ** 2
        corrections += 1
    if lo is None or hi is None:
        raise ConvergenceError(
            f"budget search did not bracket the target SE {target} within "
            f"{config.max_iterations} iterations", trace=trace)

    idx = len(trace)
    while (hi - lo) / hi > config.budget_tolerance:
        mid = 0.5 * (lo + hi)
        report = evaluate(mid)
        se = report.achieved_se if report is not None else None
        trace.append(BudgetIteration(index=idx, phase="bisect", budget=mid, se=se))
        idx += 1
        if report is not None and se <= target:
            hi, hi_report = mid, report
        else:
            lo = mid

    return BudgetSearchResult(
        budget=hi, report=hi_report, trace=tuple(trace),
        corrections=corrections, converged_by="bisection", se_target=target)
