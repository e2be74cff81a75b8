"""Parameter sweeps, design-efficiency comparisons and threshold scans.

All outputs are deterministic functions of their inputs, emitted as flat
row records (long/tidy layout) so they can be written straight to CSV.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .formulas import _variance_kernel, mean_estimator_variance
from .optimizer import (
    DEFAULT_CONFIG,
    OptimizerConfig,
    optimal_replicates,
    optimize_single_group,
    optimize_two_groups,
)
from .types import (
    ConstraintError,
    CostModel,
    Design,
    DomainError,
    ModelParams,
    TwoGroupDesign,
)

__all__ = [
    "SweepGrid",
    "SurfaceRow",
    "ThresholdRow",
    "SensitivityRow",
    "efficiency",
    "sensitivity_scan",
    "threshold_scan",
    "se_surface",
    "rows_to_csv",
]


@dataclass(frozen=True)
class SweepGrid:
    """Named sweep axes (parameter -> ordered values) plus fixed settings."""

    axes: dict[str, tuple[float, ...]]
    fixed: dict[str, float] = field(default_factory=dict)
    target: str = "se_surface"

    def __post_init__(self):
        for name, values in self.axes.items():
            if not values:
                raise DomainError(f"axis {name!r} has no values")
            if not all(math.isfinite(v) for v in values):
                raise DomainError(f"axis {name!r} has non-finite values")

    @property
    def n_points(self) -> int:
        total = 1
        for values in self.axes.values():
            total *= len(values)
        return total


@dataclass(frozen=True)
class SurfaceRow:
    n_total: int
    n_direct: int
    k_reps: int
    r_delta: float
    r_phi: float
    se: float


@dataclass(frozen=True)
class ThresholdRow:
    r_cb: float
    r_delta_k2: float             # smallest r_delta where optimal K reaches 2
    r_delta_k3: float             # smallest r_delta where optimal K reaches 3
    r_delta_full_sampling: float | None  # smallest r_delta with reported n/N = 1


@dataclass(frozen=True)
class SensitivityRow:
    axis: str
    multiplier: float
    efficiency: float
    allocation: float
    n1: int
    n_total1: int
    k1: int
    n2: int
    n_total2: int
    k2: int


def _variance_sum(params, design) -> float:
    if isinstance(design, TwoGroupDesign):
        p1, p2 = params
        return (mean_estimator_variance(p1, design.group1)
                + mean_estimator_variance(p2, design.group2))
    if isinstance(params, tuple):
        raise DomainError("single-group design needs single ModelParams, not a pair")
    return mean_estimator_variance(params, design)


def efficiency(params_true, design_a: Design | TwoGroupDesign,
               design_b: Design | TwoGroupDesign) -> float:
    """Relative efficiency of two designs at the true parameters: the ratio
    of the smaller to the larger SE of the effect estimator (in (0, 1];
    symmetric; 1 iff the variances tie).

    ``params_true`` is a (group1, group2) pair for TwoGroupDesign inputs,
    or a single ModelParams for single-group designs.
    """
    v_a = _variance_sum(params_true, design_a)
    v_b = _variance_sum(params_true, design_b)
    return math.sqrt(min(v_a, v_b) / max(v_a, v_b))


def sensitivity_scan(params1: ModelParams, params2: ModelParams, axis: str,
                     multipliers, cost: CostModel,
                     config: OptimizerConfig = DEFAULT_CONFIG) -> list[SensitivityRow]:
    """Efficiency cost of planning with a misassessed group-1 parameter.

    For each multiplier the whole two-group design (split and per-group
    integer designs) is re-optimized with the group-1 ``axis`` value scaled,
    then evaluated at the true parameters against the true optimum.
    """
    if any(m <= 0 for m in multipliers):
        raise DomainError("multipliers must be positive")
    truth_report = optimize_two_groups(params1, params2, cost, config)
    rows = []
    for m in multipliers:
        planned1 = params1.with_multiplier(axis, m)
        planned = optimize_two_groups(planned1, params2, cost, config)
        eff = efficiency((params1, params2), truth_report.design, planned.design)
        d = planned.design
        rows.append(SensitivityRow(
            axis=axis, multiplier=float(m), efficiency=eff,
            allocation=planned.allocation,
            n1=d.group1.n_direct, n_total1=d.group1.n_total, k1=d.group1.k_reps,
            n2=d.group2.n_direct, n_total2=d.group2.n_total, k2=d.group2.k_reps,
        ))
    return rows


def _bisect_r_delta(predicate, lo: float, hi: float, rel_width: float = 1e-3,
                    max_expand: int = 60) -> float:
    """Smallest r_delta satisfying a monotone predicate, by bisection.
    The bracket [lo, hi] expands geometrically until it straddles; if the
    predicate holds arbitrarily close to zero the threshold is 0."""
    expansions = 0
    while predicate(lo) and expansions < max_expand:
        lo /= 2.0
        expansions += 1
        if lo < 1e-12:
            return 0.0
    while not predicate(hi) and expansions < max_expand:
        hi *= 2.0
        expansions += 1
    if predicate(lo) or not predicate(hi):
        raise ConstraintError(f"could not bracket threshold in r_delta ({lo}, {hi})")
    while (hi - lo) / hi > rel_width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def threshold_scan(r_cb_values, r_phi: float, c_total: float, c_q: float = 1.0,
                   config: OptimizerConfig = DEFAULT_CONFIG,
                   include_fraction: bool = False,
                   sigma2_eps: float = 1.0) -> list[ThresholdRow]:
    """Where replication and full sampling become optimal.

    For each direct-measurement cost ratio, locates by bisection the
    smallest r_delta at which the optimal design first uses K = 2 and
    K = 3, and optionally the smallest r_delta whose reported sampling
    fraction is 1. Population variance does not affect the optimizer, so
    sigma2_eps is only a scale.
    """
    rows = []
    for r_cb in r_cb_values:
        if r_cb <= 0:
            raise DomainError(f"r_cb must be positive, got {r_cb}")
        cost = CostModel(c_q=c_q, c_b=r_cb * c_q, c_total=c_total)

        def optimum(r_delta: float):
            params = ModelParams(sigma2_eps=sigma2_eps, r_delta=r_delta, r_phi=r_phi)
            return optimize_single_group(params, cost, config)

        def k_reaches(target_k: int):
            return lambda r_delta: optimum(r_delta).design.k_reps >= target_k

        # the full-sampling condition k(k-1) < r_delta/r_cb anchors brackets
        k2 = _bisect_r_delta(k_reaches(2), lo=1.2 * r_cb, hi=3.0 * r_cb)
        k3 = _bisect_r_delta(k_reaches(3), lo=4.0 * r_cb, hi=9.0 * r_cb)
        frac = None
        if include_fraction:
            def fully_sampled(r_delta: float) -> bool:
                return optimum(r_delta).sampling_fractions_reported[0] >= 1.0
            frac = _bisect_r_delta(fully_sampled, lo=0.05 * max(r_cb, 1.0),
                                   hi=4.0 * max(r_cb, 1.0))
        rows.append(ThresholdRow(r_cb=float(r_cb), r_delta_k2=k2, r_delta_k3=k3,
                                 r_delta_full_sampling=frac))
    return rows


def se_surface(n_values, k_values, r_delta_values, n_total: int, r_phi: float,
               sigma2_eps: float = 1.0) -> list[SurfaceRow]:
    """SE of the group-mean estimator over a grid of (n, K, r_delta) at a
    fixed number of participants. Long-format rows in grid order."""
    if n_total < 4:
        raise DomainError("n_total must be at least 4")
    rows = []
    for r_delta in r_delta_values:
        for k in k_values:
            for n in n_values:
                if not 4 <= n <= n_total:
                    raise DomainError(f"n={n} outside [4, {n_total}]")
                var = float(_variance_kernel(sigma2_eps, r_delta, r_phi,
                                             float(n_total), float(n), float(k)))
                rows.append(SurfaceRow(
                    n_total=n_total, n_direct=int(n), k_reps=int(k),
                    r_delta=float(r_delta), r_phi=float(r_phi),
                    se=math.sqrt(var)))
    return rows


def rows_to_csv(rows, target) -> None:
    """Write dataclass rows as CSV with a header naming every field."""
    import csv

    if not rows:
        raise DomainError("no rows to write")
    fields = list(asdict(rows[0]).keys())
    own = not hasattr(target, "write")
    handle = open(target, "w", newline="") if own else target
    try:
        writer = csv.DictWriter(handle, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    finally:
        if own:
            handle.close()
