"""Domain types for dual-instrument study design.

The measurement model: each participant's true exposure T is normal with
mean mu and variance sigma2_eps. Direct measurements (e.g. a biomarker)
are unbiased replicates M = T + noise(sigma2_delta), taken K times on a
calibration subsample of n of the N participants. The indirect measurement
(e.g. self-report) Q = alpha0 + alpha1*T + noise(sigma2_phi) is taken on
everyone. Design inputs are expressed through two noise ratios:

    r_delta = sigma2_delta / sigma2_eps
    r_phi   = sigma2_phi / (alpha1**2 * sigma2_eps)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


class CalibDesignError(Exception):
    """Base class for all package errors."""


class DomainError(CalibDesignError, ValueError):
    """A value is outside the domain a formula or type requires."""


class ConstraintError(CalibDesignError):
    """A design or budget constraint cannot be satisfied."""

    def __init__(self, message: str, min_feasible_budget: float | None = None):
        super().__init__(message)
        self.min_feasible_budget = min_feasible_budget


class DegenerateDataError(CalibDesignError):
    """Pilot data has no usable variation (e.g. constant indirect measure)."""


class InsufficientDataError(CalibDesignError):
    """Too few calibration subjects for estimation."""


class ConvergenceError(CalibDesignError):
    """Iterative budget search did not converge; carries the iteration trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace or []


class SmallSubsampleWarning(UserWarning):
    """Calibration subsample below 10; normal-approximation SEs are fragile."""


class TruncatedVarianceWarning(UserWarning):
    """A moment-based variance estimate was negative and has been truncated."""


_RAW_CONSISTENCY_RTOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Population and measurement-error parameters for one study group.

    Only ``sigma2_eps``, ``r_delta`` and ``r_phi`` are needed for design
    work; the raw regression/noise parameters are optional and, when
    present, must be consistent with the ratios.
    """

    sigma2_eps: float
    r_delta: float
    r_phi: float
    alpha0: float | None = None
    alpha1: float | None = None
    sigma2_phi: float | None = None
    sigma2_delta: float | None = None

    def __post_init__(self):
        if not (self.sigma2_eps > 0 and math.isfinite(self.sigma2_eps)):
            raise DomainError(f"sigma2_eps must be positive and finite, got {self.sigma2_eps}")
        if not (self.r_delta >= 0 and math.isfinite(self.r_delta)):
            raise DomainError(f"r_delta must be >= 0 and finite, got {self.r_delta}")
        if not (self.r_phi >= 0 and math.isfinite(self.r_phi)):
            raise DomainError(f"r_phi must be >= 0 and finite, got {self.r_phi}")
        raw = (self.alpha0, self.alpha1, self.sigma2_phi, self.sigma2_delta)
        if any(v is not None for v in raw):
            if any(v is None for v in raw):
                raise DomainError("raw parameters must be given together: alpha0, alpha1, sigma2_phi, sigma2_delta")
            if self.alpha1 == 0:
                raise DomainError("alpha1 must be nonzero")
            r_delta = self.sigma2_delta / self.sigma2_eps
            r_phi = self.sigma2_phi / (self.alpha1**2 * self.sigma2_eps)
            if not math.isclose(r_delta, self.r_delta, rel_tol=_RAW_CONSISTENCY_RTOL, abs_tol=1e-15):
                raise DomainError(
                    f"r_delta={self.r_delta} inconsistent with sigma2_delta/sigma2_eps={r_delta!r}")
            if not math.isclose(r_phi, self.r_phi, rel_tol=_RAW_CONSISTENCY_RTOL, abs_tol=1e-15):
                raise DomainError(
                    f"r_phi={self.r_phi} inconsistent with sigma2_phi/(alpha1^2 sigma2_eps)={r_phi!r}")

    @classmethod
    def from_raw(cls, alpha0: float, alpha1: float, sigma2_eps: float,
                 sigma2_phi: float, sigma2_delta: float) -> "ModelParams":
        """Build params from raw model values, deriving the ratios."""
        if alpha1 == 0:
            raise DomainError("alpha1 must be nonzero")
        if sigma2_eps <= 0:
            raise DomainError("sigma2_eps must be positive")
        return cls(
            sigma2_eps=sigma2_eps,
            r_delta=sigma2_delta / sigma2_eps,
            r_phi=sigma2_phi / (alpha1**2 * sigma2_eps),
            alpha0=alpha0, alpha1=alpha1,
            sigma2_phi=sigma2_phi, sigma2_delta=sigma2_delta,
        )

    @property
    def has_raw(self) -> bool:
        return self.alpha1 is not None

    def with_multiplier(self, field: str, multiplier: float) -> "ModelParams":
        """Return ratio-only params with one field scaled (raw values dropped,
        since scaling a single input breaks raw/ratio consistency)."""
        if field not in ("sigma2_eps", "r_delta", "r_phi"):
            raise DomainError(f"unknown parameter axis {field!r}")
        if multiplier <= 0:
            raise DomainError("multiplier must be positive")
        values = dict(sigma2_eps=self.sigma2_eps, r_delta=self.r_delta, r_phi=self.r_phi)
        values[field] = values[field] * multiplier
        return ModelParams(**values)


@dataclass(frozen=True)
class CostModel:
    """Study cost structure: per-participant cost (recruitment plus the
    indirect measurement), per-direct-measurement cost, and total budget."""

    c_q: float
    c_b: float
    c_total: float

    def __post_init__(self):
        if not (self.c_q > 0 and math.isfinite(self.c_q)):
            raise DomainError(f"c_q must be positive, got {self.c_q}")
        if not (self.c_b > 0 and math.isfinite(self.c_b)):
            raise DomainError(f"c_b must be positive, got {self.c_b}")
        if not (self.c_total >= self.c_q and math.isfinite(self.c_total)):
            raise DomainError(f"c_total must be at least c_q, got {self.c_total}")

    @property
    def r_cb(self) -> float:
        """Cost of one direct measurement relative to one participant."""
        return self.c_b / self.c_q

    @property
    def r_c(self) -> float:
        """Budget in participant-cost units (sample size if indirect-only)."""
        return self.c_total / self.c_q


MIN_CALIBRATION = 4  # the variance formula needs n - 3 > 0


@dataclass(frozen=True)
class Design:
    """Integer design for one group: N participants, n of them with K
    replicate direct measurements each."""

    n_total: int
    n_direct: int
    k_reps: int

    def __post_init__(self):
        if self.k_reps < 1:
            raise DomainError(f"k_reps must be >= 1, got {self.k_reps}")
        if self.n_direct < MIN_CALIBRATION:
            raise DomainError(
                f"calibration subsample too small: n_direct={self.n_direct} < {MIN_CALIBRATION}")
        if self.n_direct > self.n_total:
            raise ConstraintError(
                f"n_direct={self.n_direct} exceeds n_total={self.n_total}")
        if self.n_direct < 10:
            warnings.warn(
                f"n_direct={self.n_direct} < 10: normal-approximation SEs are fragile",
                SmallSubsampleWarning, stacklevel=2)

    def cost(self, costs: CostModel) -> float:
        return self.n_direct * self.k_reps * costs.c_b + self.n_total * costs.c_q

    @property
    def sampling_fraction(self) -> float:
        return self.n_direct / self.n_total


@dataclass(frozen=True)
class TwoGroupDesign:
    """Designs for both groups plus the budget fraction given to group 1."""

    group1: Design
    group2: Design
    allocation: float

    def __post_init__(self):
        if not (0.0 < self.allocation < 1.0):
            raise DomainError(f"allocation must be in (0, 1), got {self.allocation}")

    def cost(self, costs: CostModel) -> float:
        return self.group1.cost(costs) + self.group2.cost(costs)


@dataclass(frozen=True)
class PowerSpec:
    """Hypothesis-test target: two-sided level alpha, power, effect size."""

    alpha: float
    power: float
    delta: float
    mu0: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (0.0 < self.power < 1.0):
            raise DomainError(f"power must be in (0, 1), got {self.power}")
        # delta == 0 is allowed so the type-I error rate can be evaluated;
        # se_target rejects it.
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be >= 0 and finite, got {self.delta}")
