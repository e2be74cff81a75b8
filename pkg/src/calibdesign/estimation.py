"""Pilot-data ingestion and parameter estimation.

A pilot dataset holds, per group, the indirect measurement Q for every
subject and replicate direct measurements M for the calibration subsample.
``mle_mean`` implements the closed-form MLE of the group mean built from
the regression of per-subject direct-measure means on Q. Design inputs
(sigma2_eps, r_delta, r_phi and the raw regression parameters) come from
moment estimators over the calibration subsample.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .formulas import mean_estimator_variance
from .types import (
    MIN_CALIBRATION,
    DegenerateDataError,
    Design,
    DomainError,
    InsufficientDataError,
    ModelParams,
    TruncatedVarianceWarning,
)

__all__ = [
    "GroupData",
    "PilotDataset",
    "MuEstimate",
    "ParamEstimates",
    "mle_mean",
    "estimate_model_params",
    "read_pilot_csv",
    "write_pilot_csv",
]

_VAR_FLOOR_FACTOR = 1e-8  # truncation floor for negative variance estimates


@dataclass
class GroupData:
    """One group's records: Q for all subjects, replicate matrix padded
    with NaN. Subjects with at least one replicate form the calibration
    subsample."""

    group_id: int
    subject_ids: list[str]
    q: np.ndarray            # shape (N,)
    replicates: np.ndarray   # shape (N, K_max), NaN where missing

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.replicates = np.asarray(self.replicates, dtype=float)
        if self.replicates.ndim == 1:
            self.replicates = self.replicates.reshape(-1, 1)
        if len(self.subject_ids) != self.q.size or self.q.size != self.replicates.shape[0]:
            raise DomainError("subject_ids, q and replicates must have matching length")
        if len(set(self.subject_ids)) != len(self.subject_ids):
            raise DomainError(f"duplicate subject ids in group {self.group_id}")
        if not np.all(np.isfinite(self.q)):
            raise DomainError(f"all subjects need a finite indirect measurement (group {self.group_id})")

    @property
    def n_total(self) -> int:
        return self.q.size

    @property
    def calibration_mask(self) -> np.ndarray:
        return np.isfinite(self.replicates).any(axis=1)

    @property
    def n_direct(self) -> int:
        return int(self.calibration_mask.sum())

    @property
    def k_reps(self) -> int:
        """Largest replicate count observed in the calibration subsample."""
        counts = np.isfinite(self.replicates).sum(axis=1)
        return int(counts.max()) if counts.size else 0

    def replicate_counts(self) -> np.ndarray:
        return np.isfinite(self.replicates).sum(axis=1)[self.calibration_mask]

    def replicate_means(self) -> np.ndarray:
        """Per-subject mean of available replicates, calibration rows only."""
        rows = self.replicates[self.calibration_mask]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return np.nanmean(rows, axis=1)


@dataclass
class PilotDataset:
    """Subject-level pilot records, organized by group (1 and/or 2)."""

    groups: dict[int, GroupData] = field(default_factory=dict)

    def group(self, group_id: int) -> GroupData:
        if group_id not in self.groups:
            raise DomainError(f"no data for group {group_id}; groups present: {sorted(self.groups)}")
        return self.groups[group_id]

    def group_ids(self) -> list[int]:
        return sorted(self.groups)


@dataclass(frozen=True)
class MuEstimate:
    """MLE of the group mean with its regression components."""

    mu_hat: float
    beta0_hat: float
    beta1_hat: float
    nu_hat: float
    n_total: int
    n_direct: int


@dataclass
class ParamEstimates:
    """Moment-based design inputs plus the mean MLE for one group.

    Standard-error slots are optional; only the mean's plug-in SE is
    filled. ``notes`` records truncation events.
    """

    group_id: int
    alpha0: float
    alpha1: float
    sigma2_eps: float
    sigma2_phi: float
    sigma2_delta: float
    r_delta: float
    r_phi: float
    mu_hat: float
    nu_hat: float
    beta0_hat: float
    beta1_hat: float
    n_total: int
    n_direct: int
    k_reps: int
    se_mu: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_model_params(self) -> ModelParams:
        return ModelParams(sigma2_eps=self.sigma2_eps, r_delta=self.r_delta, r_phi=self.r_phi)

    def to_dict(self) -> dict:
        return {
            "group": self.group_id,
            "alpha0": self.alpha0, "alpha1": self.alpha1,
            "sigma2_eps": self.sigma2_eps, "sigma2_phi": self.sigma2_phi,
            "sigma2_delta": self.sigma2_delta,
            "r_delta": self.r_delta, "r_phi": self.r_phi,
            "mu_hat": self.mu_hat, "nu_hat": self.nu_hat,
            "beta0_hat": self.beta0_hat, "beta1_hat": self.beta1_hat,
            "n_total": self.n_total, "n_direct": self.n_direct, "k_reps": self.k_reps,
            "se_mu": self.se_mu, "notes": list(self.notes),
        }


def _calibration_arrays(data: GroupData):
    mask = data.calibration_mask
    n = int(mask.sum())
    if n < MIN_CALIBRATION:
        raise InsufficientDataError(
            f"group {data.group_id}: {n} calibration subjects, need at least {MIN_CALIBRATION}")
    q_cal = data.q[mask]
    m_bar = data.replicate_means()
    return q_cal, m_bar


def mle_mean(data: PilotDataset, group: int = 1) -> MuEstimate:
    """MLE of the group mean.

    The slope of per-subject direct-measure means on Q over the calibration
    subsample corrects the full-sample mean of Q:
        mu_hat = mean(M_bar) + beta1 * (mean_N(Q) - mean_n(Q)).
    With n = N this reduces to the plain mean of the direct measurements.
    """
    g = data.group(group)
    q_cal, m_bar = _calibration_arrays(g)
    n = q_cal.size
    q_bar_n = q_cal.mean()
    ss_q = float(((q_cal - q_bar_n) ** 2).sum())
    if ss_q <= 0.0:
        raise DegenerateDataError(
            f"group {group}: indirect measurement has zero variance over the calibration subsample")
    beta1 = (float(m_bar @ q_cal) - n * m_bar.mean() * q_bar_n) / ss_q
    beta0 = float(m_bar.mean() - beta1 * q_bar_n)
    nu_hat = float(g.q.mean())
    return MuEstimate(
        mu_hat=beta0 + beta1 * nu_hat,
        beta0_hat=beta0,
        beta1_hat=float(beta1),
        nu_hat=nu_hat,
        n_total=g.n_total,
        n_direct=n,
    )


def estimate_model_params(data: PilotDataset, group: int = 1) -> ParamEstimates:
    """Moment estimates of the design inputs for one group.

    Requires replicated direct measurements (K >= 2) with an equal count
    for every calibration subject. Second moments use the calibration
    subsample with ddof=1; the within-subject replicate variance is pooled
    over subjects. Negative variance estimates are truncated (loudly) at
    a small positive floor and the ratios recomputed.
    """
    g = data.group(group)
    q_cal, m_bar = _calibration_arrays(g)
    counts = g.replicate_counts()
    k = int(counts.max())
    if k < 2:
        raise DegenerateDataError(
            f"group {group}: sigma2_delta is not identifiable from single direct "
            "measurements (K=1); supply r_delta externally")
    if not np.all(counts == k):
        raise DegenerateDataError(
            f"group {group}: unequal replicate counts ({sorted(set(counts.tolist()))}); "
            "estimation requires the same K for every calibration subject")
    rows = g.replicates[g.calibration_mask][:, :k]
    n = q_cal.size

    notes: list[str] = []
    sigma2_delta = float(rows.var(axis=1, ddof=1).mean())
    var_m_bar = float(m_bar.var(ddof=1))
    if var_m_bar <= 0.0:
        raise DegenerateDataError(f"group {group}: direct-measure means have zero variance")
    floor = _VAR_FLOOR_FACTOR * var_m_bar

    sigma2_eps = var_m_bar - sigma2_delta / k
    if sigma2_eps < floor:
        msg = (f"group {group}: sigma2_eps estimate {sigma2_eps:.3e} below floor; "
               f"truncated to {floor:.3e}")
        warnings.warn(msg, TruncatedVarianceWarning, stacklevel=2)
        notes.append(msg)
        sigma2_eps = floor

    q_bar = q_cal.mean()
    cov_qm = float(((q_cal - q_bar) * (m_bar - m_bar.mean())).sum() / (n - 1))
    alpha1 = cov_qm / sigma2_eps
    if alpha1 == 0.0:
        raise DegenerateDataError(
            f"group {group}: indirect measurement is uncorrelated with the direct one")
    var_q = float(q_cal.var(ddof=1))
    sigma2_phi = var_q - alpha1**2 * sigma2_eps
    if sigma2_phi < floor:
        msg = (f"group {group}: sigma2_phi estimate {sigma2_phi:.3e} below floor; "
               f"truncated to {floor:.3e}")
        warnings.warn(msg, TruncatedVarianceWarning, stacklevel=2)
        notes.append(msg)
        sigma2_phi = floor
    alpha0 = float(q_bar - alpha1 * m_bar.mean())

    mu = mle_mean(data, group)
    est = ParamEstimates(
        group_id=group,
        alpha0=alpha0, alpha1=float(alpha1),
        sigma2_eps=float(sigma2_eps), sigma2_phi=float(sigma2_phi),
        sigma2_delta=sigma2_delta,
        r_delta=sigma2_delta / sigma2_eps,
        r_phi=sigma2_phi / (alpha1**2 * sigma2_eps),
        mu_hat=mu.mu_hat, nu_hat=mu.nu_hat,
        beta0_hat=mu.beta0_hat, beta1_hat=mu.beta1_hat,
        n_total=g.n_total, n_direct=mu.n_direct, k_reps=k,
        notes=notes,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # observed design, not a recommendation
        observed = Design(n_total=g.n_total, n_direct=mu.n_direct, k_reps=k)
    est.se_mu = math.sqrt(mean_estimator_variance(est.to_model_params(), observed))
    return est


# ---------------------------------------------------------------------------
# CSV schema: header  subject_id,group,q,m1,...,mK  with empty cells for
# missing replicates. Long layout, one row per subject.
# ---------------------------------------------------------------------------

def _parse_rows(rows: list[dict], origin: str) -> PilotDataset:
    by_group: dict[int, list] = {}
    seen_ids: set[str] = set()
    for idx, row in enumerate(rows, start=2):  # header is line 1
        sid = (row.get("subject_id") or "").strip()
        if not sid:
            raise DomainError(f"{origin}: line {idx}: missing subject_id")
        if sid in seen_ids:
            raise DomainError(f"{origin}: line {idx}: duplicate subject_id {sid!r}")
        seen_ids.add(sid)
        try:
            group = int(row["group"])
        except (KeyError, ValueError):
            raise DomainError(f"{origin}: line {idx}: bad or missing group")
        if group not in (1, 2):
            raise DomainError(f"{origin}: line {idx}: group must be 1 or 2, got {group}")
        try:
            q = float(row["q"])
        except (KeyError, ValueError, TypeError):
            raise DomainError(f"{origin}: line {idx}: bad or missing q")
        reps = []
        for key in row["_m_keys"]:
            cell = (row.get(key) or "").strip()
            try:
                reps.append(float(cell) if cell else math.nan)
            except ValueError:
                raise DomainError(f"{origin}: line {idx}: bad replicate value {cell!r} in {key}")
        by_group.setdefault(group, []).append((sid, q, reps))

    groups = {}
    for gid, items in by_group.items():
        ids = [str(x[0]) for x in items]
        q = np.array([x[1] for x in items], dtype=float)
        k_max = max((len(x[2]) for x in items), default=0) or 1
        m = np.full((len(items), k_max), math.nan)
        for i, (_, _, reps) in enumerate(items):
            m[i, :len(reps)] = reps
        groups[gid] = GroupData(group_id=gid, subject_ids=ids, q=q, replicates=m)
    return PilotDataset(groups=groups)


def read_pilot_csv(source, delimiter: str = ",") -> PilotDataset:
    """Read a pilot dataset from a path, file object, or CSV text."""
    if isinstance(source, str) and "\n" in source:
        handle = io.StringIO(source)
        origin = "<inline>"
        close = False
    elif hasattr(source, "read"):
        handle, origin, close = source, "<stream>", False
    else:
        handle = open(source, newline="")
        origin, close = str(source), True
    try:
        reader = csv.reader(handle, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DomainError(f"{origin}: empty file (header row is mandatory)")
        header = [h.strip() for h in header]
        required = ["subject_id", "group", "q"]
        if header[:3] != required:
            raise DomainError(
                f"{origin}: header must start with {','.join(required)}, got {','.join(header[:3])}")
        m_keys = header[3:]
        expected = [f"m{i}" for i in range(1, len(m_keys) + 1)]
        if m_keys != expected:
            raise DomainError(
                f"{origin}: replicate columns must be m1..m{len(m_keys)}, got {','.join(m_keys)}")
        rows = []
        for raw in reader:
            if not raw or all(not c.strip() for c in raw):
                continue
            row = dict(zip(header, raw))
            row["_m_keys"] = m_keys
            rows.append(row)
        if not rows:
            raise DomainError(f"{origin}: no data rows")
        return _parse_rows(rows, origin)
    finally:
        if close:
            handle.close()


def write_pilot_csv(data: PilotDataset, target, delimiter: str = ",") -> None:
    """Write a pilot dataset in the canonical CSV layout."""
    k_max = max((g.replicates.shape[1] for g in data.groups.values()), default=1)
    header = ["subject_id", "group", "q"] + [f"m{i}" for i in range(1, k_max + 1)]

    def fmt(x: float) -> str:
        return "" if not math.isfinite(x) else repr(float(x))

    own = not hasattr(target, "write")
    handle = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow(header)
        for gid in data.group_ids():
            g = data.groups[gid]
            for i, sid in enumerate(g.subject_ids):
                reps = [fmt(v) for v in g.replicates[i]]
                reps += [""] * (k_max - len(reps))
                writer.writerow([sid, gid, repr(float(g.q[i]))] + reps)
    finally:
        if own:
            handle.close()
