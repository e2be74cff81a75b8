"""Result-to-record converters shared by the CLI and the HTTP API, so both
surfaces emit byte-identical machine-readable payloads for the same inputs."""

from __future__ import annotations

from dataclasses import asdict

from .estimation import ParamEstimates
from .optimizer import BudgetSearchResult, DesignReport
from .types import Design, TwoGroupDesign

SCHEMA_VERSION = "1"


def design_to_dict(design: Design) -> dict:
    return {
        "n_total": design.n_total,
        "n_direct": design.n_direct,
        "k_reps": design.k_reps,
    }


def report_to_dict(report: DesignReport) -> dict:
    groups = []
    for i, d in enumerate(report.group_designs):
        entry = design_to_dict(d)
        entry["variance"] = report.variances[i]
        entry["se"] = report.variances[i] ** 0.5
        entry["sampling_fraction"] = d.sampling_fraction
        entry["sampling_fraction_reported"] = report.sampling_fractions_reported[i]
        groups.append(entry)
    out = {
        "groups": groups,
        "achieved_variance": report.achieved_variance,
        "achieved_se": report.achieved_se,
        "spent_budget": report.spent_budget,
        "slack_budget": report.slack_budget,
    }
    if isinstance(report.design, TwoGroupDesign):
        out["allocation"] = report.allocation
    return out


def budget_result_to_dict(result: BudgetSearchResult) -> dict:
    return {
        "budget": result.budget,
        "se_target": result.se_target,
        "corrections": result.corrections,
        "converged_by": result.converged_by,
        "iterations": [
            {"index": it.index, "phase": it.phase, "budget": it.budget, "se": it.se}
            for it in result.trace
        ],
        "report": report_to_dict(result.report),
    }


def estimates_to_dict(estimates: list[ParamEstimates]) -> dict:
    return {"groups": [e.to_dict() for e in estimates]}


def rows_to_dicts(rows) -> list[dict]:
    return [asdict(r) for r in rows]


def envelope(result: dict, echo: dict, warnings_list: list[str] | None = None) -> dict:
    """Self-describing response wrapper used by the API and CLI JSON output."""
    return {
        "schema_version": SCHEMA_VERSION,
        "echo": echo,
        "warnings": warnings_list or [],
        "result": result,
    }
