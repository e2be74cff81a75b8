"""Command-line interface.

Configuration is an INI file with group-scoped sections; command-line
overrides win over file values. Unknown sections or keys are rejected.
Every number the text report prints is also available in the JSON/CSV
artifacts written to --out.

Exit codes: 0 success, 1 domain/constraint errors, 2 usage errors.
"""

from __future__ import annotations

import configparser
import csv as _csv
import io
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import click

from . import __version__
from .estimation import estimate_model_params, read_pilot_csv
from .fixtures import CASE_STUDIES
from .formulas import mean_estimator_variance, power_from_se, se_target
from .optimizer import (
    OptimizerConfig,
    minimize_budget,
    optimize_single_group,
    optimize_two_groups,
)
from .serialize import (
    budget_result_to_dict,
    envelope,
    estimates_to_dict,
    report_to_dict,
    rows_to_dicts,
)
from .simulation import (
    SimSpec,
    TwoGroupSimSpec,
    monte_carlo_power,
    monte_carlo_se,
    simulate_dataset,
)
from .sweeps import se_surface, sensitivity_scan, threshold_scan
from .types import (
    CalibDesignError,
    ConstraintError,
    CostModel,
    Design,
    DomainError,
    ModelParams,
    PowerSpec,
)

_GROUP_KEYS = {"sigma2_eps", "r_delta", "r_phi", "alpha0", "alpha1", "sigma2_phi", "sigma2_delta"}
_SECTION_KEYS: dict[str, set[str]] = {
    "group1": _GROUP_KEYS,
    "group2": _GROUP_KEYS,
    "costs": {"c_q", "c_b", "c_total"},
    "power": {"alpha", "power", "delta", "mu0"},
    "optimizer": {"k_max_extra", "allocation_grid", "tie_tolerance",
                  "budget_tolerance", "max_iterations", "fraction_report_epsilon"},
    "design": {"se", "n1", "n_total1", "k1", "n2", "n_total2", "k2"},
    "simulation": {"mode", "mu", "mu2", "n_total", "n_direct", "k_reps",
                   "n_total2", "n_direct2", "k_reps2", "replications", "seed"},
    "sweep": {"kind", "n_values", "k_values", "r_delta_values", "n_total", "r_phi",
              "r_cb_values", "c_total", "c_q", "include_fraction", "sigma2_eps"},
    "sensitivity": {"axis", "multipliers"},
}
_INT_KEYS = {"k_max_extra", "max_iterations", "n_total", "n_direct", "k_reps",
             "n_total2", "n_direct2", "k_reps2", "replications", "seed",
             "n1", "n_total1", "k1", "n2", "k2"}
_STR_KEYS = {"mode", "kind", "axis"}
_BOOL_KEYS = {"include_fraction"}
_LIST_KEYS = {"n_values", "k_values", "r_delta_values", "r_cb_values", "multipliers"}


class Config:
    """Validated, typed view over the merged INI sections."""

    def __init__(self):
        self.data: dict[str, dict[str, object]] = {}

    def merge_ini(self, text: str, origin: str) -> None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=origin)
        except configparser.Error as exc:
            raise click.UsageError(f"{origin}: {exc}")
        for section in parser.sections():
            if section not in _SECTION_KEYS:
                raise click.UsageError(
                    f"{origin}: unknown section [{section}] "
                    f"(known: {', '.join(sorted(_SECTION_KEYS))})")
            for key, raw in parser.items(section):
                self.set_value(section, key, raw, origin)

    def set_value(self, section: str, key: str, raw: str, origin: str) -> None:
        if section not in _SECTION_KEYS:
            raise click.UsageError(f"{origin}: unknown section [{section}]")
        if key not in _SECTION_KEYS[section]:
            raise click.UsageError(
                f"{origin}: unknown field {section}.{key} "
                f"(known: {', '.join(sorted(_SECTION_KEYS[section]))})")
        try:
            if key in _STR_KEYS:
                value: object = raw.strip()
            elif key in _BOOL_KEYS:
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key in _LIST_KEYS:
                value = _parse_list(raw)
            elif key in _INT_KEYS:
                value = int(raw)
            else:
                value = float(raw)
        except ValueError:
            raise click.UsageError(f"{origin}: bad value for {section}.{key}: {raw!r}")
        self.data.setdefault(section, {})[key] = value

    def section(self, name: str) -> dict:
        return self.data.get(name, {})

    def require(self, section: str, keys: tuple[str, ...], mode: str) -> dict:
        got = self.section(section)
        missing = [k for k in keys if k not in got]
        if missing:
            raise click.UsageError(
                f"mode {mode!r} needs [{section}] with field(s): {', '.join(missing)}")
        return got


def _parse_list(raw: str) -> list[float]:
    """Comma list ('1,2,5') or inclusive range ('10:200' or '10:200:5')."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(raw)
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 1.0
        out, x = [], start
        while x <= stop + 1e-9:
            out.append(round(x, 12))
            x += step
        return out
    return [float(x) for x in raw.split(",") if x.strip()]


def _group_params(cfg: Config, section: str, mode: str, need_raw: bool = False) -> ModelParams:
    got = cfg.require(section, ("sigma2_eps",), mode)
    raw_keys = ("alpha0", "alpha1", "sigma2_phi", "sigma2_delta")
    if need_raw:
        missing = [k for k in raw_keys if k not in got]
        if missing:
            raise click.UsageError(
                f"mode {mode!r} needs raw parameters in [{section}]: missing {', '.join(missing)}")
        return ModelParams.from_raw(
            alpha0=got["alpha0"], alpha1=got["alpha1"], sigma2_eps=got["sigma2_eps"],
            sigma2_phi=got["sigma2_phi"], sigma2_delta=got["sigma2_delta"])
    if any(k in got for k in raw_keys):
        missing = [k for k in raw_keys if k not in got]
        if missing:
            raise click.UsageError(
                f"[{section}]: raw parameters must be given together; missing {', '.join(missing)}")
        return ModelParams.from_raw(
            alpha0=got["alpha0"], alpha1=got["alpha1"], sigma2_eps=got["sigma2_eps"],
            sigma2_phi=got["sigma2_phi"], sigma2_delta=got["sigma2_delta"])
    cfg.require(section, ("sigma2_eps", "r_delta", "r_phi"), mode)
    return ModelParams(sigma2_eps=got["sigma2_eps"], r_delta=got["r_delta"], r_phi=got["r_phi"])


def _cost_model(cfg: Config, mode: str, need_total: bool = True) -> CostModel:
    keys = ("c_q", "c_b", "c_total") if need_total else ("c_q", "c_b")
    got = cfg.require("costs", keys, mode)
    total = got.get("c_total", got["c_q"])  # placeholder when unused
    return CostModel(c_q=got["c_q"], c_b=got["c_b"], c_total=total)


def _power_spec(cfg: Config, mode: str, need_power: bool = True) -> PowerSpec:
    keys = ("alpha", "power", "delta") if need_power else ("alpha", "delta")
    got = cfg.require("power", keys, mode)
    return PowerSpec(alpha=got["alpha"], power=got.get("power", 0.8),
                     delta=got["delta"], mu0=got.get("mu0", 0.0))


def _optimizer_config(cfg: Config) -> OptimizerConfig:
    return OptimizerConfig(**cfg.section("optimizer"))


def _load_config(config_path: str | None, fixture: str | None,
                 sets: tuple[str, ...]) -> Config:
    cfg = Config()
    if fixture:
        if fixture not in CASE_STUDIES:
            raise click.UsageError(
                f"unknown fixture {fixture!r} (available: {', '.join(sorted(CASE_STUDIES))})")
        text = resources.files("calibdesign").joinpath(f"fixtures/{fixture}.ini").read_text()
        cfg.merge_ini(text, f"fixture:{fixture}")
    if config_path:
        cfg.merge_ini(Path(config_path).read_text(), config_path)
    for item in sets:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise click.UsageError(f"--set needs section.key=value, got {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        cfg.set_value(section.strip(), key.strip(), value, "--set")
    return cfg


def _emit(payload: dict, fmt: str, out_dir: str | None, mode: str,
          text_renderer, csv_rows=None) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    elif fmt == "csv":
        click.echo(_rows_as_csv(csv_rows if csv_rows is not None else _flatten(payload["result"])))
    else:
        text_renderer(payload)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{mode}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        rows = csv_rows if csv_rows is not None else _flatten(payload["result"])
        (out / f"{mode}.csv").write_text(_rows_as_csv(rows) + "\n")


def _flatten(result: dict, prefix: str = "") -> list[dict]:
    rows = []

    def walk(node, path):
        if isinstance(node, dict):
            for k, v in sorted(node.items()):
                walk(v, f"{path}.{k}" if path else k)
        elif isinstance(node, (list, tuple)):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")
        else:
            rows.append({"field": path, "value": node})

    walk(result, prefix)
    return rows


def _rows_as_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = _csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _dump_replicates(out_dir: str | None, column: str,
                     values: tuple[float, ...] | None) -> None:
    """Per-replicate dump next to the other --out artifacts."""
    if not out_dir or values is None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["replicate," + column]
    lines += [f"{i},{v!r}" for i, v in enumerate(values)]
    (out / "simulate_replicates.csv").write_text("\n".join(lines) + "\n")


def _render_report(payload: dict) -> None:
    result = payload["result"]
    for i, g in enumerate(result["groups"], start=1):
        click.echo(
            f"group {i}: N={g['n_total']} n={g['n_direct']} K={g['k_reps']}  "
            f"se={g['se']:.6g}  fraction={g['sampling_fraction_reported']:.4g}")
    if "allocation" in result:
        click.echo(f"allocation to group 1: {result['allocation']:.4g}")
    click.echo(f"combined se: {result['achieved_se']:.6g}")
    click.echo(f"budget spent {result['spent_budget']:,.0f}, slack {result['slack_budget']:,.0f}")
    for w in payload.get("warnings", []):
        click.echo(f"warning: {w}", err=True)


def _catch_domain_errors(fn):
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConstraintError as exc:
            hint = ""
            if exc.min_feasible_budget is not None:
                hint = f" (minimal feasible budget: {exc.min_feasible_budget:g})"
            click.echo(f"error: {exc}{hint}", err=True)
            sys.exit(1)
        except CalibDesignError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


_COMMON = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="INI configuration file."),
    click.option("--fixture", type=str, default=None,
                 help="Load a bundled case-study config (hovell, wilson, tone)."),
    click.option("--set", "sets", multiple=True, metavar="SECTION.KEY=VALUE",
                 help="Override one config value (repeatable; wins over files)."),
    click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
                 help="Directory for machine-readable artifacts."),
    click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]),
                 default="text", show_default=True),
    click.option("--seed", type=int, default=None, help="Override simulation seed."),
    click.option("--threads", type=int, default=1, show_default=True,
                 help="Worker cap for parallel simulation."),
]


def _common(fn):
    for opt in reversed(_COMMON):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="calibdesign")
def main():
    """Plan exposure studies that combine direct and indirect measurements."""


@main.command()
@_common
@click.option("--budget", type=float, default=None, help="Override costs.c_total.")
@_catch_domain_errors
def design(config_path, fixture, sets, out_dir, fmt, seed, threads, budget):
    """Optimal (N, n, K) design, two-group when [group2] is present."""
    cfg = _load_config(config_path, fixture, sets)
    if budget is not None:
        cfg.set_value("costs", "c_total", repr(budget), "--budget")
    cost = _cost_model(cfg, "design")
    params1 = _group_params(cfg, "group1", "design")
    opt = _optimizer_config(cfg)
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as wrec:
        warnings.simplefilter("always")
        if "group2" in cfg.data:
            params2 = _group_params(cfg, "group2", "design")
            report = optimize_two_groups(params1, params2, cost, opt)
        else:
            report = optimize_single_group(params1, cost, opt)
        caught = [str(w.message) for w in wrec]
    payload = envelope(report_to_dict(report),
                       echo={"mode": "design", "costs": cfg.section("costs")},
                       warnings_list=caught)
    _emit(payload, fmt, out_dir, "design", _render_report)


@main.command()
@_common
@_catch_domain_errors
def budget(config_path, fixture, sets, out_dir, fmt, seed, threads):
    """Minimum budget meeting the power target, with the iteration trace."""
    cfg = _load_config(config_path, fixture, sets)
    cost = _cost_model(cfg, "budget", need_total=False)
    params1 = _group_params(cfg, "group1", "budget")
    params2 = _group_params(cfg, "group2", "budget")
    spec = _power_spec(cfg, "budget")
    result = minimize_budget(params1, params2, cost.c_q, cost.c_b, spec,
                             _optimizer_config(cfg))

    def render(payload):
        # currency is reported in whole units; exact values stay in the
        # machine-readable artifacts
        r = payload["result"]
        click.echo(f"se target: {r['se_target']:.6g}")
        for it in r["iterations"]:
            se_txt = f"{it['se']:.6g}" if it["se"] is not None else "infeasible"
            click.echo(f"  [{it['phase']:10s}] budget={it['budget']:,.0f} se={se_txt}")
        click.echo(f"corrections: {r['corrections']} (then {r['converged_by']})")
        click.echo(f"minimum budget: {r['budget']:,.0f}")
        _render_report({"result": r["report"], "warnings": payload["warnings"]})

    payload = envelope(budget_result_to_dict(result),
                       echo={"mode": "budget", "power": cfg.section("power")})
    _emit(payload, fmt, out_dir, "budget", render)


@main.command("power")
@_common
@_catch_domain_errors
def power_cmd(config_path, fixture, sets, out_dir, fmt, seed, threads):
    """Power for a given SE ([design] se=...) or a given design."""
    cfg = _load_config(config_path, fixture, sets)
    spec = _power_spec(cfg, "power", need_power=False)
    dsec = cfg.require("design", (), "power")
    if "se" in dsec:
        se_value = dsec["se"]
        detail = {"se": se_value}
    else:
        needed = ("n1", "n_total1", "k1", "n2", "n_total2", "k2")
        cfg.require("design", needed, "power")
        params1 = _group_params(cfg, "group1", "power")
        params2 = _group_params(cfg, "group2", "power")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d1 = Design(n_total=dsec["n_total1"], n_direct=dsec["n1"], k_reps=dsec["k1"])
            d2 = Design(n_total=dsec["n_total2"], n_direct=dsec["n2"], k_reps=dsec["k2"])
        v = mean_estimator_variance(params1, d1) + mean_estimator_variance(params2, d2)
        se_value = v ** 0.5
        detail = {"se": se_value, "variance": v}
    achieved = power_from_se(se_value, spec)
    result = {**detail, "power": achieved, "alpha": spec.alpha, "delta": spec.delta}
    if spec.power:
        result["se_target"] = se_target(spec)

    def render(payload):
        r = payload["result"]
        click.echo(f"se: {r['se']:.6g}")
        click.echo(f"power at delta={r['delta']:g}, alpha={r['alpha']:g}: {r['power']:.4f}")
        if "se_target" in r:
            click.echo(f"se target for power {spec.power:g}: {r['se_target']:.6g}")

    payload = envelope(result, echo={"mode": "power", "power": cfg.section("power")})
    _emit(payload, fmt, out_dir, "power", render)


@main.command()
@_common
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Pilot CSV (subject_id,group,q,m1,...).")
@_catch_domain_errors
def estimate(config_path, fixture, sets, out_dir, fmt, seed, threads, input_path):
    """Estimate design inputs from a pilot dataset."""
    data = read_pilot_csv(input_path)
    estimates = []
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as wrec:
        warnings.simplefilter("always")
        for gid in data.group_ids():
            estimates.append(estimate_model_params(data, gid))
        caught = [str(w.message) for w in wrec]

    def render(payload):
        for g in payload["result"]["groups"]:
            click.echo(f"group {g['group']} (N={g['n_total']}, n={g['n_direct']}, K={g['k_reps']}):")
            for key in ("mu_hat", "sigma2_eps", "sigma2_delta", "sigma2_phi",
                        "alpha0", "alpha1", "r_delta", "r_phi", "se_mu"):
                click.echo(f"  {key} = {g[key]:.6g}")
        for w in payload.get("warnings", []):
            click.echo(f"warning: {w}", err=True)

    rows = [e.to_dict() for e in estimates]
    for row in rows:
        row["notes"] = "; ".join(row["notes"])
    payload = envelope(estimates_to_dict(estimates),
                       echo={"mode": "estimate", "input": str(input_path)},
                       warnings_list=caught)
    _emit(payload, fmt, out_dir, "estimate", render, csv_rows=rows)


@main.command()
@_common
@_catch_domain_errors
def simulate(config_path, fixture, sets, out_dir, fmt, seed, threads):
    """Monte Carlo validation: empirical SE (mode=se) or rejection rate
    (mode=power). Requires raw parameters in the group sections."""
    cfg = _load_config(config_path, fixture, sets)
    sim = cfg.require("simulation", ("replications", "n_total", "n_direct", "k_reps"),
                      "simulate")
    if seed is not None:
        cfg.set_value("simulation", "seed", str(seed), "--seed")
        sim = cfg.section("simulation")
    sim_seed = sim.get("seed", 0)
    mode = sim.get("mode", "se")
    params1 = _group_params(cfg, "group1", "simulate", need_raw=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d1 = Design(n_total=sim["n_total"], n_direct=sim["n_direct"],
                    k_reps=sim["k_reps"])

    if mode == "se":
        spec = SimSpec(params=params1, design=d1, mu=sim.get("mu", 0.0),
                       replications=sim["replications"], seed=sim_seed)
        mc = monte_carlo_se(spec, workers=threads, collect_values=bool(out_dir))
        result = {
            "empirical_se": mc.empirical_se, "mc_error": mc.mc_error,
            "closed_form_se": mc.closed_form_se, "mean_estimate": mc.mean_estimate,
            "replications": mc.replications, "n_failed": mc.n_failed,
        }
        _dump_replicates(out_dir, "mu_hat", mc.values)

        def render(payload):
            r = payload["result"]
            click.echo(f"empirical se: {r['empirical_se']:.6g} (mc error {r['mc_error']:.2g})")
            click.echo(f"closed-form se: {r['closed_form_se']:.6g}")
            click.echo(f"replications: {r['replications']} (failed: {r['n_failed']})")

    elif mode == "power":
        sim = cfg.require("simulation", ("n_total2", "n_direct2", "k_reps2"), "simulate")
        params2 = _group_params(cfg, "group2", "simulate", need_raw=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d2 = Design(n_total=sim["n_total2"], n_direct=sim["n_direct2"],
                        k_reps=sim["k_reps2"])
        pspec = _power_spec(cfg, "simulate", need_power=False)
        two = TwoGroupSimSpec(
            params1=params1, design1=d1, mu1=sim.get("mu", 0.0),
            params2=params2, design2=d2, mu2=sim.get("mu2", 0.0),
            replications=sim["replications"], seed=sim_seed)
        mc = monte_carlo_power(two, pspec, workers=threads, collect_values=bool(out_dir))
        result = {
            "rejection_rate": mc.rejection_rate, "mc_error": mc.mc_error,
            "closed_form_se": mc.closed_form_se,
            "replications": mc.replications, "n_failed": mc.n_failed,
        }
        _dump_replicates(out_dir, "rejected", mc.values)

        def render(payload):
            r = payload["result"]
            click.echo(f"rejection rate: {r['rejection_rate']:.4f} (mc error {r['mc_error']:.2g})")
            click.echo(f"closed-form se: {r['closed_form_se']:.6g}")

    else:
        raise click.UsageError(f"simulation.mode must be 'se' or 'power', got {mode!r}")

    payload = envelope(result, echo={"mode": "simulate", "simulation": dict(sim)})
    _emit(payload, fmt, out_dir, "simulate", render)


@main.command()
@_common
@_catch_domain_errors
def sweep(config_path, fixture, sets, out_dir, fmt, seed, threads):
    """Grid sweeps: [sweep] kind=se_surface or kind=threshold, emitting
    long-format tables."""
    cfg = _load_config(config_path, fixture, sets)
    sw = cfg.require("sweep", ("kind",), "sweep")
    kind = sw["kind"]
    if kind == "se_surface":
        cfg.require("sweep", ("n_values", "k_values", "r_delta_values", "n_total", "r_phi"), "sweep")
        rows = se_surface(
            n_values=[int(v) for v in sw["n_values"]],
            k_values=[int(v) for v in sw["k_values"]],
            r_delta_values=sw["r_delta_values"],
            n_total=sw["n_total"], r_phi=sw["r_phi"],
            sigma2_eps=sw.get("sigma2_eps", 1.0))
    elif kind == "threshold":
        cfg.require("sweep", ("r_cb_values", "r_phi", "c_total"), "sweep")
        rows = threshold_scan(
            r_cb_values=sw["r_cb_values"], r_phi=sw["r_phi"],
            c_total=sw["c_total"], c_q=sw.get("c_q", 1.0),
            config=_optimizer_config(cfg),
            include_fraction=sw.get("include_fraction", False))
    else:
        raise click.UsageError(f"sweep.kind must be 'se_surface' or 'threshold', got {kind!r}")

    dict_rows = rows_to_dicts(rows)
    payload = envelope({"rows": dict_rows}, echo={"mode": "sweep", "sweep": {
        k: v for k, v in sw.items()}})

    def render(_payload):
        click.echo(_rows_as_csv(dict_rows))

    _emit(payload, fmt, out_dir, "sweep", render, csv_rows=dict_rows)


@main.command()
@_common
@_catch_domain_errors
def sensitivity(config_path, fixture, sets, out_dir, fmt, seed, threads):
    """Efficiency under misassessed group-1 parameters ([sensitivity]
    axis=..., multipliers=...)."""
    cfg = _load_config(config_path, fixture, sets)
    sens = cfg.require("sensitivity", ("axis", "multipliers"), "sensitivity")
    cost = _cost_model(cfg, "sensitivity")
    params1 = _group_params(cfg, "group1", "sensitivity")
    params2 = _group_params(cfg, "group2", "sensitivity")
    rows = sensitivity_scan(params1, params2, sens["axis"], sens["multipliers"],
                            cost, _optimizer_config(cfg))
    dict_rows = rows_to_dicts(rows)
    payload = envelope({"rows": dict_rows},
                       echo={"mode": "sensitivity", "sensitivity": dict(sens)})

    def render(_payload):
        click.echo(_rows_as_csv(dict_rows))

    _emit(payload, fmt, out_dir, "sensitivity", render, csv_rows=dict_rows)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--workers", default=4, show_default=True, type=int,
              help="Bound on concurrent computation threads.")
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin (repeatable; default '*').")
def serve(host, port, workers, cors_origins):
    """Run the HTTP API service."""
    from .api import serve as run_server

    run_server(host=host, port=port, workers=workers,
               cors_origins=list(cors_origins) or ["*"])


if __name__ == "__main__":
    main()
