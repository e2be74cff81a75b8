"""Stateless HTTP facade over the design, budget, power, estimation and
sweep operations. All computation is pure and identical to the CLI for the
same inputs; responses carry a schema version, an echo of the validated
inputs, and any warnings raised during computation.

Error mapping: request validation -> 400 with field paths; infeasible
problems and degenerate data -> 422 (with a minimal-feasible-budget hint
where known); domain errors never produce 500s.
"""

from __future__ import annotations

import warnings
from contextlib import asynccontextmanager
from typing import Literal

import anyio.to_thread
from fastapi import FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from . import __version__
from .estimation import estimate_model_params, read_pilot_csv
from .formulas import mean_estimator_variance, power_from_se, se_target
from .optimizer import OptimizerConfig, minimize_budget, optimize_two_groups
from .serialize import (
    budget_result_to_dict,
    envelope,
    estimates_to_dict,
    report_to_dict,
    rows_to_dicts,
)
from .sweeps import se_surface, sensitivity_scan, threshold_scan
from .types import (
    CalibDesignError,
    ConstraintError,
    CostModel,
    DegenerateDataError,
    Design,
    DomainError,
    InsufficientDataError,
    ModelParams,
    PowerSpec,
)

MAX_GRID_POINTS = 10_000


class GroupParamsBody(BaseModel):
    sigma2_eps: float = Field(gt=0)
    r_delta: float = Field(ge=0)
    r_phi: float = Field(ge=0)

    def to_params(self) -> ModelParams:
        return ModelParams(sigma2_eps=self.sigma2_eps, r_delta=self.r_delta, r_phi=self.r_phi)


class CostsBody(BaseModel):
    c_q: float = Field(gt=0)
    c_b: float = Field(gt=0)
    c_total: float | None = Field(default=None, gt=0)

    def to_cost(self) -> CostModel:
        if self.c_total is None:
            raise DomainError("costs.c_total is required here")
        return CostModel(c_q=self.c_q, c_b=self.c_b, c_total=self.c_total)


class PowerBody(BaseModel):
    alpha: float = Field(gt=0, lt=1)
    power: float = Field(default=0.8, gt=0, lt=1)
    delta: float = Field(ge=0)

    def to_spec(self) -> PowerSpec:
        return PowerSpec(alpha=self.alpha, power=self.power, delta=self.delta)


class OptimizerBody(BaseModel):
    k_max_extra: int = 2
    allocation_grid: float = 0.01
    tie_tolerance: float = 1e-12
    budget_tolerance: float = 1e-5
    max_iterations: int = 50
    fraction_report_epsilon: float = 1e-4

    def to_config(self) -> OptimizerConfig:
        return OptimizerConfig(**self.model_dump())


class DesignRequest(BaseModel):
    group1: GroupParamsBody
    group2: GroupParamsBody
    costs: CostsBody
    optimizer: OptimizerBody = OptimizerBody()


class BudgetRequest(BaseModel):
    group1: GroupParamsBody
    group2: GroupParamsBody
    costs: CostsBody  # c_total ignored
    power: PowerBody
    optimizer: OptimizerBody = OptimizerBody()


class DesignTripleBody(BaseModel):
    n_total: int = Field(ge=4)
    n_direct: int = Field(ge=4)
    k_reps: int = Field(ge=1)

    def to_design(self) -> Design:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return Design(n_total=self.n_total, n_direct=self.n_direct, k_reps=self.k_reps)


class PowerRequest(BaseModel):
    power: PowerBody
    se: float | None = Field(default=None, gt=0)
    group1: GroupParamsBody | None = None
    group2: GroupParamsBody | None = None
    design1: DesignTripleBody | None = None
    design2: DesignTripleBody | None = None

    @model_validator(mode="after")
    def _se_or_design(self):
        if self.se is None:
            needed = (self.group1, self.group2, self.design1, self.design2)
            if any(v is None for v in needed):
                raise ValueError(
                    "provide either 'se' or all of group1, group2, design1, design2")
        return self


class EstimateRequest(BaseModel):
    csv: str = Field(min_length=1, description="Pilot CSV text (header row mandatory)")


class SensitivityRequest(BaseModel):
    group1: GroupParamsBody
    group2: GroupParamsBody
    costs: CostsBody
    axis: Literal["sigma2_eps", "r_delta", "r_phi"]
    multipliers: list[float] = Field(min_length=1, max_length=MAX_GRID_POINTS)
    optimizer: OptimizerBody = OptimizerBody()


class SurfaceSweepBody(BaseModel):
    n_values: list[int] = Field(min_length=1)
    k_values: list[int] = Field(min_length=1)
    r_delta_values: list[float] = Field(min_length=1)
    n_total: int = Field(ge=4)
    r_phi: float = Field(ge=0)
    sigma2_eps: float = Field(default=1.0, gt=0)


class ThresholdSweepBody(BaseModel):
    r_cb_values: list[float] = Field(min_length=1)
    r_phi: float = Field(ge=0)
    c_total: float = Field(gt=0)
    c_q: float = Field(default=1.0, gt=0)
    include_fraction: bool = False


class SweepRequest(BaseModel):
    kind: Literal["se_surface", "threshold"]
    se_surface: SurfaceSweepBody | None = None
    threshold: ThresholdSweepBody | None = None
    optimizer: OptimizerBody = OptimizerBody()

    @model_validator(mode="after")
    def _body_matches_kind(self):
        if getattr(self, self.kind) is None:
            raise ValueError(f"kind={self.kind!r} needs a {self.kind!r} body")
        return self


def _grid_points(req: SweepRequest) -> int:
    if req.kind == "se_surface":
        s = req.se_surface
        return len(s.n_values) * len(s.k_values) * len(s.r_delta_values)
    return len(req.threshold.r_cb_values)


def _collect(fn, *args, **kwargs):
    """Run fn capturing warnings; returns (value, warning messages)."""
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        value = fn(*args, **kwargs)
        return value, [str(w.message) for w in rec]


def create_app(cors_origins: list[str] | None = None, workers: int | None = None) -> FastAPI:
    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        if workers is not None:
            limiter = anyio.to_thread.current_default_thread_limiter()
            limiter.total_tokens = max(1, workers)
        yield

    app = FastAPI(title="calibdesign", version=__version__, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        errors = [
            {"path": ".".join(str(p) for p in e["loc"] if p != "body"),
             "message": e["msg"]}
            for e in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": errors})

    @app.exception_handler(CalibDesignError)
    async def domain_handler(_req: Request, exc: CalibDesignError):
        if isinstance(exc, (ConstraintError, DegenerateDataError, InsufficientDataError)):
            body = {"error": str(exc)}
            if isinstance(exc, ConstraintError) and exc.min_feasible_budget is not None:
                body["min_feasible_budget"] = exc.min_feasible_budget
            return JSONResponse(status_code=422, content=body)
        # remaining domain errors are the caller's invalid values
        return JSONResponse(status_code=400,
                            content={"errors": [{"path": "", "message": str(exc)}]})

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "version": __version__, "schema_version": "1"}

    @app.post("/v1/design")
    def design(req: DesignRequest):
        report, warns = _collect(
            optimize_two_groups, req.group1.to_params(), req.group2.to_params(),
            req.costs.to_cost(), req.optimizer.to_config())
        return envelope(report_to_dict(report),
                        echo=req.model_dump(), warnings_list=warns)

    @app.post("/v1/budget")
    def budget(req: BudgetRequest):
        result, warns = _collect(
            minimize_budget, req.group1.to_params(), req.group2.to_params(),
            req.costs.c_q, req.costs.c_b, req.power.to_spec(),
            req.optimizer.to_config())
        return envelope(budget_result_to_dict(result),
                        echo=req.model_dump(), warnings_list=warns)

    @app.post("/v1/power")
    def power(req: PowerRequest):
        spec = req.power.to_spec()
        if req.se is not None:
            se_value = req.se
            detail = {"se": se_value}
        else:
            v = (mean_estimator_variance(req.group1.to_params(), req.design1.to_design())
                 + mean_estimator_variance(req.group2.to_params(), req.design2.to_design()))
            se_value = v ** 0.5
            detail = {"se": se_value, "variance": v}
        result = {**detail,
                  "power": power_from_se(se_value, spec),
                  "alpha": spec.alpha, "delta": spec.delta,
                  "se_target": se_target(spec) if spec.delta > 0 else None}
        return envelope(result, echo=req.model_dump())

    @app.post("/v1/estimate")
    async def estimate(request: Request, file: UploadFile | None = None):
        if file is not None:
            csv_text = (await file.read()).decode("utf-8")
            echo = {"filename": file.filename}
        else:
            try:
                payload = await request.json()
            except Exception:
                return JSONResponse(status_code=400, content={
                    "errors": [{"path": "", "message": "body must be JSON with a 'csv' field or a multipart file"}]})
            try:
                body = EstimateRequest.model_validate(payload)
            except PydanticValidationError as exc:
                errors = [{"path": ".".join(str(p) for p in e["loc"]),
                           "message": e["msg"]} for e in exc.errors()]
                return JSONResponse(status_code=400, content={"errors": errors})
            csv_text = body.csv
            echo = {"inline": True}

        def run():
            data = read_pilot_csv(csv_text)
            return [estimate_model_params(data, gid) for gid in data.group_ids()]

        estimates, warns = await anyio.to_thread.run_sync(lambda: _collect(run))
        return envelope(estimates_to_dict(estimates), echo=echo, warnings_list=warns)

    @app.post("/v1/sensitivity")
    def sensitivity(req: SensitivityRequest):
        if len(req.multipliers) > MAX_GRID_POINTS:
            return JSONResponse(status_code=413, content={
                "error": f"grid too large: {len(req.multipliers)} > {MAX_GRID_POINTS}"})
        rows, warns = _collect(
            sensitivity_scan, req.group1.to_params(), req.group2.to_params(),
            req.axis, req.multipliers, req.costs.to_cost(), req.optimizer.to_config())
        return envelope({"rows": rows_to_dicts(rows)},
                        echo=req.model_dump(), warnings_list=warns)

    @app.post("/v1/sweep")
    def sweep(req: SweepRequest):
        points = _grid_points(req)
        if points > MAX_GRID_POINTS:
            return JSONResponse(status_code=413, content={
                "error": f"grid too large: {points} points > {MAX_GRID_POINTS}"})
        if req.kind == "se_surface":
            s = req.se_surface
            rows, warns = _collect(
                se_surface, s.n_values, s.k_values, s.r_delta_values,
                s.n_total, s.r_phi, s.sigma2_eps)
        else:
            t = req.threshold
            rows, warns = _collect(
                threshold_scan, t.r_cb_values, t.r_phi, t.c_total, t.c_q,
                req.optimizer.to_config(), t.include_fraction)
        return envelope({"rows": rows_to_dicts(rows)},
                        echo=req.model_dump(), warnings_list=warns)

    return app


def serve(host: str = "127.0.0.1", port: int = 8000, workers: int = 4,
          cors_origins: list[str] | None = None) -> None:
    """Run the service (blocking)."""
    import uvicorn

    uvicorn.run(create_app(cors_origins=cors_origins, workers=workers),
                host=host, port=port)
