"""Stateless JSON API over one fixed SCM.

The model is chosen at startup and never mutated, so every handler is a
pure function of its request body and responses are freely cacheable.
Failures are always a single {code, message} object: bad_request for
input problems, infeasible when no admissible action flips the decision,
internal otherwise.
"""
from __future__ import annotations

import json
from typing import Mapping, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import bench
from ..graph import from_scm
from ..recourse import (
    RecourseProblem,
    lambda_frontier,
    solution_payload,
    solve,
    support_switches,
)
from ..scm import (
    Action,
    Scm,
    counterfactual,
    predict,
    sample_unfavorable,
    sample,
    validate,
    variances,
)
from . import schemas


class InfeasibleError(Exception):
    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _error(status: int, code: str, message: str) -> JSONResponse:
    body = schemas.ApiError(code=code, message=message)
    return JSONResponse(status_code=status, content=body.model_dump())


def _scm_description(scm: Scm, times: Mapping) -> schemas.ScmResponse:
    table = variances(scm)
    dag = from_scm(scm, times)
    variables = [
        schemas.VariableModel(
            name=v.name,
            parents={p: v.equation.coefficients[p] for p in v.equation.parents},
            intercept=v.equation.intercept,
            noise=schemas.NoiseModel(family=v.noise.family,
                                     params=dict(v.noise.params)),
            actionability=v.actionability,
            proper_sigma=table[v.name].proper_std,
            marginal_sigma=table[v.name].marginal_std,
        )
        for v in scm.variables
    ]
    edges = [
        schemas.EdgeModel(src=e.src, dst=e.dst, beta=e.beta, tau=e.tau)
        for e in dag.edges
    ]
    target = schemas.TargetModel(coefficients=dict(scm.target.coefficients),
                                 threshold=scm.target.threshold)
    return schemas.ScmResponse(variables=variables, edges=edges, target=target)


def _as_instance(raw: Mapping) -> dict:
    return {str(k): float(v) for k, v in raw.items()}


def create_app(scm: Optional[Scm] = None,
               response_times: Optional[Mapping] = None) -> FastAPI:
    if scm is None:
        scm = bench.german_scm()
        if response_times is None:
            response_times = bench.german_times()
    times = dict(response_times) if response_times else {}
    report = validate(scm)
    if not report.ok:
        raise ValueError("refusing to serve an invalid SCM: "
                         + "; ".join(report.errors))
    dag = from_scm(scm, times)
    description = _scm_description(scm, times)

    app = FastAPI(title="timecourse", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def on_bad_request(request: Request, exc: RequestValidationError):
        return _error(400, "bad_request", str(exc.errors()))

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.exception_handler(InfeasibleError)
    async def on_infeasible(request: Request, exc: InfeasibleError):
        message = f"{exc}; diagnostics: {json.dumps(exc.diagnostics, sort_keys=True)}"
        return _error(422, "infeasible", message)

    @app.exception_handler(Exception)
    async def on_internal(request: Request, exc: Exception):
        return _error(500, "internal", f"{type(exc).__name__}: {exc}")

    def build_problem(instance: Mapping, cost_spec: schemas.CostSpecModel,
                      k: int, time_budget: Optional[float],
                      bounds: Optional[Mapping]) -> RecourseProblem:
        from dataclasses import replace

        from ..cost import CostSpec

        spec = CostSpec(
            p=cost_spec.p,
            normalization=cost_spec.normalization,
            lam=cost_spec.lam,
            time_variant=cost_spec.time_variant,
            time_budget=cost_spec.time_budget,
        )
        if time_budget is not None:
            spec = replace(spec, time_budget=time_budget)
        fixed_bounds = None
        if bounds is not None:
            fixed_bounds = {str(n): (float(lo), float(hi))
                            for n, (lo, hi) in bounds.items()}
        return RecourseProblem(
            scm=scm,
            dag=dag,
            instance=_as_instance(instance),
            cost_spec=spec,
            k=k,
            bounds=fixed_bounds,
        )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/scm", response_model=schemas.ScmResponse)
    def describe_scm() -> schemas.ScmResponse:
        return description

    @app.post("/api/predict", response_model=schemas.PredictResponse)
    def predict_endpoint(body: schemas.PredictRequest) -> schemas.PredictResponse:
        pred = predict(scm, _as_instance(body.instance))
        return schemas.PredictResponse(score=pred.score,
                                       probability=pred.probability,
                                       label=pred.label)

    @app.post("/api/counterfactual",
              response_model=schemas.CounterfactualResponse)
    def counterfactual_endpoint(
            body: schemas.CounterfactualRequest) -> schemas.CounterfactualResponse:
        instance = _as_instance(body.instance)
        action = Action({str(k): float(v) for k, v in body.action.items()})
        result = counterfactual(scm, instance, action)
        prob = predict(scm, result).probability
        return schemas.CounterfactualResponse(counterfactual=result,
                                              probability=prob)

    @app.post("/api/recourse", response_model=schemas.SolutionModel)
    def recourse_endpoint(body: schemas.RecourseRequest) -> schemas.SolutionModel:
        problem = build_problem(body.instance, body.cost_spec, body.k,
                                body.time_budget, body.bounds)
        solution = solve(problem)
        if not solution.feasible:
            raise InfeasibleError("no feasible recourse action",
                                  solution.diagnostics)
        return schemas.SolutionModel(**solution_payload(solution))

    @app.post("/api/frontier", response_model=schemas.FrontierResponse)
    def frontier_endpoint(body: schemas.FrontierRequest) -> schemas.FrontierResponse:
        problem = build_problem(body.instance, body.cost_spec, body.k,
                                body.time_budget, body.bounds)
        points = lambda_frontier(problem, body.lambdas)
        return schemas.FrontierResponse(
            points=[
                schemas.FrontierPointModel(
                    lam=pt.lam,
                    solution=schemas.SolutionModel(**solution_payload(pt.solution)),
                )
                for pt in points
            ],
            switches=support_switches(points),
        )

    @app.post("/api/sample", response_model=schemas.SampleResponse)
    def sample_endpoint(body: schemas.SampleRequest) -> schemas.SampleResponse:
        if body.unfavorable:
            instance = sample_unfavorable(scm, body.seed)
        else:
            instance = sample(scm, 1, body.seed).row(0)
        pred = predict(scm, instance)
        return schemas.SampleResponse(instance=instance, score=pred.score,
                                      probability=pred.probability,
                                      label=pred.label)

    return app
