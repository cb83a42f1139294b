"""Wire types for the HTTP API.

Request fields use the public JSON names ("lambda", "from", "to");
the Python attributes stay keyword-safe behind aliases.
"""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class NoiseModel(BaseModel):
    family: str
    params: dict


class VariableModel(BaseModel):
    name: str
    parents: dict
    intercept: float
    noise: NoiseModel
    actionability: str
    proper_sigma: float
    marginal_sigma: float


class EdgeModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    src: str = Field(alias="from")
    dst: str = Field(alias="to")
    beta: float
    tau: float


class TargetModel(BaseModel):
    coefficients: dict
    threshold: float


class ScmResponse(BaseModel):
    variables: list[VariableModel]
    edges: list[EdgeModel]
    target: TargetModel


class PredictRequest(BaseModel):
    instance: dict


class PredictResponse(BaseModel):
    score: float
    probability: float
    label: int


class CounterfactualRequest(BaseModel):
    instance: dict
    action: dict


class CounterfactualResponse(BaseModel):
    counterfactual: dict
    probability: float


class CostSpecModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    p: float = 2.0
    normalization: Literal["proper_sigma", "marginal_sigma", "none"] = "proper_sigma"
    lam: float = Field(default=0.0, alias="lambda", ge=0.0)
    time_variant: Literal[
        "longest_path", "weighted_average_raw", "weighted_average_abs"
    ] = "weighted_average_abs"
    time_budget: Optional[float] = Field(default=None, ge=0.0)


class RecourseRequest(BaseModel):
    instance: dict
    cost_spec: CostSpecModel = CostSpecModel()
    k: int = Field(default=2, ge=1)
    # convenience mirror of cost_spec.time_budget; wins when both appear
    time_budget: Optional[float] = Field(default=None, ge=0.0)
    bounds: Optional[dict] = None


class CostModel(BaseModel):
    c_s: float
    c_t: float
    total: float


class SolutionModel(BaseModel):
    action: dict
    cost: Optional[CostModel]
    counterfactual: dict
    probability: float
    feasible: bool
    diagnostics: dict


class FrontierRequest(BaseModel):
    instance: dict
    lambdas: list[float]
    cost_spec: CostSpecModel = CostSpecModel()
    k: int = Field(default=2, ge=1)
    time_budget: Optional[float] = Field(default=None, ge=0.0)
    bounds: Optional[dict] = None


class FrontierPointModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: float = Field(alias="lambda")
    solution: SolutionModel


class FrontierResponse(BaseModel):
    points: list[FrontierPointModel]
    switches: list[dict]


class SampleRequest(BaseModel):
    seed: int = Field(default=0, ge=0)
    unfavorable: bool = True


class SampleResponse(BaseModel):
    instance: dict
    score: float
    probability: float
    label: int


class ApiError(BaseModel):
    code: Literal["bad_request", "infeasible", "internal"]
    message: str
