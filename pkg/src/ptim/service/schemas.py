"""Request and response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ModelKind = Literal["lt", "pt"]


class GraphUploadRequest(BaseModel):
    text: str = Field(description="edge-list or csv payload")
    format: Literal[
        "edge-list-directed", "edge-list-undirected", "csv-first-two-columns"
    ] = "edge-list-directed"


class GenerateErRequest(BaseModel):
    n: int = Field(ge=1)
    p: float = Field(ge=0.0, le=1.0)
    rng_seed: int = 0


class GraphInfo(BaseModel):
    graph_id: str
    node_count: int
    edge_count: int
    max_in_degree: int
    isolated_nodes: int
    weighted_cascade_max_sum_deviation: float


class SimulateRequest(BaseModel):
    graph_id: str
    model: ModelKind
    alpha: float = 0.0
    seeds: list[int] = Field(min_length=1, description="original node ids")
    num_sims: int = Field(default=1000, ge=1)
    rng_seed: int = 0
    workers: int = Field(default=1, ge=1)


class SimulateResponse(BaseModel):
    graph_id: str
    node_count: int
    edge_count: int
    model_label: str
    mean: float
    std_error: float
    num_sims: int
    rng_seed: int


class MaximizeRequest(BaseModel):
    graph_id: str
    model: ModelKind
    alpha: float = 0.0
    k: int = Field(ge=0)
    num_sims: int = Field(default=1000, ge=1)
    rng_seed: int = 0
    shared_sample_pool: bool = True
    workers: int = Field(default=1, ge=1)


class MaximizeResponse(BaseModel):
    graph_id: str
    model_label: str
    seeds: list[int]
    marginal_gain: list[float]
    cumulative_spread: list[float]
    evaluations: int


class PropertiesRequest(BaseModel):
    trials: int = Field(default=1000, ge=1)
    rng_seed: int = 0


class PropertyReportModel(BaseModel):
    name: str
    trials: int
    violations: int
    first_violation_witness: Optional[dict] = None


class PropertiesResponse(BaseModel):
    reports: list[PropertyReportModel]
    all_passed: bool
