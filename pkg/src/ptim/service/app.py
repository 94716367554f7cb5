"""FastAPI service wrapping the core package.

Graphs are uploaded (or generated) once, kept in an in-memory store keyed
by id, and reused across simulate/maximize requests. The built-in id
``fixture:counterexample`` resolves to the 4-node fixture with its fixed
thresholds, so the deterministic reference values are reachable without
uploading anything.

Run with: ``uvicorn ptim.service.app:app``
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from ..diffusion import ModelSpec, ThresholdAssignment, estimate_spread
from ..errors import PtimError
from ..graph import (
    DirectedGraph,
    EdgeWeightMap,
    GraphFormat,
    GraphSource,
    export_edge_list,
    generate_erdos_renyi,
    load_edge_list,
    weighted_cascade,
)
from ..influence import EstimatorConfig, celf
from ..properties import counterexample_fixture, run_all_checks
from . import schemas

FIXTURE_GRAPH_ID = "fixture:counterexample"


@dataclass(frozen=True)
class StoredGraph:
    graph: DirectedGraph
    weights: EdgeWeightMap
    fixed_thresholds: ThresholdAssignment | None = None


class GraphStore:
    def __init__(self):
        self._lock = threading.Lock()
        self._graphs: dict[str, StoredGraph] = {}

    def add(self, entry: StoredGraph) -> str:
        graph_id = uuid.uuid4().hex
        with self._lock:
            self._graphs[graph_id] = entry
        return graph_id

    def get(self, graph_id: str) -> StoredGraph:
        if graph_id == FIXTURE_GRAPH_ID:
            fx = counterexample_fixture()
            return StoredGraph(fx.graph, fx.weights, fx.thresholds)
        with self._lock:
            entry = self._graphs.get(graph_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown graph_id {graph_id!r}")
        return entry


app = FastAPI(
    title="ptim service",
    description="Threshold-diffusion simulation and influence maximization",
)
store = GraphStore()


@app.exception_handler(PtimError)
async def _ptim_error_handler(_, exc: PtimError):
    raise HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


def _graph_info(graph_id: str, entry: StoredGraph) -> schemas.GraphInfo:
    graph = entry.graph
    sums = entry.weights.incoming_sums()
    with_in = graph.in_degree > 0
    max_dev = float(abs(sums[with_in] - 1.0).max()) if with_in.any() else 0.0
    out_deg = np.diff(graph.out_ptr)
    return schemas.GraphInfo(
        graph_id=graph_id,
        node_count=graph.node_count,
        edge_count=graph.edge_count,
        max_in_degree=int(graph.in_degree.max()) if graph.node_count else 0,
        isolated_nodes=int((~with_in & (out_deg == 0)).sum()),
        weighted_cascade_max_sum_deviation=max_dev,
    )


@app.post("/graphs", response_model=schemas.GraphInfo)
def upload_graph(req: schemas.GraphUploadRequest) -> schemas.GraphInfo:
    try:
        graph = load_edge_list(GraphSource(GraphFormat(req.format), text=req.text))
    except PtimError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    entry = StoredGraph(graph, weighted_cascade(graph))
    return _graph_info(store.add(entry), entry)


@app.post("/graphs/generate-er", response_model=schemas.GraphInfo)
def generate_er(req: schemas.GenerateErRequest) -> schemas.GraphInfo:
    try:
        graph = generate_erdos_renyi(req.n, req.p, req.rng_seed)
    except PtimError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    entry = StoredGraph(graph, weighted_cascade(graph))
    return _graph_info(store.add(entry), entry)


@app.get("/graphs/{graph_id}", response_model=schemas.GraphInfo)
def graph_info(graph_id: str) -> schemas.GraphInfo:
    return _graph_info(graph_id, store.get(graph_id))


@app.get("/graphs/{graph_id}/export", response_class=PlainTextResponse)
def graph_export(graph_id: str) -> str:
    return export_edge_list(store.get(graph_id).graph)


def _resolve_model(kind: str, alpha: float) -> ModelSpec:
    try:
        return ModelSpec.lt() if kind == "lt" else ModelSpec.pt(alpha)
    except PtimError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    entry = store.get(req.graph_id)
    model = _resolve_model(req.model, req.alpha)
    try:
        seeds = [entry.graph.to_dense(s) for s in req.seeds]
        est = estimate_spread(
            entry.graph, entry.weights, model, seeds, req.num_sims, req.rng_seed,
            thresholds=entry.fixed_thresholds, workers=req.workers,
        )
    except PtimError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return schemas.SimulateResponse(
        graph_id=req.graph_id,
        node_count=entry.graph.node_count,
        edge_count=entry.graph.edge_count,
        model_label=model.label,
        mean=est.mean,
        std_error=est.std_error,
        num_sims=est.num_sims,
        rng_seed=est.rng_seed,
    )


@app.post("/maximize", response_model=schemas.MaximizeResponse)
def maximize(req: schemas.MaximizeRequest) -> schemas.MaximizeResponse:
    entry = store.get(req.graph_id)
    model = _resolve_model(req.model, req.alpha)
    try:
        config = EstimatorConfig(
            num_sims=req.num_sims,
            rng_seed=req.rng_seed,
            shared_sample_pool=req.shared_sample_pool,
            fixed_thresholds=entry.fixed_thresholds,
            workers=req.workers,
        )
        result = celf(entry.graph, entry.weights, model, req.k, config)
    except PtimError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return schemas.MaximizeResponse(
        graph_id=req.graph_id,
        model_label=model.label,
        seeds=[entry.graph.to_original(v) for v in result.seeds_in_order],
        marginal_gain=result.marginal_gain,
        cumulative_spread=result.cumulative_spread,
        evaluations=result.evaluations,
    )


@app.post("/properties", response_model=schemas.PropertiesResponse)
def properties(req: schemas.PropertiesRequest) -> schemas.PropertiesResponse:
    reports = run_all_checks(req.trials, req.rng_seed)
    models = [
        schemas.PropertyReportModel(
            name=r.name,
            trials=r.trials,
            violations=r.violations,
            first_violation_witness=r.first_violation_witness,
        )
        for r in reports
    ]
    return schemas.PropertiesResponse(
        reports=models, all_passed=all(r.violations == 0 for r in reports)
    )
