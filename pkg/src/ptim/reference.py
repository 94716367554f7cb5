"""Literal reference implementation of both diffusion rules.

Independent oracle for the optimized kernels: per round it recomputes every
inactive node's received influence from scratch against a dict of current
weights, then applies the adjustment phase exactly as the two-phase rule is
written. Intended for small graphs and differential tests only.
"""

from __future__ import annotations

from typing import Iterable

from .diffusion import (
    AmplifiedEdge,
    DiffusionOutcome,
    ModelSpec,
    ThresholdAssignment,
)
from .errors import ValidationError
from .graph import DirectedGraph, EdgeWeightMap


def run_reference(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    model: ModelSpec,
    thresholds: ThresholdAssignment,
    seeds: Iterable[int],
) -> DiffusionOutcome:
    if thresholds.node_count != graph.node_count:
        raise ValidationError("threshold vector length differs from node count")
    theta = thresholds.theta
    n = graph.node_count
    w: dict[tuple[int, int], float] = {}
    for u in range(n):
        for v in graph.out_neighbors(u):
            w[(u, int(v))] = weights.effective(graph.edge_id(u, int(v)))

    active = set(int(s) for s in seeds)
    if any(s < 0 or s >= n for s in active):
        raise ValidationError("seed id out of range")
    activation_round = {s: 0 for s in active}
    received: dict[int, float] = {}
    amplified: list[AmplifiedEdge] = []
    amplify = model.kind == "pt" and model.alpha > 0.0

    rounds = 0
    r = 0
    while True:
        r += 1
        newly: list[int] = []
        frozen: dict[int, float] = {}
        for v in range(n):
            if v in active:
                continue
            iv = sum(w[(int(u), v)] for u in graph.in_neighbors(v) if int(u) in active)
            if iv >= theta[v]:
                newly.append(v)
                frozen[v] = iv
        if not newly:
            break
        rounds = r
        if amplify:
            # Targets not yet in the previously-active set; nodes that
            # activated this same round are still adjustable.
            for v in newly:
                iv = frozen[v]
                for s_ in graph.out_neighbors(v):
                    s = int(s_)
                    if s not in active:
                        old = w[(v, s)]
                        new = min(1.0, old + model.alpha * iv)
                        amplified.append(AmplifiedEdge(v, s, old, new))
                        w[(v, s)] = new
        for v in newly:
            active.add(v)
            activation_round[v] = r
            received[v] = frozen[v]

    return DiffusionOutcome(
        active_set=frozenset(active),
        activation_round=activation_round,
        received_influence=received,
        amplified_edges=tuple(amplified),
        rounds=rounds,
    )
