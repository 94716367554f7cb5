"""Threshold sampling, single LT/PT diffusion runs, and Monte-Carlo
expected-spread estimation.

Both models share the same activation rule: an inactive node activates in
the round where the summed weights of its already-active in-neighbors meet
or exceed its threshold. The pressure variant (PT) adds an adjustment phase
after each round's activations: a newly activated node v raises each of its
outgoing weights toward not-yet-active targets to
``min(1, w + alpha * I_v)``, where ``I_v`` is the influence v had received
at the moment it activated. Seeds receive no influence and never amplify.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple

import numpy as np

from . import _kernels
from .errors import ValidationError
from .graph import DirectedGraph, EdgeWeightMap

TRACE_HEADER = "record,node,round,influence,source,target,old_weight,new_weight"


@dataclass(frozen=True)
class ModelSpec:
    """Which diffusion rule to run; ``alpha`` is meaningful for PT only."""

    kind: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("lt", "pt"):
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if self.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if self.kind == "lt" and self.alpha != 0.0:
            raise ValidationError("the LT model takes no alpha")

    @classmethod
    def lt(cls) -> "ModelSpec":
        return cls("lt")

    @classmethod
    def pt(cls, alpha: float) -> "ModelSpec":
        return cls("pt", alpha)

    @property
    def label(self) -> str:
        return "lt" if self.kind == "lt" else f"pt_alpha={self.alpha:g}"


@dataclass(frozen=True)
class ThresholdAssignment:
    """One activation threshold per node, each in (0, 1]."""

    theta: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", t)
        if t.ndim != 1:
            raise ValidationError("thresholds must be a 1-D array")
        if t.size and (t.min() <= 0.0 or t.max() > 1.0):
            raise ValidationError("thresholds must lie in (0, 1]")

    @property
    def node_count(self) -> int:
        return int(self.theta.size)


class AmplifiedEdge(NamedTuple):
    source: int
    target: int
    old_weight: float
    new_weight: float


@dataclass(frozen=True)
class DiffusionOutcome:
    """Result of one diffusion run.

    Seeds appear with activation round 0 and no received-influence entry;
    every other activated node records the influence that was frozen at its
    activation. ``amplified_edges`` is nonempty only for PT with alpha > 0
    and at least one non-seed activation.
    """

    active_set: frozenset[int]
    activation_round: dict[int, int]
    received_influence: dict[int, float]
    amplified_edges: tuple[AmplifiedEdge, ...]
    rounds: int

    @property
    def size(self) -> int:
        return len(self.active_set)


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    std_error: float
    num_sims: int
    rng_seed: int


# -- threshold sampling -------------------------------------------------------


def sample_thresholds(graph: DirectedGraph, rng_seed: int) -> ThresholdAssignment:
    """Independent uniform (0, 1] draws per node; deterministic per seed."""
    rng = np.random.default_rng(rng_seed)
    return ThresholdAssignment(1.0 - rng.random(graph.node_count))


def thresholds_for_sim(node_count: int, rng_seed: int, sim_index: int) -> np.ndarray:
    """Threshold vector of simulation ``sim_index``; depends only on
    (rng_seed, sim_index), never on batching or worker scheduling."""
    rng = np.random.default_rng((rng_seed, sim_index))
    return 1.0 - rng.random(node_count)


def threshold_pool(node_count: int, rng_seed: int, num_sims: int) -> np.ndarray:
    """All per-simulation threshold vectors as one (num_sims, n) array."""
    pool = np.empty((num_sims, node_count))
    for i in range(num_sims):
        pool[i] = thresholds_for_sim(node_count, rng_seed, i)
    return pool


# -- single runs ---------------------------------------------------------------


def _prep_seeds(graph: DirectedGraph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= graph.node_count):
        raise ValidationError("seed id out of range")
    return arr

def _check_thresholds(graph: DirectedGraph, thresholds: ThresholdAssignment) -> np.ndarray:
    if thresholds.node_count != graph.node_count:
        raise ValidationError("threshold vector length differs from node count")
    return thresholds.theta


def _effective_base(weights: EdgeWeightMap) -> np.ndarray:
    if not weights.overlay:
        return weights.base
    eff = weights.base.copy()
    for e, w in weights.overlay.items():
        eff[e] = w
    return eff


def run_lt(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    thresholds: ThresholdAssignment,
    seeds: Iterable[int],
) -> DiffusionOutcome:
    """One LT diffusion with the given thresholds; weights never change."""
    theta = _check_thresholds(graph, thresholds)
    seed_arr = _prep_seeds(graph, seeds)
    _, rounds, round_of, received = _kernels.lt_run(
        graph.out_ptr, graph.out_idx, _effective_base(weights), theta, seed_arr
    )
    return _build_outcome(graph, seed_arr, round_of, received, rounds, None)


def run_pt(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    thresholds: ThresholdAssignment,
    seeds: Iterable[int],
    alpha: float,
) -> DiffusionOutcome:
    """One PT diffusion: activation phase, then influence adjustment."""
    if alpha < 0:
        raise ValidationError("alpha must be >= 0")
    theta = _check_thresholds(graph, thresholds)
    seed_arr = _prep_seeds(graph, seeds)
    _, rounds, round_of, received, amp_e, amp_old, amp_new = _kernels.pt_run(
        graph.out_ptr, graph.out_idx, _effective_base(weights), theta, seed_arr, alpha
    )
    amplified = tuple(
        AmplifiedEdge(graph.edge_source(int(e)), int(graph.out_idx[e]), float(o), float(w))
        for e, o, w in zip(amp_e, amp_old, amp_new)
    )
    return _build_outcome(graph, seed_arr, round_of, received, rounds, amplified)


def run_model(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    model: ModelSpec,
    thresholds: ThresholdAssignment,
    seeds: Iterable[int],
) -> DiffusionOutcome:
    if model.kind == "lt":
        return run_lt(graph, weights, thresholds, seeds)
    return run_pt(graph, weights, thresholds, seeds, model.alpha)


def _build_outcome(graph, seed_arr, round_of, received, rounds, amplified):
    activated = np.nonzero(round_of >= 0)[0]
    seed_set = set(int(s) for s in seed_arr)
    activation_round = {int(v): int(round_of[v]) for v in activated}
    received_influence = {
        int(v): float(received[v]) for v in activated if int(v) not in seed_set
    }
    return DiffusionOutcome(
        active_set=frozenset(int(v) for v in activated),
        activation_round=activation_round,
        received_influence=received_influence,
        amplified_edges=amplified if amplified is not None else (),
        rounds=int(rounds),
    )


# -- Monte-Carlo estimation -----------------------------------------------------


def estimate_spread(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    model: ModelSpec,
    seeds: Iterable[int],
    num_sims: int,
    rng_seed: int,
    *,
    thresholds: ThresholdAssignment | None = None,
    pool: np.ndarray | None = None,
    workers: int = 1,
) -> SpreadEstimate:
    """Mean active-set size over ``num_sims`` independent diffusions.

    Simulation i draws its thresholds from (rng_seed, i), so the result is
    bit-identical for a fixed (rng_seed, num_sims) regardless of worker
    count. Passing ``thresholds`` pins every simulation to that assignment
    (deterministic spread); ``pool`` supplies pre-generated per-simulation
    thresholds (common random numbers across repeated calls).
    """
    if num_sims < 1:
        raise ValidationError("num_sims must be >= 1")
    if workers < 1:
        raise ValidationError("workers must be >= 1")
    seed_arr = _prep_seeds(graph, seeds)
    w_out = _effective_base(weights)
    theta_fixed = _check_thresholds(graph, thresholds) if thresholds is not None else None
    if pool is not None and pool.shape != (num_sims, graph.node_count):
        raise ValidationError("pool shape must be (num_sims, node_count)")
    counts = np.empty(num_sims, dtype=np.int64)

    kind, alpha = model.kind, model.alpha

    def run_range(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            if theta_fixed is not None:
                theta = theta_fixed
            elif pool is not None:
                theta = pool[i]
            else:
                theta = thresholds_for_sim(graph.node_count, rng_seed, i)
            if kind == "lt":
                counts[i] = _kernels.lt_spread(
                    graph.out_ptr, graph.out_idx, w_out, theta, seed_arr
                )
            else:
                counts[i] = _kernels.pt_spread(
                    graph.out_ptr, graph.out_idx, w_out, theta, seed_arr, alpha
                )

    if workers == 1 or num_sims < 2 * workers:
        run_range(0, num_sims)
    else:
        bounds = np.linspace(0, num_sims, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(run_range, bounds[j], bounds[j + 1]) for j in range(workers)]
            for f in futs:
                f.result()

    mean = float(counts.sum() / num_sims)
    std_error = float(counts.std(ddof=1) / np.sqrt(num_sims)) if num_sims > 1 else 0.0
    return SpreadEstimate(mean=mean, std_error=std_error, num_sims=num_sims, rng_seed=rng_seed)


# -- trace export ----------------------------------------------------------------


def write_trace_csv(graph: DirectedGraph, outcome: DiffusionOutcome, fp: IO[str]) -> None:
    """One ``activation`` row per activated node (original ids, ordered by
    round then node), then one ``amplified`` row per adjusted edge."""
    fp.write(TRACE_HEADER + "\n")
    for node in sorted(outcome.active_set, key=lambda v: (outcome.activation_round[v], v)):
        r = outcome.activation_round[node]
        inf = outcome.received_influence.get(node)
        inf_s = "" if inf is None else repr(inf)
        fp.write(f"activation,{graph.to_original(node)},{r},{inf_s},,,,\n")
    for edge in outcome.amplified_edges:
        r = outcome.activation_round[edge.source]
        fp.write(
            f"amplified,,{r},,{graph.to_original(edge.source)},"
            f"{graph.to_original(edge.target)},{edge.old_weight!r},{edge.new_weight!r}\n"
        )
