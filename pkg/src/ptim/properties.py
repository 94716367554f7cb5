"""Independent verification: the 4-node non-submodularity fixture, coupled
property checkers over randomized instances, and a high-replication
reference estimator built on the naive engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .diffusion import (
    DiffusionOutcome,
    ModelSpec,
    SpreadEstimate,
    ThresholdAssignment,
    run_lt,
    run_model,
    run_pt,
)
from .errors import ValidationError
from .graph import DirectedGraph, EdgeWeightMap, explicit_weights, weighted_cascade
from .reference import run_reference

REFERENCE_SIM_CAP = 10**6
_REF_STREAM = 7919  # keeps oracle threshold draws disjoint from the engine's


@dataclass(frozen=True)
class CounterexampleFixture:
    """The 4-node instance where PT's marginal gains reverse.

    Nodes 0..3 are a, b, c, d. Edges a->c and b->c carry weight 0.4,
    c->d carries 0.3; thresholds are fixed at 0.8 for c and 0.4 for d
    (1.0 for the always-seeded a and b), with amplification 1.0.
    """

    graph: DirectedGraph
    weights: EdgeWeightMap
    thresholds: ThresholdAssignment
    alpha: float


def counterexample_fixture() -> CounterexampleFixture:
    graph = DirectedGraph.from_edges(4, [(0, 2), (1, 2), (2, 3)])
    weights = explicit_weights(graph, [(0, 2, 0.4), (1, 2, 0.4), (2, 3, 0.3)])
    thresholds = ThresholdAssignment(np.array([1.0, 1.0, 0.8, 0.4]))
    return CounterexampleFixture(graph, weights, thresholds, alpha=1.0)


def verify_counterexample() -> tuple[int, int, int, int]:
    """Spreads for seeds {a}, {a,c}, {a,b}, {a,b,c} under the fixture.

    Must come out as (1, 2, 4, 3): adding c to the smaller set gains 1,
    adding it to the larger loses 1, so this PT instance is not submodular.
    Any other result is an engine bug.
    """
    fx = counterexample_fixture()
    scenarios = [(0,), (0, 2), (0, 1), (0, 1, 2)]
    sizes = tuple(
        run_pt(fx.graph, fx.weights, fx.thresholds, seeds, fx.alpha).size
        for seeds in scenarios
    )
    expected = (1, 2, 4, 3)
    if sizes != expected:
        raise RuntimeError(
            f"counterexample spreads {sizes} != {expected}: diffusion engine is broken"
        )
    if (sizes[1] - sizes[0], sizes[3] - sizes[2]) != (1, -1):
        raise RuntimeError("counterexample marginal gains are not (1, -1)")
    return sizes


@dataclass(frozen=True)
class PropertyReport:
    name: str
    trials: int
    violations: int
    first_violation_witness: dict | None = None

    def summary_line(self) -> str:
        line = f"{self.name}: trials={self.trials} violations={self.violations}"
        if self.first_violation_witness is not None:
            line += f" first_witness={self.first_violation_witness}"
        return line


def _random_instance(rng: np.random.Generator) -> tuple[DirectedGraph, EdgeWeightMap]:
    """Small random directed graph with (possibly damped) cascade weights."""
    n = int(rng.integers(4, 31))
    p = float(rng.uniform(0.05, 0.45))
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    u, v = np.nonzero(mask)
    graph = DirectedGraph._build(n, u.astype(np.int64), v.astype(np.int64))
    weights = weighted_cascade(graph) if graph.edge_count else EdgeWeightMap(graph, np.zeros(0))
    factor = float(rng.uniform(0.4, 1.0))
    return graph, EdgeWeightMap(graph, weights.base * factor)


def _random_sets(rng: np.random.Generator, n: int) -> tuple[list[int], list[int]]:
    """A random seed set B and a random subset A of it."""
    size_b = int(rng.integers(1, max(2, n // 2 + 1)))
    b = sorted(int(x) for x in rng.choice(n, size=size_b, replace=False))
    keep = rng.random(len(b)) < 0.5
    a = [v for v, kp in zip(b, keep) if kp]
    return a, b

def _trial_rng(rng_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng((rng_seed, trial))


def check_monotonicity(model: ModelSpec, trials: int, rng_seed: int) -> PropertyReport:
    """Coupled-threshold seed monotonicity: A ⊆ B must give
    active(A) ⊆ active(B) when both runs share one threshold draw."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    violations = 0
    witness = None
    for t in range(trials):
        rng = _trial_rng(rng_seed, t)
        graph, weights = _random_instance(rng)
        theta = ThresholdAssignment(1.0 - rng.random(graph.node_count))
        a, b = _random_sets(rng, graph.node_count)
        out_a = run_model(graph, weights, model, theta, a)
        out_b = run_model(graph, weights, model, theta, b)
        if not out_a.active_set <= out_b.active_set:
            violations += 1
            if witness is None:
                witness = {
                    "suite_seed": rng_seed,
                    "trial": t,
                    "model": model.label,
                    "seeds_a": a,
                    "seeds_b": b,
                    "extra_actives": sorted(out_a.active_set - out_b.active_set),
                }
    return PropertyReport(f"monotonicity[{model.label}]", trials, violations, witness)


def check_lt_dominated_by_pt(trials: int, rng_seed: int) -> PropertyReport:
    """With shared thresholds and seeds, the LT active set is contained in
    the PT active set for any alpha > 0 (PT weights dominate pointwise)."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    violations = 0
    witness = None
    for t in range(trials):
        rng = _trial_rng(rng_seed, t)
        graph, weights = _random_instance(rng)
        theta = ThresholdAssignment(1.0 - rng.random(graph.node_count))
        _, seeds = _random_sets(rng, graph.node_count)
        alpha = float(10.0 ** rng.uniform(-3.0, 0.35))
        out_lt = run_lt(graph, weights, theta, seeds)
        out_pt = run_pt(graph, weights, theta, seeds, alpha)
        if not out_lt.active_set <= out_pt.active_set:
            violations += 1
            if witness is None:
                witness = {
                    "suite_seed": rng_seed,
                    "trial": t,
                    "alpha": alpha,
                    "seeds": seeds,
                    "missing": sorted(out_lt.active_set - out_pt.active_set),
                }
    return PropertyReport("lt_dominated_by_pt", trials, violations, witness)


def check_alpha_zero_equivalence(trials: int, rng_seed: int) -> PropertyReport:
    """PT with alpha = 0 must match LT exactly: same active sets and the
    same activation rounds, on every instance."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    violations = 0
    witness = None
    for t in range(trials):
        rng = _trial_rng(rng_seed, t)
        graph, weights = _random_instance(rng)
        theta = ThresholdAssignment(1.0 - rng.random(graph.node_count))
        _, seeds = _random_sets(rng, graph.node_count)
        out_lt = run_lt(graph, weights, theta, seeds)
        out_pt = run_pt(graph, weights, theta, seeds, 0.0)
        same = (
            out_lt.active_set == out_pt.active_set
            and out_lt.activation_round == out_pt.activation_round
        )
        if not same:
            violations += 1
            if witness is None:
                witness = {"suite_seed": rng_seed, "trial": t, "seeds": seeds}
    return PropertyReport("alpha_zero_equivalence", trials, violations, witness)


def check_weight_cap(trials: int, rng_seed: int) -> PropertyReport:
    """Every amplified weight must equal min(1, base + alpha * I_source),
    stay within [base, 1], and come from an activated non-seed source."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    violations = 0
    witness = None
    for t in range(trials):
        rng = _trial_rng(rng_seed, t)
        graph, weights = _random_instance(rng)
        theta = ThresholdAssignment(1.0 - rng.random(graph.node_count))
        _, seeds = _random_sets(rng, graph.node_count)
        alpha = float(10.0 ** rng.uniform(-2.0, 0.5))
        outcome = run_pt(graph, weights, theta, seeds, alpha)
        bad = _cap_violations(graph, weights, outcome, alpha, set(seeds))
        if bad:
            violations += 1
            if witness is None:
                witness = {"suite_seed": rng_seed, "trial": t, "alpha": alpha, "detail": bad[0]}
    return PropertyReport("weight_cap", trials, violations, witness)


def _cap_violations(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    outcome: DiffusionOutcome,
    alpha: float,
    seed_set: set[int],
) -> list[str]:
    problems = []
    for rec in outcome.amplified_edges:
        base = float(weights.base[graph.edge_id(rec.source, rec.target)])
        if rec.source in seed_set:
            problems.append(f"seed {rec.source} amplified an edge")
            continue
        influence = outcome.received_influence.get(rec.source)
        if influence is None:
            problems.append(f"amplifying source {rec.source} has no received influence")
            continue
        expected = min(1.0, rec.old_weight + alpha * influence)
        if rec.old_weight != base:
            problems.append(f"edge ({rec.source},{rec.target}) old weight != base")
        if rec.new_weight != expected:
            problems.append(f"edge ({rec.source},{rec.target}) new weight != min rule")
        if not (base <= rec.new_weight <= 1.0):
            problems.append(f"edge ({rec.source},{rec.target}) outside [base, 1]")
    return problems


@dataclass(frozen=True)
class ReferenceEstimate(SpreadEstimate):
    target_met: bool = True


def reference_spread(
    graph: DirectedGraph,
    weights: EdgeWeightMap,
    model: ModelSpec,
    seeds: Iterable[int],
    precision_target: float,
    *,
    rng_seed: int = 0,
    thresholds: ThresholdAssignment | None = None,
    sim_cap: int = REFERENCE_SIM_CAP,
) -> ReferenceEstimate:
    """Monte Carlo on the naive engine until the standard error of the mean
    drops to ``precision_target`` (or the simulation cap is hit, which is
    reported via ``target_met``). Ground truth for estimator tests; use on
    small graphs only.
    """
    if precision_target <= 0:
        raise ValidationError("precision_target must be > 0")
    seeds = list(seeds)
    if thresholds is not None:
        out = run_reference(graph, weights, model, thresholds, seeds)
        return ReferenceEstimate(float(out.size), 0.0, 1, rng_seed, True)

    counts: list[int] = []
    batch = 200
    while True:
        for i in range(len(counts), len(counts) + batch):
            draw = np.random.default_rng((rng_seed, _REF_STREAM, i))
            theta = ThresholdAssignment(1.0 - draw.random(graph.node_count))
            counts.append(run_reference(graph, weights, model, theta, seeds).size)
        arr = np.asarray(counts, dtype=np.float64)
        std_error = float(arr.std(ddof=1) / np.sqrt(arr.size))
        if std_error <= precision_target:
            return ReferenceEstimate(float(arr.mean()), std_error, arr.size, rng_seed, True)
        if arr.size >= sim_cap:
            return ReferenceEstimate(float(arr.mean()), std_error, arr.size, rng_seed, False)
        batch = min(2 * batch, sim_cap - arr.size)


def run_all_checks(trials: int, rng_seed: int) -> list[PropertyReport]:
    """The full oracle suite, as exercised by the CLI and the service."""
    reports = []
    try:
        verify_counterexample()
        reports.append(PropertyReport("counterexample_spreads", 1, 0))
    except RuntimeError as exc:
        reports.append(PropertyReport("counterexample_spreads", 1, 1, {"error": str(exc)}))
    reports.append(check_alpha_zero_equivalence(trials, rng_seed))
    reports.append(check_monotonicity(ModelSpec.lt(), trials, rng_seed))
    for alpha in (0.01, 0.1, 1.0):
        reports.append(check_monotonicity(ModelSpec.pt(alpha), trials, rng_seed))
    reports.append(check_lt_dominated_by_pt(trials, rng_seed))
    reports.append(check_weight_cap(trials, rng_seed))
    return reports
