"""Experiment runners: seed-selection timelines, budget-vs-influence curves,
and the amplification-parameter sweep with its smoothing and cubic fit.

Configs are flat ``key = value`` text files (see ``parse_config_file``).
Every run writes deterministic CSVs plus a ``*_metadata.json`` echoing the
resolved configuration, so reruns with the same config are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .diffusion import ModelSpec, ThresholdAssignment, estimate_spread
from .errors import DatasetUnavailableError, ValidationError
from .graph import (
    DirectedGraph,
    EdgeWeightMap,
    GraphFormat,
    GraphSource,
    generate_erdos_renyi,
    load_edge_list,
    weighted_cascade,
)
from .influence import EstimatorConfig, celf
from .properties import counterexample_fixture

EXP3_SEED_DERIVATION_SIMS = 200
EXP3_SEED_SET_SIZE = 10
SMOOTHING_WINDOW = 9


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs for the three experiment runners.

    Exactly one of ``dataset``, ``er_n``/``er_p``, or ``fixture`` selects
    the network. ``scale_factor`` < 1 shrinks the largest budget and the
    simulation count proportionally for desk-scale runs.
    """

    output_dir: Path
    dataset: Path | None = None
    format: GraphFormat = GraphFormat.EDGE_LIST_DIRECTED
    er_n: int | None = None
    er_p: float | None = None
    fixture: str | None = None
    models: tuple[ModelSpec, ...] = (ModelSpec.lt(), ModelSpec.pt(0.001), ModelSpec.pt(0.005))
    budgets: tuple[int, ...] = tuple(range(1, 61))
    num_sims: int = 1000
    rng_seed: int = 0
    scale_factor: float = 1.0
    alpha_start: float = 0.0001
    alpha_stop: float = 0.1
    alpha_step: float = 0.0001
    exp3_seeds: tuple[int, ...] | None = None
    workers: int = 1

    def __post_init__(self):
        picked = sum(
            [self.dataset is not None, self.er_n is not None, self.fixture is not None]
        )
        if picked != 1:
            raise ValidationError(
                "config must select exactly one of dataset, er_n/er_p, or fixture"
            )
        if (self.er_n is None) != (self.er_p is None):
            raise ValidationError("er_n and er_p must be given together")
        if not self.budgets or any(k <= 0 for k in self.budgets):
            raise ValidationError("budgets must be positive")
        if any(x >= y for x, y in zip(self.budgets, self.budgets[1:])):
            raise ValidationError("budgets must be strictly increasing")
        if self.num_sims < 1:
            raise ValidationError("num_sims must be >= 1")
        if not 0 < self.scale_factor <= 1:
            raise ValidationError("scale_factor must lie in (0, 1]")
        if min(self.alpha_start, self.alpha_stop, self.alpha_step) <= 0:
            raise ValidationError("alpha grid values must be > 0")

    # resolved desk-scale values
    @property
    def effective_num_sims(self) -> int:
        return max(1, round(self.num_sims * self.scale_factor))

    @property
    def effective_budgets(self) -> tuple[int, ...]:
        kmax = max(1, math.ceil(max(self.budgets) * self.scale_factor))
        kept = tuple(k for k in self.budgets if k <= kmax)
        return kept if kept else (kmax,)


_CONFIG_KEYS = {
    "dataset", "format", "er_n", "er_p", "fixture", "models", "budgets",
    "num_sims", "rng_seed", "scale_factor", "output_dir", "alpha_start",
    "alpha_stop", "alpha_step", "exp3_seeds", "workers",
}


def parse_model_list(text: str) -> tuple[ModelSpec, ...]:
    """``lt, pt:0.001, pt:0.005`` -> model specs."""
    models = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if item == "lt":
            models.append(ModelSpec.lt())
        elif item.startswith("pt:"):
            models.append(ModelSpec.pt(float(item[3:])))
        else:
            raise ValidationError(f"bad model entry {item!r} (use 'lt' or 'pt:<alpha>')")
    if not models:
        raise ValidationError("empty model list")
    return tuple(models)


def parse_budgets(text: str) -> tuple[int, ...]:
    """Either a range ``1-60`` or an explicit list ``1,5,10``."""
    text = text.strip()
    if "-" in text and "," not in text:
        lo_s, hi_s = text.split("-", 1)
        lo, hi = int(lo_s), int(hi_s)
        if lo > hi:
            raise ValidationError(f"bad budget range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def parse_config_file(path: str | Path) -> ExperimentConfig:
    """Flat ``key = value`` lines; '#' starts a comment; unknown keys fail."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in raw:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    if "output_dir" not in raw:
        raise ValidationError(f"{path}: config must set output_dir")

    kwargs: dict = {"output_dir": Path(raw.pop("output_dir"))}
    if "dataset" in raw:
        kwargs["dataset"] = Path(raw.pop("dataset"))
    if "format" in raw:
        try:
            kwargs["format"] = GraphFormat(raw.pop("format"))
        except ValueError as exc:
            raise ValidationError(f"bad format: {exc}") from None
    for key, conv in (
        ("er_n", int), ("er_p", float), ("num_sims", int), ("rng_seed", int),
        ("scale_factor", float), ("alpha_start", float), ("alpha_stop", float),
        ("alpha_step", float), ("workers", int),
    ):
        if key in raw:
            try:
                kwargs[key] = conv(raw.pop(key))
            except ValueError:
                raise ValidationError(f"config key {key} is not a valid number") from None
    if "fixture" in raw:
        kwargs["fixture"] = raw.pop("fixture")
    if "models" in raw:
        kwargs["models"] = parse_model_list(raw.pop("models"))
    if "budgets" in raw:
        kwargs["budgets"] = parse_budgets(raw.pop("budgets"))
    if "exp3_seeds" in raw:
        kwargs["exp3_seeds"] = tuple(
            int(tok) for tok in raw.pop("exp3_seeds").split(",") if tok.strip()
        )
    return ExperimentConfig(**kwargs)


# -- network resolution ---------------------------------------------------------


@dataclass(frozen=True)
class ResolvedNetwork:
    label: str
    graph: DirectedGraph
    weights: EdgeWeightMap
    fixed_thresholds: ThresholdAssignment | None = None


def resolve_network(config: ExperimentConfig) -> ResolvedNetwork:
    if config.fixture is not None:
        if config.fixture != "counterexample":
            raise ValidationError(f"unknown fixture {config.fixture!r}")
        fx = counterexample_fixture()
        return ResolvedNetwork("fixture:counterexample", fx.graph, fx.weights, fx.thresholds)
    if config.er_n is not None:
        graph = generate_erdos_renyi(config.er_n, config.er_p, config.rng_seed)
        label = f"er_n={config.er_n}_p={config.er_p:g}"
        return ResolvedNetwork(label, graph, weighted_cascade(graph))
    assert config.dataset is not None
    if not config.dataset.exists():
        raise DatasetUnavailableError(
            f"dataset file not found: {config.dataset} (supply the network file; "
            "datasets are never downloaded automatically)"
        )
    graph = load_edge_list(GraphSource(config.format, path=config.dataset))
    return ResolvedNetwork(config.dataset.name, graph, weighted_cascade(graph))


def _estimator(config: ExperimentConfig, net: ResolvedNetwork) -> EstimatorConfig:
    return EstimatorConfig(
        num_sims=config.effective_num_sims,
        rng_seed=config.rng_seed,
        shared_sample_pool=True,
        fixed_thresholds=net.fixed_thresholds,
        workers=config.workers,
    )


def _write_metadata(config: ExperimentConfig, net: ResolvedNetwork, name: str, extra: dict) -> None:
    meta = {
        "experiment": name,
        "network": net.label,
        "node_count": net.graph.node_count,
        "directed_edge_count": net.graph.edge_count,
        "models": [m.label for m in config.models],
        "budgets": list(config.effective_budgets),
        "num_sims": config.effective_num_sims,
        "rng_seed": config.rng_seed,
        "scale_factor": config.scale_factor,
        "er_convention": "undirected pairs duplicated into both directions"
        if config.er_n is not None
        else None,
        **extra,
    }
    path = config.output_dir / f"{name}_metadata.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# -- experiment 1: seed-selection timeline ---------------------------------------


@dataclass(frozen=True)
class Exp1Result:
    lt_seeds: list[int]
    pt_seeds: list[int]
    position_matches: list[bool]
    overlap: list[int]


def exp1_seed_timeline(config: ExperimentConfig) -> Exp1Result:
    """CELF seed order under LT vs PT on one network; original node ids."""
    net = resolve_network(config)
    lt_models = [m for m in config.models if m.kind == "lt"]
    pt_models = [m for m in config.models if m.kind == "pt"]
    if not lt_models or not pt_models:
        raise ValidationError("exp1 needs an lt entry and a pt entry in models")
    budget = max(config.effective_budgets)
    est = _estimator(config, net)
    lt_res = celf(net.graph, net.weights, lt_models[0], budget, est)
    pt_res = celf(net.graph, net.weights, pt_models[0], budget, est)
    lt_seeds = [net.graph.to_original(v) for v in lt_res.seeds_in_order]
    pt_seeds = [net.graph.to_original(v) for v in pt_res.seeds_in_order]
    matches = [a == b for a, b in zip(lt_seeds, pt_seeds)]
    overlap = sorted(set(lt_seeds) & set(pt_seeds))

    config.output_dir.mkdir(parents=True, exist_ok=True)
    out = config.output_dir / "exp1_timeline.csv"
    with out.open("w") as fp:
        fp.write("position,lt_node,pt_node,match\n")
        for i, (a, b) in enumerate(zip(lt_seeds, pt_seeds), start=1):
            fp.write(f"{i},{a},{b},{int(a == b)}\n")
    _write_metadata(
        config, net, "exp1",
        {
            "budget": budget,
            "pt_alpha": pt_models[0].alpha,
            "overlap_size": len(overlap),
            "overlap": overlap,
        },
    )
    return Exp1Result(lt_seeds, pt_seeds, matches, overlap)


# -- experiment 2: influence vs budget --------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    k: int
    mean_influence: float
    std_error: float
    model: str


def exp2_budget_curves(config: ExperimentConfig) -> dict[str, list[CurvePoint]]:
    """One CELF run per model; the cumulative spread at each budget is the
    curve value (greedy prefixes are shared across budgets)."""
    net = resolve_network(config)
    est = _estimator(config, net)
    kmax = max(config.effective_budgets)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    curves: dict[str, list[CurvePoint]] = {}
    for model in config.models:
        result = celf(net.graph, net.weights, model, kmax, est)
        points = []
        for k in config.effective_budgets:
            idx = min(k, len(result.seeds_in_order)) - 1
            points.append(
                CurvePoint(
                    k=k,
                    mean_influence=result.cumulative_spread[idx],
                    std_error=result.spread_std_error[idx],
                    model=model.label,
                )
            )
        curves[model.label] = points
        out = config.output_dir / f"exp2_{_file_label(model)}.csv"
        with out.open("w") as fp:
            fp.write("k,mean,stderr\n")
            for pt in points:
                fp.write(f"{pt.k},{pt.mean_influence!r},{pt.std_error!r}\n")
    _write_metadata(config, net, "exp2", {"kmax": kmax})
    return curves


def _file_label(model: ModelSpec) -> str:
    return "lt" if model.kind == "lt" else f"pt_{model.alpha:g}"


# -- experiment 3: alpha sweep ------------------------------------------------------


@dataclass(frozen=True)
class Exp3Result:
    alphas: np.ndarray
    raw: np.ndarray
    smoothed: np.ndarray
    fit_coefficients: np.ndarray
    seed_set: list[int]


def exp3_alpha_sweep(config: ExperimentConfig) -> Exp3Result:
    """Spread of one fixed seed set as alpha varies, smoothed and cubic-fit."""
    net = resolve_network(config)
    seeds_dense = _exp3_seed_set(config, net)
    steps = int(math.floor((config.alpha_stop - config.alpha_start) / config.alpha_step + 1e-9))
    alphas = config.alpha_start + config.alpha_step * np.arange(steps + 1)
    sims = config.effective_num_sims
    raw = np.empty(alphas.size)
    for i, alpha in enumerate(alphas):
        raw[i] = estimate_spread(
            net.graph, net.weights, ModelSpec.pt(float(alpha)), seeds_dense,
            sims, config.rng_seed,
            thresholds=net.fixed_thresholds, workers=config.workers,
        ).mean
    smoothed = moving_average(raw, SMOOTHING_WINDOW)
    coeffs = cubic_fit(zip(alphas, smoothed))

    config.output_dir.mkdir(parents=True, exist_ok=True)
    with (config.output_dir / "exp3_sweep.csv").open("w") as fp:
        fp.write("alpha,raw,smoothed\n")
        for a, r, s in zip(alphas, raw, smoothed):
            fp.write(f"{a!r},{r!r},{s!r}\n")
    with (config.output_dir / "exp3_fit.csv").open("w") as fp:
        fp.write("c3,c2,c1,c0\n")
        fp.write(",".join(repr(float(c)) for c in coeffs) + "\n")
    seed_set_original = [net.graph.to_original(v) for v in seeds_dense]
    _write_metadata(
        config, net, "exp3",
        {
            "alpha_grid": [float(alphas[0]), float(alphas[-1]), config.alpha_step],
            "seed_set": seed_set_original,
            "seed_set_derivation": "explicit from config"
            if config.exp3_seeds is not None
            else f"first {EXP3_SEED_SET_SIZE} CELF-LT seeds at {EXP3_SEED_DERIVATION_SIMS} sims",
        },
    )
    return Exp3Result(alphas, raw, smoothed, coeffs, seed_set_original)


def _exp3_seed_set(config: ExperimentConfig, net: ResolvedNetwork) -> list[int]:
    if config.exp3_seeds is not None:
        return [net.graph.to_dense(s) for s in config.exp3_seeds]
    est = EstimatorConfig(
        num_sims=max(1, round(EXP3_SEED_DERIVATION_SIMS * config.scale_factor)),
        rng_seed=config.rng_seed,
        shared_sample_pool=True,
        fixed_thresholds=net.fixed_thresholds,
        workers=config.workers,
    )
    size = min(EXP3_SEED_SET_SIZE, net.graph.node_count)
    return celf(net.graph, net.weights, ModelSpec.lt(), size, est).seeds_in_order


# -- post-processing -----------------------------------------------------------------


def moving_average(series: Sequence[float] | np.ndarray, window: int) -> np.ndarray:
    """Centered mean; the window truncates to available points at the ends."""
    if window < 1 or window % 2 == 0:
        raise ValidationError("window must be an odd integer >= 1")
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError("series must be one-dimensional")
    if arr.size == 0:
        return arr.copy()
    half = window // 2
    return np.array(
        [arr[max(0, i - half) : i + half + 1].mean() for i in range(arr.size)]
    )


def cubic_fit(points: Iterable[tuple[float, float]]) -> np.ndarray:
    """Ordinary least-squares degree-3 fit; coefficients highest degree first."""
    pts = np.asarray(list(points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if np.unique(x).size < 4:
        raise ValidationError("cubic fit needs at least 4 distinct x values")
    return np.polyfit(x, y, 3)
