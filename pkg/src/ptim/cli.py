"""Command-line front end. Thin by design: parses arguments, dispatches to
the core package (or, with ``--server``, to a running service), prints
deterministic output, and maps package errors to exit code 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .diffusion import (
    ModelSpec,
    estimate_spread,
    run_model,
    sample_thresholds,
    write_trace_csv,
)
from .errors import PtimError, ValidationError
from .experiments import (
    exp1_seed_timeline,
    exp2_budget_curves,
    exp3_alpha_sweep,
    parse_config_file,
)
from .graph import (
    GraphFormat,
    GraphSource,
    export_edge_list,
    generate_erdos_renyi,
    load_edge_list,
    weighted_cascade,
)
from .influence import CelfResult, EstimatorConfig, celf, write_celf_csv
from .properties import counterexample_fixture, run_all_checks


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PtimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptim",
        description="Threshold-diffusion simulation, seed selection, and experiments",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="estimate spread of a seed set")
    _graph_flags(sim)
    _model_flags(sim)
    sim.add_argument("--seeds", required=True, help="comma-separated original node ids")
    sim.add_argument("--sims", type=int, default=None, help="simulations (default 1000; 1 with --fixture)")
    sim.add_argument("--rng-seed", type=int, default=0)
    sim.add_argument("--trace", type=Path, default=None, help="write a single-run trace CSV here")
    sim.add_argument("--workers", type=int, default=1)
    _server_flag(sim)
    sim.set_defaults(func=_cmd_simulate)

    mx = sub.add_parser("maximize", help="CELF seed selection under a budget")
    _graph_flags(mx)
    _model_flags(mx)
    mx.add_argument("--budget", type=int, required=True)
    mx.add_argument("--sims", type=int, default=None)
    mx.add_argument("--rng-seed", type=int, default=0)
    mx.add_argument("--out", type=Path, default=None, help="write the per-step CSV here")
    mx.add_argument("--fresh-samples", action="store_true",
                    help="disable the shared simulation pool (common random numbers)")
    mx.add_argument("--workers", type=int, default=1)
    _server_flag(mx)
    mx.set_defaults(func=_cmd_maximize)

    props = sub.add_parser("properties", help="run the formal-property oracle suites")
    props.add_argument("--trials", type=int, default=1000)
    props.add_argument("--rng-seed", type=int, default=0)
    props.add_argument("--workers", type=int, default=1)
    _server_flag(props)
    props.set_defaults(func=_cmd_properties)

    for name, runner in (("exp1", exp1_seed_timeline),
                         ("exp2", exp2_budget_curves),
                         ("exp3", exp3_alpha_sweep)):
        ex = sub.add_parser(name, help=f"run {name} from a config file")
        ex.add_argument("--config", type=Path, required=True)
        ex.set_defaults(func=_make_experiment_cmd(name, runner))

    gen = sub.add_parser("gen-er", help="generate a random graph edge list")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, required=True)
    gen.add_argument("--rng-seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True)
    _server_flag(gen)
    gen.set_defaults(func=_cmd_gen_er)

    val = sub.add_parser("validate", help="structural report for a graph file")
    _graph_flags(val)
    _server_flag(val)
    val.set_defaults(func=_cmd_validate)
    return parser


def _graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", type=Path, default=None, help="edge-list or csv file")
    p.add_argument("--format", choices=["edgelist", "csv"], default="edgelist")
    p.add_argument("--undirected", action="store_true",
                   help="duplicate each edge in both directions")
    p.add_argument("--fixture", choices=["counterexample"], default=None,
                   help="use the built-in 4-node fixture (nodes a,b,c,d = 0,1,2,3; "
                        "fixed thresholds)")


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["lt", "pt"], required=True)
    p.add_argument("--alpha", type=float, default=0.0)


def _server_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--server", default=None, metavar="URL",
                   help="route this command through a running service")


def _resolve_model(args) -> ModelSpec:
    return ModelSpec.lt() if args.model == "lt" else ModelSpec.pt(args.alpha)


def _load_graph(args):
    """(graph, weights, fixed_thresholds | None) from the graph flags."""
    if args.fixture is not None:
        if args.graph is not None:
            raise ValidationError("--fixture and --graph are mutually exclusive")
        fx = counterexample_fixture()
        return fx.graph, fx.weights, fx.thresholds
    if args.graph is None:
        raise ValidationError("one of --graph or --fixture is required")
    if args.format == "csv":
        if args.undirected:
            raise ValidationError("--undirected does not apply to csv input")
        fmt = GraphFormat.CSV_FIRST_TWO_COLUMNS
    else:
        fmt = (
            GraphFormat.EDGE_LIST_UNDIRECTED
            if args.undirected
            else GraphFormat.EDGE_LIST_DIRECTED
        )
    graph = load_edge_list(GraphSource(fmt, path=args.graph))
    return graph, weighted_cascade(graph), None


def _parse_seed_list(graph, text: str) -> list[int]:
    try:
        originals = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad --seeds value {text!r}") from None
    if not originals:
        raise ValidationError("--seeds must name at least one node")
    return [graph.to_dense(o) for o in originals]


# -- subcommands ------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    if args.server:
        return _client_simulate(args)
    graph, weights, fixed = _load_graph(args)
    model = _resolve_model(args)
    seeds = _parse_seed_list(graph, args.seeds)
    sims = args.sims if args.sims is not None else (1 if fixed is not None else 1000)
    est = estimate_spread(
        graph, weights, model, seeds, sims, args.rng_seed,
        thresholds=fixed, workers=args.workers,
    )
    print(f"graph: nodes={graph.node_count} directed_edges={graph.edge_count}")
    print(f"model: {model.label}")
    print(f"seeds: {args.seeds}")
    print(
        f"spread: mean={est.mean!r} std_error={est.std_error!r} "
        f"num_sims={est.num_sims} rng_seed={est.rng_seed}"
    )
    if args.trace is not None:
        thresholds = fixed if fixed is not None else sample_thresholds(graph, args.rng_seed)
        outcome = run_model(graph, weights, model, thresholds, seeds)
        with args.trace.open("w") as fp:
            write_trace_csv(graph, outcome, fp)
        print(f"trace: {args.trace}")
    return 0


def _cmd_maximize(args) -> int:
    if args.server:
        return _client_maximize(args)
    graph, weights, fixed = _load_graph(args)
    model = _resolve_model(args)
    if args.budget < 0:
        raise ValidationError("--budget must be >= 0")
    sims = args.sims if args.sims is not None else (1 if fixed is not None else 1000)
    est = EstimatorConfig(
        num_sims=sims,
        rng_seed=args.rng_seed,
        shared_sample_pool=not args.fresh_samples,
        fixed_thresholds=fixed,
        workers=args.workers,
    )
    result = celf(graph, weights, model, args.budget, est)
    _print_celf(graph, model, result)
    if args.out is not None:
        with args.out.open("w") as fp:
            write_celf_csv(graph, result, fp)
        print(f"csv: {args.out}")
    return 0


def _print_celf(graph, model: ModelSpec, result: CelfResult) -> None:
    seeds = ",".join(str(graph.to_original(v)) for v in result.seeds_in_order)
    final = result.cumulative_spread[-1] if result.cumulative_spread else 0.0
    print(f"model: {model.label}")
    print(f"seeds: {seeds}")
    print(f"spread: {final!r}")
    print(f"evaluations: {result.evaluations}")


def _cmd_properties(args) -> int:
    if args.server:
        return _client_properties(args)
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    reports = run_all_checks(args.trials, args.rng_seed)
    failures = 0
    for report in reports:
        print(report.summary_line())
        failures += report.violations
    print(f"total violations: {failures}")
    return 0 if failures == 0 else 1


def _make_experiment_cmd(name: str, runner):
    def cmd(args) -> int:
        config = parse_config_file(args.config)
        config.output_dir.mkdir(parents=True, exist_ok=True)
        runner(config)
        print(f"{name}: outputs written to {config.output_dir}")
        return 0

    return cmd


def _cmd_gen_er(args) -> int:
    if args.server:
        return _client_gen_er(args)
    graph = generate_erdos_renyi(args.n, args.p, args.rng_seed)
    args.out.write_text(export_edge_list(graph))
    print(
        f"generated: nodes={graph.node_count} undirected_edges={graph.edge_count // 2} "
        f"directed_edges={graph.edge_count}"
    )
    print(f"edge list: {args.out}")
    return 0


def _cmd_validate(args) -> int:
    if args.server:
        return _client_validate(args)
    graph, weights, _ = _load_graph(args)
    graph.validate()
    sums = weights.incoming_sums()
    with_in = graph.in_degree > 0
    max_dev = float(abs(sums[with_in] - 1.0).max()) if with_in.any() else 0.0
    print(f"nodes: {graph.node_count}")
    print(f"directed_edges: {graph.edge_count}")
    print(f"max_in_degree: {int(graph.in_degree.max()) if graph.node_count else 0}")
    print(f"isolated_nodes: {int((~with_in & (np.diff(graph.out_ptr) == 0)).sum())}")
    print("structure: ok (no self-loops, no duplicate edges, adjacency mirrored)")
    print(f"weighted_cascade_max_sum_deviation: {max_dev!r}")
    return 0


# -- thin HTTP client ---------------------------------------------------------------


def _client(url: str):
    import httpx

    return httpx.Client(base_url=url, timeout=600.0)


def _request_graph_id(client, args) -> str:
    if args.fixture is not None:
        return "fixture:counterexample"
    if args.graph is None:
        raise ValidationError("one of --graph or --fixture is required")
    fmt = (
        "csv-first-two-columns"
        if args.format == "csv"
        else ("edge-list-undirected" if args.undirected else "edge-list-directed")
    )
    resp = client.post("/graphs", json={"text": Path(args.graph).read_text(), "format": fmt})
    _raise_for_status(resp)
    return resp.json()["graph_id"]


def _raise_for_status(resp) -> None:
    if resp.status_code >= 400:
        detail = resp.json().get("detail", resp.text)
        raise ValidationError(f"server rejected request: {detail}")


def _client_simulate(args) -> int:
    with _client(args.server) as client:
        gid = _request_graph_id(client, args)
        sims = args.sims if args.sims is not None else (1 if args.fixture else 1000)
        resp = client.post(
            "/simulate",
            json={
                "graph_id": gid,
                "model": args.model,
                "alpha": args.alpha,
                "seeds": [int(t) for t in args.seeds.split(",") if t.strip()],
                "num_sims": sims,
                "rng_seed": args.rng_seed,
                "workers": args.workers,
            },
        )
        _raise_for_status(resp)
        body = resp.json()
    print(f"graph: nodes={body['node_count']} directed_edges={body['edge_count']}")
    print(f"model: {body['model_label']}")
    print(f"seeds: {args.seeds}")
    print(
        f"spread: mean={body['mean']!r} std_error={body['std_error']!r} "
        f"num_sims={body['num_sims']} rng_seed={body['rng_seed']}"
    )
    return 0


def _client_maximize(args) -> int:
    with _client(args.server) as client:
        gid = _request_graph_id(client, args)
        sims = args.sims if args.sims is not None else (1 if args.fixture else 1000)
        resp = client.post(
            "/maximize",
            json={
                "graph_id": gid,
                "model": args.model,
                "alpha": args.alpha,
                "k": args.budget,
                "num_sims": sims,
                "rng_seed": args.rng_seed,
                "shared_sample_pool": not args.fresh_samples,
                "workers": args.workers,
            },
        )
        _raise_for_status(resp)
        body = resp.json()
    print(f"model: {body['model_label']}")
    print(f"seeds: {','.join(str(s) for s in body['seeds'])}")
    final = body["cumulative_spread"][-1] if body["cumulative_spread"] else 0.0
    print(f"spread: {final!r}")
    print(f"evaluations: {body['evaluations']}")
    return 0


def _client_properties(args) -> int:
    with _client(args.server) as client:
        resp = client.post(
            "/properties", json={"trials": args.trials, "rng_seed": args.rng_seed}
        )
        _raise_for_status(resp)
        body = resp.json()
    failures = 0
    for rep in body["reports"]:
        suffix = (
            f" first_witness={rep['first_violation_witness']}"
            if rep.get("first_violation_witness")
            else ""
        )
        print(f"{rep['name']}: trials={rep['trials']} violations={rep['violations']}{suffix}")
        failures += rep["violations"]
    print(f"total violations: {failures}")
    return 0 if failures == 0 else 1


def _client_gen_er(args) -> int:
    with _client(args.server) as client:
        resp = client.post(
            "/graphs/generate-er",
            json={"n": args.n, "p": args.p, "rng_seed": args.rng_seed},
        )
        _raise_for_status(resp)
        body = resp.json()
        text = client.get(f"/graphs/{body['graph_id']}/export")
        _raise_for_status(text)
        args.out.write_text(text.text)
    print(
        f"generated: nodes={body['node_count']} undirected_edges={body['edge_count'] // 2} "
        f"directed_edges={body['edge_count']}"
    )
    print(f"edge list: {args.out}")
    return 0


def _client_validate(args) -> int:
    with _client(args.server) as client:
        gid = _request_graph_id(client, args)
        resp = client.get(f"/graphs/{gid}")
        _raise_for_status(resp)
        body = resp.json()
    print(f"nodes: {body['node_count']}")
    print(f"directed_edges: {body['edge_count']}")
    print(f"max_in_degree: {body['max_in_degree']}")
    print(f"isolated_nodes: {body['isolated_nodes']}")
    print("structure: ok (no self-loops, no duplicate edges, adjacency mirrored)")
    print(f"weighted_cascade_max_sum_deviation: {body['weighted_cascade_max_sum_deviation']!r}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
