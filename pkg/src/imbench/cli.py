"""Command-line interface: ``imbench <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 resource cap, 4 algorithm failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .algorithms import memory_cap_slots
from .algorithms.rrsets import SLOT_BYTES
from .bench import (ALGORITHM_NAMES, FixedSeeds, flawed_bar, flawed_compare, flip_pair,
                    mock_from_dict, real_algorithm, shared_seed_experiment, sound_compare,
                    speedup_pair, sweep)
from .bench.compare import curves_csv
from .concentration import TABLE1_EPSILONS, sample_size_table, table_csv
from .config import RunConfig
from .diffusion import estimate_spread
from .errors import AlgorithmError, ImbenchError, ParseError, ResourceCapError
from .exact import exact_spread
from .graph import (CounterexampleLayout, WeightScheme, assign_weights, counterexample_graph,
                    parse_edge_list, parse_generator, read_graph_csv)
from .rng import RngStream, fresh_seed

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_ALGORITHM = 0, 2, 3, 4
# streams under the master seed
GRAPH_STREAM, RUN_STREAM = 0, 1
# rough bytes per node plus arc of an in-memory graph, for the size guard
_GRAPH_BYTES_PER_ITEM = 48
# closed-form upper bound on mean - sd for the counterexample root, plus slack
BAR_BOUND, BAR_SLACK = 1.5, 0.1


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# --------------------------------------------------------------------------
# configuration


_CONFIG_KEYS = ("graph", "generator", "scheme", "model", "k", "algorithm", "params", "rounds",
                "budget", "seed", "output", "format")

_DEFAULTS = {"model": "IC", "rounds": 10_000, "budget": 3600.0}


def _config(args: argparse.Namespace, name: str) -> RunConfig:
    base = RunConfig(subcommand=name, **{k: v for k, v in _DEFAULTS.items()})
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read config {args.config}: {exc.strerror}") from None
        loaded = RunConfig.from_json(text).to_dict()
        present = json.loads(text)
        base = base.merged({k: loaded[k] for k in present if k not in ("version", "subcommand")})
    over = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    if getattr(args, "undirected", False):
        over["directed"] = False
    cfg = base.merged(over)
    cfg.model = cfg.model.upper()
    return cfg


def _ensure_seed(cfg: RunConfig) -> RngStream:
    if cfg.seed is None:
        cfg.seed = fresh_seed()
        _note(f"seed: {cfg.seed}  (generated; pass --seed {cfg.seed} to reproduce)")
    return RngStream(int(cfg.seed))


def _load_graph(cfg: RunConfig, rng: RngStream | None):
    if bool(cfg.graph) == bool(cfg.generator):
        raise ParseError("give exactly one of --graph or --generate")
    if cfg.graph:
        path = Path(cfg.graph)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read graph {path}: {exc.strerror}") from None
        if text.lstrip().startswith("src,dst,p"):
            g = read_graph_csv(text, name=path.stem)
        else:
            g, report = parse_edge_list(text, directed=cfg.directed, name=path.stem)
            if report.contained_zero:
                _note("warning: the input uses node label 0; it is kept as an ordinary label")
    else:
        g = _generate(cfg.generator, rng)
    if cfg.scheme:
        g = assign_weights(g, WeightScheme.parse(cfg.scheme))
    elif not g.weighted:
        raise ParseError("the graph has no probabilities; pass --scheme (uniform:P, wc, lt-uniform, lt-parallel)")
    return g


def _counterexample_guard(n: int) -> None:
    lay = CounterexampleLayout(n)
    items = lay.cliques.stop * 2
    need = items * _GRAPH_BYTES_PER_ITEM
    cap = memory_cap_slots() * SLOT_BYTES
    if need > cap:
        raise ResourceCapError(f"counterexample n={n} needs about {need} bytes, above the cap of "
                               f"{cap} bytes (set IMBENCH_MEMORY_CAP to raise it)")


# --------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    cfg = _config(args, "ingest")
    try:
        text = Path(args.path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {args.path}: {exc.strerror}") from None
    g, report = parse_edge_list(text, directed=cfg.directed, name=Path(args.path).stem)
    if cfg.scheme:
        g = assign_weights(g, WeightScheme.parse(cfg.scheme))
    _emit(g.to_csv(labels=args.labels, id_offset=args.id_offset), cfg.output)
    if report.contained_zero:
        _note("warning: contained_zero=true; label 0 is an ordinary node, ids are renumbered 0..n-1")
    info = {"config": cfg.to_dict(), "normalization": report.to_dict(),
            "node_count": g.node_count, "arc_count": g.arc_count}
    if args.report:
        Path(args.report).write_text(json.dumps(info, indent=2))
    else:
        _note(json.dumps(info["normalization"]))
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _config(args, "generate")
    cfg.generator = args.spec
    rng = _ensure_seed(cfg) if not args.spec.startswith("counterexample") else None
    g = _load_graph(cfg, rng) if cfg.scheme else _generate(cfg.generator, rng)
    _emit(g.to_csv(), cfg.output)
    return EXIT_OK


def _generate(spec: str, rng: RngStream | None):
    kind, _, rest = spec.partition(":")
    if kind == "counterexample":
        args = dict(item.split("=", 1) for item in rest.split(",") if "=" in item)
        if "n" in args:
            _counterexample_guard(int(float(args["n"])))
    return parse_generator(spec, (rng or RngStream(0)).child(GRAPH_STREAM))


def cmd_simulate(args) -> int:
    cfg = _config(args, "simulate")
    cfg.extra["seeds"] = args.seeds
    rng = _ensure_seed(cfg)
    g = _load_graph(cfg, rng)
    seeds = [g.id_map[s] if args.original_labels else s for s in args.seeds]
    est = estimate_spread(g, cfg.model, seeds, int(cfg.rounds), rng.child(RUN_STREAM))
    out = {"config": cfg.to_dict(), "seeds": seeds, "estimate": est.to_dict()}
    _emit(json.dumps(out, indent=2), cfg.output)
    return EXIT_OK


def _param(cfg: RunConfig):
    if not cfg.params:
        return None
    return cfg.params[0]


def cmd_select(args) -> int:
    cfg = _config(args, "select")
    if cfg.k is None or cfg.algorithm is None:
        raise ParseError("select needs --k and --algorithm")
    rng = _ensure_seed(cfg)
    g = _load_graph(cfg, rng)
    algo = real_algorithm(cfg.algorithm)
    param = _param(cfg)
    if param is None and cfg.algorithm.lower() in ("greedy", "celf", "celf++"):
        param = cfg.rounds
    if param is None and cfg.algorithm.lower() not in ("random", "degree"):
        raise ParseError(f"{cfg.algorithm} needs --param (rounds, epsilon or theta)")
    seeds, stats = _run_algorithm(lambda: algo.select(g, cfg.model, int(cfg.k), param,
                                                      rng.child(RUN_STREAM)))
    _emit(seeds.to_csv(g), cfg.output)
    if args.report:
        Path(args.report).write_text(json.dumps({"config": cfg.to_dict(), "seeds": seeds.to_dict(),
                                                 "stats": stats.to_dict()}, indent=2, default=str))
    return EXIT_OK


def _run_algorithm(fn: Callable):
    try:
        return fn()
    except (ImbenchError, ValueError):
        raise
    except Exception as exc:  # noqa: BLE001
        raise AlgorithmError(str(exc)) from exc


def _write_report(prefix: str | None, doc: dict, csvs: dict[str, str], summary: str) -> None:
    print(summary)
    if prefix:
        Path(f"{prefix}.json").write_text(json.dumps(doc, indent=2, default=str))
        for name, text in csvs.items():
            Path(f"{prefix}.{name}.csv").write_text(text)
        _note(f"wrote {prefix}.json and {', '.join(f'{prefix}.{n}.csv' for n in csvs)}")


def cmd_sweep(args) -> int:
    cfg = _config(args, "sweep")
    if cfg.k is None or cfg.algorithm is None or not cfg.params:
        raise ParseError("sweep needs --k, --algorithm and --grid")
    rng = _ensure_seed(cfg)
    g = _load_graph(cfg, rng)
    algo = real_algorithm(cfg.algorithm)
    curve = _run_algorithm(lambda: sweep(algo, g, cfg.model, int(cfg.k), cfg.params,
                                         float(cfg.budget), int(cfg.rounds), rng.child(RUN_STREAM)))
    doc = {"config": cfg.to_dict(), "curve": curve.to_dict()}
    lines = [f"{curve.algorithm} on {curve.instance}, k={curve.k}"]
    for p in curve.points:
        spread = "truncated" if p.truncated else f"{p.spread.mean:.4f} (sd {p.spread.sample_sd:.4f})"
        lines.append(f"  param={p.parameter:g} time={p.wall_time:.4g}s spread={spread}")
    if curve.empty_reason:
        lines.append(f"  empty curve: {curve.empty_reason}")
    _write_report(cfg.output, doc, {"curves": curves_csv([curve])}, "\n".join(lines))
    return EXIT_OK


def _bench_algorithms(cfg: RunConfig):
    spec = cfg.extra.get("algorithms")
    if spec is None:
        raise ParseError("bench config needs extra.algorithms (names or mock definitions)")
    out = []
    for item in spec:
        if isinstance(item, dict):
            out.append(mock_from_dict(item))
        elif item in ("flip-pair", "speedup-pair"):
            out.extend(flip_pair() if item == "flip-pair" else speedup_pair())
        else:
            out.append(real_algorithm(str(item)))
    return out


def cmd_bench(args) -> int:
    cfg = _config(args, "bench")
    pipeline = cfg.extra.get("pipeline", "compare")
    algos = _bench_algorithms(cfg)
    mocks_only = all(getattr(a, "declares_time", False) for a in algos)
    rng = _ensure_seed(cfg)
    g = None if mocks_only else _load_graph(cfg, rng)
    k = int(cfg.k or 1)
    run_rng = rng.child(RUN_STREAM)
    if pipeline == "shared-seed":
        if len(algos) != 2:
            raise ParseError("the shared-seed pipeline compares exactly two algorithms")
        param = cfg.params or [cfg.rounds]
        report = _run_algorithm(lambda: shared_seed_experiment(
            algos[0], algos[1], g, cfg.model, k, param if len(param) == 2 else param[0],
            int(cfg.extra.get("run_count", 10)), run_rng, cfg.extra.get("cost", "wall"),
            config=cfg.to_dict()))
        doc = {"config": cfg.to_dict(), "shared_seed": report.to_dict()}
        _write_report(cfg.output, doc, {"ttest": report.ttest_csv()}, report.summary())
        return EXIT_OK
    if pipeline != "compare":
        raise ParseError(f"unknown bench pipeline {pipeline!r}")
    grids = cfg.extra.get("grids", {})
    curves = []
    for i, a in enumerate(algos):
        grid = grids.get(a.name) or (a.grid if hasattr(a, "grid") else cfg.params)
        if not grid:
            raise ParseError(f"no parameter grid for {a.name}")
        curves.append(_run_algorithm(lambda: sweep(a, g, cfg.model, k, grid, float(cfg.budget),
                                                   int(cfg.rounds), run_rng.child(i))))
    measured = [c for c in curves if not c.is_empty]
    target = cfg.extra.get("target")
    if target is None:
        # the highest bar every algorithm can reach
        target = min((max(p.spread.mean for p in c.measured) for c in measured), default=math.inf)
    sound = sound_compare(curves, float(target), config=cfg.to_dict())
    flawed = flawed_compare(curves, int(cfg.extra.get("flawed_rounds", 10_000)), config=cfg.to_dict())
    flips = sound.ranking != flawed.ranking
    doc = {"config": cfg.to_dict(), "sound": sound.to_dict(), "flawed": flawed.to_dict(),
           "ranking_flips": flips}
    summary = "\n".join([sound.summary(), flawed.summary(),
                         f"verdict: rankings {'differ' if flips else 'agree'} "
                         f"(sound {sound.ranking} vs flawed {flawed.ranking})"])
    _write_report(cfg.output, doc, {"curves": sound.curves_csv(), "sound_times": sound.times_csv(),
                                    "flawed_times": flawed.times_csv()}, summary)
    return EXIT_OK


def cmd_table1(args) -> int:
    rows = sample_size_table(args.mu, args.sigma, args.delta, args.epsilons or TABLE1_EPSILONS)
    _emit(table_csv(rows), args.output)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    cfg = _config(args, "counterexample")
    n, r = args.n, args.r
    if n < 2:
        raise ParseError("counterexample needs --n >= 2")
    if r < 1000:
        raise ParseError("counterexample needs --r >= 1000 rounds")
    cfg.extra.update(n=n, r=r, exact=args.exact)
    rng = _ensure_seed(cfg)
    _counterexample_guard(n)
    g = counterexample_graph(n)
    lay = CounterexampleLayout(n)
    mu, sd = 1.0 + n, n * math.sqrt(1.0 - 1.0 / (2 * n))
    curve = sweep(FixedSeeds((lay.root,)), g, "IC", 1, [0], math.inf, r, rng.child(RUN_STREAM),
                  warmup=False, instance=g.name)
    est = curve.points[0].spread
    bar = flawed_bar(curve, r)
    clique_node = lay.clique(0)[0]
    clique_spread = exact_spread(g, "IC", [clique_node])
    out = {"config": cfg.to_dict(), "n": n, "rounds": r,
           "closed_form": {"mean": mu, "sd": sd, "bar_upper": BAR_BOUND},
           "estimate": est.to_dict(), "flawed_bar": bar.to_dict(),
           "clique_singleton_exact_spread": clique_spread}
    if args.exact:
        out["exact_root_spread"] = exact_spread(g, "IC", [lay.root])
    ok = bar.value <= BAR_BOUND + BAR_SLACK
    out["verdict"] = "PASS" if ok else "FAIL"
    lines = [f"counterexample n={n}, r={r}",
             f"  root spread: estimate {est.mean:.4f} +- {est.std_error:.4f} (closed form {mu:g})",
             f"  root sd:     estimate {est.sample_sd:.4f} (closed form {sd:.4f})",
             f"  flawed bar mu*-sd*: {bar.value:.4f} (closed form {mu - sd:.4f} <= 1.5)",
             f"  2-clique singleton spread: {clique_spread:g}"]
    if args.exact:
        lines.append(f"  exact root spread: {out['exact_root_spread']:.12g}")
    lines.append(f"  {out['verdict']}: mu*-sd* = {bar.value:.4f} <= {BAR_BOUND} (+{BAR_SLACK} sampling slack), "
                 f"below the spread {clique_spread:g} of any clique node")
    print("\n".join(lines))
    if cfg.output:
        Path(cfg.output).write_text(json.dumps(out, indent=2))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", help="edge list or src,dst,p dump")
    p.add_argument("--generate", dest="generator",
                   help="counterexample:n=N | random:n=N,m=M | powerlaw:n=N,m=M")
    p.add_argument("--scheme", help="uniform:P | wc | lt-uniform | lt-parallel")
    p.add_argument("--undirected", action="store_true", help="each edge-list line is two arcs")
    p.add_argument("--model", type=str.upper, choices=["IC", "LT"])


def _common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--config", help="RunConfig JSON; flags override its fields")
    if seed:
        p.add_argument("--seed", type=int, help="master seed (generated and printed if omitted)")
    p.add_argument("-o", "--output", help="output path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imbench", description="Influence maximization benchmarking toolkit.")
    parser.add_argument("--version", action="version", version=f"imbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize an edge list into a canonical src,dst,p dump")
    p.add_argument("path")
    p.add_argument("--scheme")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--labels", choices=["internal", "original"], default="internal")
    p.add_argument("--id-offset", type=int, default=0, help="added to internal ids in the dump")
    p.add_argument("--report", help="write the normalization report JSON here")
    _common(p, seed=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("generate", help="write a generated graph")
    p.add_argument("spec", help="counterexample:n=N | random:n=N,m=M | powerlaw:n=N,m=M")
    p.add_argument("--scheme")
    _common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="Monte-Carlo spread of a seed set")
    _graph_flags(p)
    p.add_argument("--seeds", type=_ints, required=True, help="comma-separated node ids")
    p.add_argument("--original-labels", action="store_true", help="--seeds are input labels")
    p.add_argument("--rounds", type=int)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("select", help="select seeds with one algorithm")
    _graph_flags(p)
    p.add_argument("--k", type=int)
    p.add_argument("--algorithm", choices=ALGORITHM_NAMES)
    p.add_argument("--param", dest="params", type=lambda s: [float(s)],
                   help="rounds (greedy family), epsilon (imm, timplus) or theta (ris)")
    p.add_argument("--rounds", type=int, help="Monte-Carlo rounds for the greedy family")
    p.add_argument("--report", help="write seeds and selection stats as JSON here")
    _common(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("sweep", help="tradeoff curve of one algorithm over a parameter grid")
    _graph_flags(p)
    p.add_argument("--k", type=int)
    p.add_argument("--algorithm", choices=ALGORITHM_NAMES)
    p.add_argument("--grid", dest="params", type=_floats, help="comma-separated parameter values")
    p.add_argument("--budget", type=float, help="seconds per grid point")
    p.add_argument("--rounds", type=int, help="evaluation rounds per point")
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="run a configured comparison pipeline")
    _graph_flags(p)
    p.add_argument("--k", type=int)
    p.add_argument("--budget", type=float)
    p.add_argument("--rounds", type=int)
    _common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("table1", help="Chebyshev vs Chernoff sample sizes")
    p.add_argument("--epsilons", type=_floats)
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("counterexample", help="check the mean-minus-sd bar on the counterexample graph")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--r", type=int, default=10_000)
    p.add_argument("--exact", action="store_true", help="also compute the root spread exactly")
    _common(p)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except ResourceCapError as exc:
        _note(f"error: {exc}")
        return EXIT_CAP
    except AlgorithmError as exc:
        _note(f"error: {exc}")
        return EXIT_ALGORITHM
    except (ParseError, ValueError, KeyError, OSError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
