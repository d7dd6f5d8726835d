"""Command-line benchmark harness.

Subcommands:
  synth  write a synthetic Zipf edge-list file
  build  one build-time run (init time, total time, edges/second)
  sweep  edge-query accuracy sweep over memory budgets (ARE/NEQ/PEQ)
  plan   dump a kMatrix partition plan for audit

Exit codes: 0 success, 1 config error, 2 I/O error, 3 infeasible budget.
"""

import argparse
import sys

from kmatrix import bench
from kmatrix.partitioner import InfeasibleBudgetError
from kmatrix.partitioner import estimate_stats
from kmatrix.partitioner import plan as build_plan
from kmatrix.stream import reservoir_sample, synth_zipf


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _sketch_list(text: str) -> list[str]:
    kinds = list(bench.SKETCH_KINDS) if text == "all" else text.split(",")
    for k in kinds:
        if k not in bench.SKETCH_KINDS:
            raise ConfigError(f"unknown sketch {k!r}; choose from {bench.SKETCH_KINDS}")
    return kinds


# --config file keys share names (underscored) and types with the flags
_CONFIG_TYPES = {
    "sketch": _sketch_list,
    "dataset": str,
    "memory_kb": _int_list,
    "depth": int,
    "sample_size": int,
    "queries": int,
    "seed": int,
    "g0": int,
    "residual_fraction": float,
    "min_width": int,
    "max_partitions": int,
    "prefilter_fraction": float,
    "out": str,
}


def _read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = _CONFIG_TYPES[key](raw.strip())
    return values


def _add_common(p: _Parser, budgets_default):
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--sketch", dest="sketch", type=_sketch_list, default=list(bench.SKETCH_KINDS),
                   help="comma-separated sketch kinds, or 'all'")
    p.add_argument("--dataset", required=False, default="",
                   help="edge-list path (.gz ok) or zipf:<nodes>:<edges>:<skew>[:<seed>]")
    p.add_argument("--memory-kb", dest="memory_kb", type=_int_list, default=list(budgets_default))
    p.add_argument("--depth", type=int, default=bench.DEFAULT_DEPTH)
    p.add_argument("--sample-size", dest="sample_size", type=int, default=bench.DEFAULT_SAMPLE)
    p.add_argument("--queries", type=int, default=bench.DEFAULT_QUERIES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--g0", type=int, default=bench.DEFAULT_G0)
    p.add_argument("--residual-fraction", dest="residual_fraction", type=float, default=0.10)
    p.add_argument("--min-width", dest="min_width", type=int, default=4)
    p.add_argument("--max-partitions", dest="max_partitions", type=int, default=64)
    p.add_argument("--prefilter-fraction", dest="prefilter_fraction", type=float, default=0.0)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def make_parser() -> _Parser:
    parser = _Parser(prog="kmatrix-bench",
                     description="Streaming graph sketch benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="write a synthetic Zipf edge list")
    p_synth.add_argument("--nodes", type=int, required=True)
    p_synth.add_argument("--edges", type=int, required=True)
    p_synth.add_argument("--skew", type=float, default=1.2)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", default="-")

    p_build = sub.add_parser("build", help="build-time experiment")
    _add_common(p_build, [bench.BUILD_BUDGET_KB])

    p_sweep = sub.add_parser("sweep", help="edge-query accuracy sweep")
    _add_common(p_sweep, bench.SWEEP_BUDGETS_KB)

    p_plan = sub.add_parser("plan", help="dump a kMatrix partition plan")
    _add_common(p_plan, [512])
    p_plan.add_argument("--dump-plan", dest="dump_plan", default="-",
                        help="plan report path, '-' for stdout")

    return parser


def _apply_config_file(parser: _Parser, argv: list[str]):
    """Pre-scan for --config and install its values as defaults."""
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        values = _read_config(known.config)
        if "sketch" in values:
            values["sketch"] = values.pop("sketch")
        for sp in parser._subparsers._group_actions[0].choices.values():
            sp.set_defaults(**{k: v for k, v in values.items()
                               if any(a.dest == k for a in sp._actions)})


def _config_from_args(args) -> bench.ExperimentConfig:
    if not args.dataset:
        raise ConfigError("--dataset is required")
    return bench.ExperimentConfig(
        sketches=args.sketch,
        dataset=args.dataset,
        memory_kb=args.memory_kb,
        depth=args.depth,
        sample_size=args.sample_size,
        queries=args.queries,
        seed=args.seed,
        g0=args.g0,
        residual_fraction=args.residual_fraction,
        min_width=args.min_width,
        max_partitions=args.max_partitions,
        prefilter_fraction=args.prefilter_fraction,
    )


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _emit(rows, path: str):
    sink, close = _open_out(path)
    try:
        bench.emit_csv(rows, sink)
    finally:
        if close:
            sink.close()


def _cmd_synth(args) -> int:
    stream = synth_zipf(args.nodes, args.edges, args.skew, args.seed)
    sink, close = _open_out(args.out)
    try:
        sink.write(f"# synthetic {stream.source}\n")
        for e in stream:
            sink.write(f"{e.src}\t{e.dst}\n")
    finally:
        if close:
            sink.close()
    return 0


def _cmd_plan(args) -> int:
    cfg = _config_from_args(args)
    stream = bench.load_stream(cfg)
    sample = reservoir_sample(stream, min(cfg.sample_size, len(stream)),
                              bench.derive_seed(cfg.seed, f"plan:{cfg.memory_kb[0] * 1024}"))
    plan = build_plan(estimate_stats(sample), cfg.memory_kb[0] * 1024, cfg.depth,
                      **cfg.planner_options())
    sink, close = _open_out(args.dump_plan)
    try:
        sink.write(plan.dump())
    finally:
        if close:
            sink.close()
    return 0


def run(argv: list[str]) -> int:
    parser = make_parser()
    _apply_config_file(parser, argv)
    args = parser.parse_args(argv)
    if args.command == "synth":
        return _cmd_synth(args)
    if args.command == "plan":
        return _cmd_plan(args)
    cfg = _config_from_args(args)
    if args.command == "build":
        rows = bench.run_buildtime(cfg)
    else:
        rows = bench.run_edge_query_sweep(cfg)
    _emit(rows, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleBudgetError as exc:
        print(f"infeasible budget: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
