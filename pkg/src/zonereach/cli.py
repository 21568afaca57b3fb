"""Command-line front end.

Exit status reflects tool health only: 0 when the analysis ran, 1 on bad
input (unreadable or malformed model, unknown generator, unwritable output),
2 when the oracle node limit is exceeded under ``--verify``. The verdict
itself is in the report.
"""

from __future__ import annotations

import argparse
import sys

from .automaton import ModelError
from .bench import StatsReport, emit_stats, generate, load_model, oracle_check, render_model
from .search import ALL_STRATEGIES, Explorer, Strategy, StrategyConfig
from .symgraph import OracleLimitExceeded


class UsageError(Exception):
    pass


def _seed(text):
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None


def _strategy(text):
    try:
        return Strategy.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        n = 0
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zonereach", description="Timed automata reachability with configurable search orders.")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p):
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--model", metavar="PATH", help="model file in the text format")
        src.add_argument("--gen", metavar="NAME[:N]", help="built-in model, e.g. racing, blowup:4, fischer:3, random:7")
        p.add_argument("--shuffle-edges", type=_seed, metavar="SEED", help="permute outgoing product edges per state")
        p.add_argument("--shuffle-order", type=_seed, metavar="SEED", help="permute DFS successor order when building the topological order")
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--verify", action="store_true", help="cross-check against exhaustive enumeration")
        p.add_argument("--oracle-limit", type=_positive, default=1_000_000, metavar="N")

    check = sub.add_parser("check", help="run one strategy")
    model_args(check)
    check.add_argument("--strategy", type=_strategy, required=True,
                       help="bfs, dfs, rank_bfs (r-bfs), waiting (w-bfs) or tw_bfs (tw-bfs)")

    compare = sub.add_parser("compare", help="run all strategies with the same seeds")
    model_args(compare)

    gen = sub.add_parser("gen", help="write a built-in model to a file")
    gen.add_argument("spec", metavar="NAME[:N]")
    gen.add_argument("-o", "--output", metavar="PATH", help="output file (default: standard output)")
    return parser


def _load(args):
    try:
        if args.model is not None:
            return load_model(args.model)
        return generate(args.gen)
    except OSError as e:
        raise UsageError(f"cannot read {args.model}: {e.strerror or e}") from None
    except ValueError as e:  # ModelError included
        raise UsageError(str(e)) from None


def _analyze(args, strategies) -> str:
    net = _load(args)
    seeds = {}
    if args.shuffle_edges is not None:
        seeds["edges"] = args.shuffle_edges
    if args.shuffle_order is not None:
        seeds["order"] = args.shuffle_order
    report = StatsReport(net.name, seeds=seeds)
    results = []
    for s in strategies:
        cfg = StrategyConfig(s, edge_seed=args.shuffle_edges, order_seed=args.shuffle_order)
        try:
            res = Explorer(net, cfg).run()
        except ValueError as e:
            raise UsageError(str(e)) from None
        results.append(res)
        report.add(s.value, res.stats, res.answer.value)
    if args.verify:
        report.oracle = oracle_check(net, results, args.oracle_limit)
    return emit_stats(report, args.format)


def _gen(args) -> str:
    try:
        net = generate(args.spec)
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = render_model(net)
    if args.output is None:
        return text
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {args.output}: {e.strerror or e}") from None
    return ""


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; keep 2 for resource limits
        return 0 if e.code == 0 else 1
    try:
        if args.command == "gen":
            out = _gen(args)
        elif args.command == "check":
            out = _analyze(args, [args.strategy])
        else:
            out = _analyze(args, ALL_STRATEGIES)
    except UsageError as e:
        print(f"zonereach: error: {e}", file=sys.stderr)
        return 1
    except ModelError as e:
        print(f"zonereach: error: {e}", file=sys.stderr)
        return 1
    except OracleLimitExceeded as e:
        print(f"zonereach: oracle limit exceeded: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
