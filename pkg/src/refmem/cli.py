"""Command-line interface.

    refmem run --scenario FILE --strategy NAME [--trace OUT] [--config K=V ...]
    refmem compare --scenario FILE [--config K=V ...]
    refmem repl --scenario FILE --strategy NAME [--config K=V ...]
    refmem report --scenario FILE --out DIR [--config K=V ...]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import EngineConfig
from .engine import STRATEGY_NAMES, capability_rows, compare, run_scenario, score_trace
from .scenario import Scenario, parse_scenario


def _load_scenario(path: str) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def _apply_overrides(config: EngineConfig, overrides: list[str]) -> EngineConfig:
    for item in overrides:
        if "=" not in item:
            raise SystemExit(f"--config expects K=V, got {item!r}")
        key, _, value = item.partition("=")
        try:
            config = config.with_override(key, value)
        except ValueError as exc:
            raise SystemExit(f"--config {item!r}: {exc}") from None
    return config


def _add_common(parser: argparse.ArgumentParser, with_strategy: bool) -> None:
    parser.add_argument("--scenario", required=True, help="scenario file (DSL)")
    if with_strategy:
        parser.add_argument(
            "--strategy", required=True, choices=STRATEGY_NAMES, help="memory strategy"
        )
    parser.add_argument(
        "--config",
        action="append",
        default=[],
        metavar="K=V",
        help="config override (repeatable), e.g. --config capacity=10",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refmem",
        description="Resolve referring expressions against three perceptual-memory strategies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one strategy over a scenario, emit the trace")
    _add_common(run_p, with_strategy=True)
    run_p.add_argument("--trace", help="write the trace here instead of stdout")
    run_p.add_argument(
        "--metrics", action="store_true", help="also print the metrics line to stdout"
    )

    compare_p = sub.add_parser("compare", help="run all strategies, emit outcomes and metrics")
    _add_common(compare_p, with_strategy=False)

    repl_p = sub.add_parser("repl", help="interactive session on a scenario's world")
    _add_common(repl_p, with_strategy=True)

    report_p = sub.add_parser("report", help="write traces, metrics, and figures to a directory")
    _add_common(report_p, with_strategy=False)
    report_p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _load_scenario(args.scenario)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = _apply_overrides(scenario.config, args.config)

    if args.command == "run":
        trace = run_scenario(scenario, args.strategy, config)
        text = trace.serialize()
        if args.trace:
            Path(args.trace).write_text(text)
        else:
            sys.stdout.write(text)
        if args.metrics:
            print(score_trace(trace, scenario).line())
        return 0

    if args.command == "compare":
        result = compare(scenario, config)
        print("# tick\ttext\t" + "\t".join(STRATEGY_NAMES))
        for row in capability_rows(result):
            print(row)
        print("# strategy\tcorrect\twrong\tabstain\tambiguous\tunsupported\taccuracy")
        for metrics in result.metrics:
            print(metrics.line())
        return 0

    if args.command == "repl":
        from .repl import repl

        repl(scenario, args.strategy, config)
        return 0

    if args.command == "report":
        from .report import write_report

        for path in write_report(scenario, args.out, config):
            print(path)
        return 0

    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
