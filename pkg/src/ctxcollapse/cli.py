"""Command-line scenario runner.

    ctxcollapse run PATH [--json] [--seed N] [--tol X] [--max-dim N] [--cases GLOB]
    ctxcollapse suite [DIR] [...same flags]

Exit status is 0 when every case passes, 1 when a check fails and 2 when a
scenario cannot be parsed or validated.
"""

from __future__ import annotations

import argparse
import sys

from .runner import (
    RunConfig,
    ScenarioParseError,
    ScenarioValidationError,
    bundled_corpus,
    dumps,
    run_scenario,
    run_suite,
)


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    common.add_argument("--seed", type=int, default=None, help="override the seed of every scenario")
    common.add_argument("--tol", type=_positive_float, default=None, help="override the operator equality tolerance")
    common.add_argument("--max-dim", type=int, default=16, help="reject matrices larger than this (default 16)")
    common.add_argument("--cases", default=None, metavar="GLOB", help="only keep cases whose 'scenario/case' label matches")

    parser = argparse.ArgumentParser(prog="ctxcollapse", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="run one scenario file")
    run.add_argument("path")
    suite = sub.add_parser("suite", parents=[common], help="run every scenario in a directory")
    suite.add_argument("directory", nargs="?", default=None, help="defaults to the bundled corpus")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(seed=args.seed, eq_tol=args.tol, max_dim=args.max_dim, cases=args.cases)
    if args.command == "run":
        try:
            report = run_scenario(args.path, cfg)
        except (ScenarioParseError, ScenarioValidationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        report = run_suite(args.directory or bundled_corpus(), cfg)
    sys.stdout.write(dumps(report.to_json()) if args.json else report.to_text() + "\n")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
