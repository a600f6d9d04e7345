"""
Experiment runner.

    python -m ssmsep run configs/real/adam_copy.json --seeds 0,1,2 --jobs 2
    python -m ssmsep report results/

Command-line flags override the matching config fields. Exit status is 0 on
success, 2 for a config or schema problem, 3 for a numeric abort, 4 for an
I/O failure and 5 for an incomplete report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import io
from .config import logger
from .errors import ConfigError, ReportError, exit_code_for
from .jobs import apply_overrides, execute, load_config
from .report import report_table


def _parse_seeds(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"--seeds must be a comma-separated list of integers, got {text!r}") from exc


def _print_summary(summary: dict) -> None:
    print(f"\n=== {summary['job']} job, seeds {summary['seeds']} ({summary['convention']} is the headline) ===")
    for row in summary["metrics"]:
        print(
            f"{row['label']:>24} {row['metric']:<24} "
            f"min={row['min']:.6g} max={row['max']:.6g} mean={row['mean']:.6g}"
        )


def cmd_run(args: argparse.Namespace) -> Optional[str]:
    config = load_config(args.config)
    seeds = _parse_seeds(args.seeds) if args.seeds is not None else None
    config = apply_overrides(config, seeds=seeds, output_dir=args.output_dir, fmt=args.format)
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
    summary = execute(config, jobs=args.jobs)
    _print_summary(summary)
    print(f"\nResults written to {config.output_dir}")
    return config.output_dir


def cmd_report(args: argparse.Namespace) -> None:
    text, csv_path, complete = report_table(args.results_dir)
    print(text, end="")
    print(f"\nTable written to {csv_path}")
    if not complete:
        raise ReportError(f"report for {args.results_dir} has missing or corrupt results")


def _error_dir(args: argparse.Namespace) -> Optional[str]:
    if args.command == "report":
        return args.results_dir
    if args.output_dir is not None:
        return args.output_dir
    try:
        return io.read_json(args.config)["output_dir"]
    except (OSError, ValueError, KeyError, TypeError):
        return None


def _emit_error(exc: BaseException, code: int, out_dir: Optional[str]) -> None:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if out_dir is None:
        return
    try:
        io.ensure_dir(out_dir)
        io.write_json(os.path.join(out_dir, "error.json"), record)
    except OSError:
        logger.warning("could not write error record to %s", out_dir)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssmsep",
        description="Real vs complex diagonal SSM experiments: construct, train, bound, quantize.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_cmd = sub.add_parser("run", help="Run the job described by a JSON config.")
    run_cmd.add_argument("config", type=str, help="Path to the experiment config (JSON).")
    run_cmd.add_argument(
        "--seeds",
        type=str,
        default=None,
        help="Comma-separated seeds, e.g. 0,1,2 (default: the config's seeds)",
    )
    run_cmd.add_argument(
        "--output-dir",
        type=str,
        default=None,
        help="Directory for result files (default: the config's output_dir)",
    )
    run_cmd.add_argument(
        "--format",
        type=str,
        choices=["csv", "json"],
        default=None,
        help="Per-seed result format (default: the config's format, else json)",
    )
    run_cmd.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="Seeds run in parallel processes (default: 1)",
    )

    report_cmd = sub.add_parser("report", help="Build the result table from a results directory.")
    report_cmd.add_argument("results_dir", type=str, help="Directory searched for training summaries.")
    return parser


def run(config_path: str) -> int:
    """Run one config with no flag overrides; returns the exit status."""
    return main(["run", config_path])


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cmd_run(args)
        else:
            cmd_report(args)
    except Exception as exc:
        code = exit_code_for(exc)
        logger.error("%s failed: %s: %s", args.command, type(exc).__name__, exc)
        _emit_error(exc, code, _error_dir(args))
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
