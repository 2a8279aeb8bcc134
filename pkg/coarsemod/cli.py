"""
Command line interface for coarsemod.

This module provides the main entry point for running one task file (or the
whole example corpus) with argument parsing, flag overrides, logging setup
and exit-code mapping: 0 pass, 1 property fail, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Sequence, Tuple, get_args

import yaml
from pydantic import ValidationError

from config import TOOL_NAME, TOOL_VERSION, OutputFormat, get_corpus_root, get_log_dir, get_log_level
from coarsemod.errors import CoarseModError, TaskSpecError
from coarsemod.execution import set_jobs
from coarsemod.loader import TaskLoader
from coarsemod.reporting import console, corpus_table, print_report
from coarsemod.runner import report_json, run
from coarsemod.types import Report, TaskSpec

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

_CLI_LOGGING_CONFIGURED = False


def _configure_cli_logging() -> None:
    """Send library logs to stderr, and to coarsemod.log when a log directory is set.

    The configuration is idempotent; repeated calls will be no-ops.
    """
    global _CLI_LOGGING_CONFIGURED
    if _CLI_LOGGING_CONFIGURED:
        return

    root = logging.getLogger("coarsemod")
    root.setLevel(get_log_level())
    root.propagate = False

    formatter = logging.Formatter(
        fmt="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    # stdout carries the JSON report
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    root.addHandler(stream_handler)

    log_dir = get_log_dir()
    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(Path(log_dir) / "coarsemod.log", mode="a", encoding="utf-8")
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    _CLI_LOGGING_CONFIGURED = True


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Check control properties of filtered group-ring modules inside finite windows",
    )
    parser.add_argument("task_file", nargs="?", help="Path to a YAML task file")
    parser.add_argument("--window", type=int, help="Override the task window radius")
    parser.add_argument("--seed", type=int, help="Override the sampling seed")
    parser.add_argument("--jobs", type=int, help="Workers for independent sampled checks")
    parser.add_argument("--emit-chain", metavar="PATH", help="Write the resolution chain JSON to PATH")
    parser.add_argument(
        "--format",
        choices=list(get_args(OutputFormat)),
        default="json",
        help="Report format on stdout",
    )
    parser.add_argument("--output", metavar="PATH", help="Also write the JSON report to PATH")
    parser.add_argument(
        "--corpus",
        nargs="?",
        const="",
        metavar="ROOT",
        help="Run every task of the corpus manifest (default root from COARSEMOD_CORPUS_ROOT)",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    return parser


def apply_overrides(task: TaskSpec, args: argparse.Namespace) -> TaskSpec:
    """Copy of the task with CLI flags applied; the constant <= window check is re-run."""
    task = task.model_copy(deep=True)
    try:
        if args.window is not None:
            task.window = args.window
        if args.seed is not None:
            task.seed = args.seed
    except ValidationError as exc:
        first = exc.errors()[0]
        raise TaskSpecError(first["msg"].removeprefix("Value error, "), field="task") from None
    return task


def run_task(path: str, args: argparse.Namespace) -> Report:
    task = apply_overrides(TaskLoader.load_from_file(path), args)
    report = run(task)
    if args.emit_chain and "differentials" in report.result:
        with open(args.emit_chain, "w", encoding="utf-8") as f:
            json.dump(report.result, f, indent=2, sort_keys=True)
        logger.info("resolution chain written to %s", args.emit_chain)
    return report


def _emit(report: Report, args: argparse.Namespace) -> None:
    text = report_json(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    if args.format == "table":
        print_report(report)
    else:
        print(text)


def load_manifest(root: str) -> List[dict]:
    """Entries of `manifest.yaml` under a corpus root: {file, expect}."""
    path = os.path.join(root, "manifest.yaml")
    with open(path, "r") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict) or not isinstance(data.get("tasks"), list):
        raise TaskSpecError(f"{path} must be a mapping with a 'tasks' list", field="tasks")
    entries = []
    for item in data["tasks"]:
        entry = {"file": item, "expect": "pass"} if isinstance(item, str) else dict(item)
        if "file" not in entry:
            raise TaskSpecError("corpus entries need a 'file'", field="tasks")
        entries.append(entry)
    return entries


def run_corpus(root: str, args: argparse.Namespace) -> int:
    rows: List[Tuple[str, Report | None, str]] = []
    mismatches = 0
    for entry in load_manifest(root):
        name = entry["file"]
        expect = entry.get("expect", "pass")
        try:
            report = run_task(os.path.join(root, name), args)
        except (CoarseModError, FileNotFoundError) as exc:
            logger.warning("[ERROR] %s: %s", name, exc)
            rows.append((name, None, str(exc)))
            if expect != "error":
                mismatches += 1
            continue
        matched = report.verdict.value == expect
        if not matched:
            mismatches += 1
            logger.warning("[MISMATCH] %s: expected %s, got %s", name, expect, report.verdict.value)
        rows.append((name, report, "" if matched else f"expected {expect}"))
    console.print(corpus_table(rows))
    logger.info("--- Corpus summary: %s / %s as expected ---", len(rows) - mismatches, len(rows))
    return EXIT_PASS if mismatches == 0 else EXIT_FAIL


def run_command(args: argparse.Namespace) -> int:
    set_jobs(args.jobs)
    if args.corpus is not None:
        return run_corpus(args.corpus or get_corpus_root(), args)
    if not args.task_file:
        raise TaskSpecError("a task file is required unless --corpus is given", field="task_file")
    report = run_task(args.task_file, args)
    _emit(report, args)
    return report.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    _configure_cli_logging()
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        return run_command(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
    except CoarseModError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
