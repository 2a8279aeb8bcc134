"""
Human-readable summaries of reports, rendered with rich.
"""

from __future__ import annotations

from typing import Iterable, Tuple

from rich.console import Console
from rich.table import Table
from rich.text import Text

from coarsemod.types import Report, Verdict

console = Console()


def _verdict_text(verdict: Verdict) -> Text:
    text = Text(verdict.value.upper())
    text.stylize("bold green" if verdict == Verdict.PASS else "bold red")
    return text


def certificate_table(report: Report) -> Table:
    """One row per certificate of a single report."""
    table = Table(show_header=True, header_style="bold magenta", title=report.task["command"])
    table.add_column("Kind", width=18, no_wrap=True)
    table.add_column("Constant", justify="right", width=10)
    table.add_column("Window", justify="right", width=8)
    table.add_column("Verdict", justify="right", width=8)
    table.add_column("Tags", justify="left", width=24)
    for certificate in report.certificates:
        constant = "-" if certificate.constant is None else str(certificate.constant)
        table.add_row(
            certificate.kind.value,
            constant,
            str(certificate.window),
            _verdict_text(certificate.verdict),
            ", ".join(certificate.tags),
        )
    return table


def corpus_table(rows: Iterable[Tuple[str, Report | None, str]]) -> Table:
    """Summary of a corpus run; rows are (task file, report or None, note)."""
    table = Table(show_header=True, header_style="bold magenta")
    table.add_column("Task", width=36, no_wrap=True)
    table.add_column("Command", width=16)
    table.add_column("Result", justify="right", width=10)
    table.add_column("Note", justify="left", width=40)
    for name, report, note in rows:
        if report is None:
            result = Text("ERROR")
            result.stylize("bold red")
            table.add_row(name, "-", result, note)
        else:
            table.add_row(name, report.task["command"], _verdict_text(report.verdict), note)
    return table


def print_report(report: Report) -> None:
    console.print(certificate_table(report))
    if report.counterexamples:
        first = report.counterexamples[0]
        console.print(f"[red]counterexample:[/red] {first.model_dump(exclude_none=True)}")
