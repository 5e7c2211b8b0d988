from typing import Dict, Iterable, List, Optional

import pandas as pd
from rich import box
from rich.table import Table

from g2moduli.moduli.boundary import BoundaryResult
from g2moduli.moduli.classifier import ClassificationRecord, Outcome
from g2moduli.reports.verify import VerifyReport

OUTCOME_STYLES = {
    Outcome.FLAT: "cyan",
    Outcome.CONVERGES_TO_NK: "green",
    Outcome.BLOW_UP: "red",
    Outcome.INCONCLUSIVE: "yellow",
}


def _fmt(value: Optional[float], spec: str = ".6g") -> str:
    if value is None:
        return "-"
    return format(value, spec)


def frame_preview(frame: pd.DataFrame, title: str, rows: int = 12) -> Table:
    """First and last rows of a numeric frame."""
    table = Table(title=title, box=box.SIMPLE_HEAD)
    for column in frame.columns:
        table.add_column(str(column), justify="right")
    if len(frame) > rows:
        head = frame.head(rows // 2)
        tail = frame.tail(rows - rows // 2)
        parts = [head, None, tail]
    else:
        parts = [frame]
    for part in parts:
        if part is None:
            table.add_row(*["..."] * len(frame.columns))
            continue
        for _, row in part.iterrows():
            table.add_row(*[_fmt(float(value), ".10g") for value in row])
    return table


def summary_table(summary: Dict, title: str) -> Table:
    table = Table(title=title, box=box.ROUNDED, show_header=False)
    table.add_column("Field", style="cyan")
    table.add_column("Value", justify="right")
    for key, value in summary.items():
        table.add_row(key, _fmt(value, ".10g") if isinstance(value, float) else str(value))
    return table


def records_table(records: Iterable[ClassificationRecord], title: str) -> Table:
    table = Table(title=title, box=box.ROUNDED)
    table.add_column("Parameter", justify="right")
    table.add_column("Outcome")
    table.add_column("mu", justify="right")
    table.add_column("nu", justify="right")
    table.add_column("Exponent", justify="right")
    table.add_column("t_escape", justify="right")
    for record in records:
        style = OUTCOME_STYLES[record.outcome]
        table.add_row(
            _fmt(record.parameter, "+.4f"),
            f"[{style}]{record.outcome.value}[/{style}]",
            _fmt(record.mu),
            _fmt(record.nu),
            _fmt(record.fitted_exponent, ".4f"),
            _fmt(record.t_escape),
        )
    return table


def counts_table(counts: Dict[str, int]) -> Table:
    table = Table(box=box.SIMPLE_HEAD)
    table.add_column("Outcome")
    table.add_column("Count", justify="right")
    for outcome, count in counts.items():
        table.add_row(outcome, str(count))
    return table


def boundary_table(result: BoundaryResult) -> Table:
    table = Table(title=f"{result.family.label} boundary search", box=box.ROUNDED)
    table.add_column("#", justify="right")
    table.add_column("Parameter", justify="right")
    table.add_column("Escapes")
    for i, (parameter, escaped) in enumerate(result.history):
        marker = "[red]yes[/red]" if escaped else "[green]no[/green]"
        table.add_row(str(i), f"{parameter:+.9f}", marker)
    return table


def verify_table(report: VerifyReport) -> Table:
    table = Table(title="Invariant checks", box=box.ROUNDED)
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Value", justify="right")
    table.add_column("Threshold")
    table.add_column("Detail", overflow="fold")
    for result in report.results:
        status = "[green]PASS[/green]" if result.passed else "[bold red]FAIL[/bold red]"
        table.add_row(result.name, status, _fmt(result.value, ".3e"), result.threshold or "-", result.detail)
    return table


def failed_names(report: VerifyReport) -> List[str]:
    return [result.name for result in report.failures]
