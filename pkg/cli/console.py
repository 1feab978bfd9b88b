"""
FracHam Console

rich 汇总表，只写 stderr
"""

from typing import Any, Dict, Iterable, List, Optional, Sequence

from rich.console import Console
from rich.table import Table

from models.base import CheckReport, CheckStatus

console = Console(stderr=True)

STATUS_STYLE = {
    CheckStatus.PASS: "green",
    CheckStatus.FAIL: "bold red",
    CheckStatus.NOT_EXERCISED: "yellow",
}


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4e}"
    return str(value)


def check_table(title: str, reports: Iterable[CheckReport]) -> Table:
    """每个检查一行：名称、状态、数值、容差"""
    table = Table(title=title)
    table.add_column("check")
    table.add_column("status")
    table.add_column("value", justify="right")
    table.add_column("tolerance", justify="right")
    for report in reports:
        style = STATUS_STYLE.get(report.status, "")
        table.add_row(report.name, f"[{style}]{report.status.value}[/]", _fmt(report.value), _fmt(report.tolerance))
    return table


def rows_table(title: str, columns: Sequence[str], rows: List[Sequence[Any]]) -> Table:
    table = Table(title=title)
    for column in columns:
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(*[_fmt(v) for v in row])
    return table


def show(table: Table, target: Optional[Console] = None) -> None:
    (target or console).print(table)


def summary_line(message: str, fields: Dict[str, Any]) -> None:
    parts = ", ".join(f"{k}={_fmt(v)}" for k, v in fields.items())
    console.print(f"{message}: {parts}")


__all__ = [
    "console",
    "check_table",
    "rows_table",
    "show",
    "summary_line",
]
