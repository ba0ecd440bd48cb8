"""Output formatting utilities for Flowlab.

Helpers shared by the report writer and the CLI summaries.
"""

import math
from typing import Iterable, Optional, Sequence, Union

from rich.table import Table

JsonFloat = Union[float, str]

VERDICT_STYLES = {
    "certified_convergent": "green",
    "certified_divergent": "yellow",
    "inconclusive": "dim",
}


def encode_float(value: Optional[float]) -> Optional[JsonFloat]:
    """Encode a float for strict JSON, spelling infinities as strings."""
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return float(value)


def decode_float(value: Optional[JsonFloat]) -> Optional[float]:
    """Inverse of :func:`encode_float`."""
    if value is None:
        return None
    return float(value)


def format_number(value: Optional[float], spec: str = ".6g") -> str:
    """Format a float for humans; None renders as a dash."""
    if value is None:
        return "-"
    if math.isinf(value):
        return "∞" if value > 0 else "-∞"
    return format(value, spec)


def format_verdict(verdict: str) -> str:
    """Rich markup for a certificate verdict."""
    style = VERDICT_STYLES.get(verdict, "white")
    return f"[{style}]{verdict}[/{style}]"


def truncate(text: str, max_length: int, suffix: str = "...") -> str:
    """Truncate text to a maximum length."""
    if len(text) <= max_length:
        return text

    return text[: max_length - len(suffix)] + suffix


def certificate_table(rows: Iterable[Sequence[object]], title: str = "Certificates") -> Table:
    """Summary table with one row per certificate series.

    Each row is (name, terms, partial sum, tail bound, verdict).
    """
    table = Table(title=title, title_justify="left")
    table.add_column("series")
    table.add_column("terms", justify="right")
    table.add_column("partial sum", justify="right")
    table.add_column("tail bound", justify="right")
    table.add_column("verdict")

    for name, count, total, tail, verdict in rows:
        table.add_row(
            truncate(str(name), 48),
            str(count),
            format_number(total),
            format_number(tail),
            format_verdict(str(verdict)),
        )
    return table
