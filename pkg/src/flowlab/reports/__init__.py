"""Input loading, run orchestration and report output."""

from flowlab.reports.loader import load_document
from flowlab.reports.run import (
    HANDLERS,
    Command,
    Report,
    RunConfig,
    export_series,
    load_batch,
    operations,
    parse_assignment,
    run,
)

__all__ = [
    "HANDLERS",
    "Command",
    "Report",
    "RunConfig",
    "export_series",
    "load_batch",
    "load_document",
    "operations",
    "parse_assignment",
    "run",
]
