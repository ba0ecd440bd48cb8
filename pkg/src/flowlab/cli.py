"""CLI entrypoint for Flowlab.

This module defines the command-line interface using Typer.
All business logic should be delegated to other modules.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from typing_extensions import Annotated

from flowlab import __version__, config
from flowlab.errors import CertificateViolation, FlowlabError
from flowlab.reports.run import (
    Command,
    Report,
    RunConfig,
    export_series,
    load_batch,
    operations,
    parse_assignment,
    run,
)
from flowlab.tail.certificates import summarize
from flowlab.utils.formatting import certificate_table, format_verdict

app = typer.Typer(
    name="flowlab",
    help="Certificates for tail boundary flows, Poisson pipelines and Bernoulli shifts.",
    add_completion=False,
)

console = Console()

EXIT_INPUT = 1
EXIT_VIOLATION = 2

Horizon = Annotated[
    int, typer.Option("--horizon", min=1, help="Window size for certificate series")
]
Seed = Annotated[int, typer.Option("--seed", help="Seed for sampled quantities")]
Threshold = Annotated[
    float,
    typer.Option("--threshold-diverge", help="Partial sum required by the divergence witness"),
]
LpLimit = Annotated[
    int, typer.Option("--lp-limit", min=1, help="Largest support for the exact transport LP")
]
EpsTrunc = Annotated[float, typer.Option("--eps-trunc", help="Poisson truncation tolerance")]
Out = Annotated[
    Optional[Path], typer.Option("--out", "-o", help="Write the JSON report here")
]
CsvDir = Annotated[
    Optional[Path], typer.Option("--csv", help="Write one CSV per certificate series here")
]
Sets = Annotated[
    Optional[List[str]],
    typer.Option("--set", "-s", help="Override a parameter, e.g. --set alpha=0.6"),
]
Verbose = Annotated[bool, typer.Option("--verbose", help="Log debug output")]
InputFile = Annotated[Path, typer.Argument(help="TOML or JSON input document")]


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        typer.echo(f"Flowlab version {__version__}")
        raise typer.Exit()


def setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else config.LOG_LEVEL
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@app.callback()
def main(
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-v",
            help="Show version and exit.",
            callback=version_callback,
            is_eager=True,
        ),
    ] = False,
) -> None:
    """Flowlab - certify summability conditions of tail boundary flows."""
    pass


def _params(sets: Optional[List[str]], extra: Dict[str, object]) -> Dict[str, object]:
    params = {key: value for key, value in extra.items() if value is not None}
    for item in sets or []:
        key, value = parse_assignment(item)
        params[key] = value
    return params


def _fail(code: int, label: str, error: Exception) -> None:
    console.print(f"[red]{label}:[/red] {escape(str(error))}")
    raise typer.Exit(code=code)


def _emit(report: Report, job: RunConfig) -> None:
    if job.out is None:
        typer.echo(report.dumps(), nl=False)
    else:
        job.out.parent.mkdir(parents=True, exist_ok=True)
        job.out.write_text(report.dumps(), encoding="utf-8")
        if report.certificates:
            console.print(certificate_table(summarize(report.certificates)))
        console.print(f"Report written to: {job.out}")
    if job.csv_dir is not None:
        paths = export_series(report, job.csv_dir)
        console.print(f"{len(paths)} CSV file(s) written to: {job.csv_dir}")


def _execute(command: Command, op: str, inputs: List[Path], **options) -> None:
    """Build the RunConfig, run it and map failures to exit codes."""
    setup_logging(options.pop("verbose"))
    try:
        job = RunConfig(command=command.value, op=op, inputs=tuple(inputs), **options)
        report = run(job)
        _emit(report, job)
    except CertificateViolation as e:
        _fail(EXIT_VIOLATION, "Certificate violation", e)
    except (FlowlabError, ValueError, OSError) as e:
        _fail(EXIT_INPUT, "Error", e)


def _options(
    params: Dict[str, object],
    horizon: int,
    seed: int,
    threshold: float,
    lp_limit: int,
    eps_trunc: float,
    out: Optional[Path],
    csv_dir: Optional[Path],
    verbose: bool,
) -> Dict[str, object]:
    return {
        "params": params,
        "horizon": horizon,
        "seed": seed,
        "divergence_threshold": threshold,
        "lp_limit": lp_limit,
        "eps_trunc": eps_trunc,
        "out": out,
        "csv_dir": csv_dir,
        "verbose": verbose,
    }


def _op_help(command: Command) -> str:
    return "One of: " + ", ".join(operations(command.value))


@app.command()
def metric(
    files: Annotated[List[Path], typer.Argument(help="Two measure files (JSON or TOML)")],
    kind: Annotated[
        str, typer.Option("--kind", "--op", help=_op_help(Command.METRIC))
    ] = "hellinger",
    kappa: Annotated[
        Optional[float], typer.Option("--kappa", help="Cutoff for w2k")
    ] = None,
    sets: Sets = None,
    horizon: Horizon = config.DEFAULT_HORIZON,
    seed: Seed = config.DEFAULT_SEED,
    threshold: Threshold = config.DEFAULT_DIVERGENCE_THRESHOLD,
    lp_limit: LpLimit = config.DEFAULT_LP_LIMIT,
    eps_trunc: EpsTrunc = config.DEFAULT_EPS_TRUNC,
    out: Out = None,
    csv_dir: CsvDir = None,
    verbose: Verbose = False,
) -> None:
    """Distance between two measures."""
    params = _params(sets, {"kappa": kappa})
    _execute(
        Command.METRIC,
        kind,
        files,
        **_options(params, horizon, seed, threshold, lp_limit, eps_trunc, out, csv_dir, verbose),
    )


@app.command()
def tail(
    input_file: InputFile,
    op: Annotated[str, typer.Option("--op", help=_op_help(Command.TAIL))],
    omega: Annotated[
        Optional[float], typer.Option("--omega", help="Frequency for eigen")
    ] = None,
    kappa: Annotated[
        Optional[float], typer.Option("--kappa", help="Cutoff for the w2k metric")
    ] = None,
    sets: Sets = None,
    horizon: Horizon = config.DEFAULT_HORIZON,
    seed: Seed = config.DEFAULT_SEED,
    threshold: Threshold = config.DEFAULT_DIVERGENCE_THRESHOLD,
    lp_limit: LpLimit = config.DEFAULT_LP_LIMIT,
    eps_trunc: EpsTrunc = config.DEFAULT_EPS_TRUNC,
    out: Out = None,
    csv_dir: CsvDir = None,
    verbose: Verbose = False,
) -> None:
    """Certificates for a transition sequence."""
    params = _params(sets, {"omega": omega, "kappa": kappa})
    _execute(
        Command.TAIL,
        op,
        [input_file],
        **_options(params, horizon, seed, threshold, lp_limit, eps_trunc, out, csv_dir, verbose),
    )


@app.command()
def pipeline(
    input_file: InputFile,
    op: Annotated[str, typer.Option("--op", help=_op_help(Command.PIPELINE))],
    depth: Annotated[
        Optional[int], typer.Option("--depth", min=1, help="Characters to certify")
    ] = None,
    budget: Annotated[
        Optional[int], typer.Option("--budget", min=1, help="Translation search budget")
    ] = None,
    sets: Sets = None,
    horizon: Horizon = config.DEFAULT_HORIZON,
    seed: Seed = config.DEFAULT_SEED,
    threshold: Threshold = config.DEFAULT_DIVERGENCE_THRESHOLD,
    lp_limit: LpLimit = config.DEFAULT_LP_LIMIT,
    eps_trunc: EpsTrunc = config.DEFAULT_EPS_TRUNC,
    out: Out = None,
    csv_dir: CsvDir = None,
    verbose: Verbose = False,
) -> None:
    """Conversions between ITPFI2 data, Poisson flows and two-point laws."""
    params = _params(sets, {"depth": depth, "budget": budget})
    _execute(
        Command.PIPELINE,
        op,
        [input_file],
        **_options(params, horizon, seed, threshold, lp_limit, eps_trunc, out, csv_dir, verbose),
    )


@app.command()
def bernoulli(
    input_file: InputFile,
    op: Annotated[str, typer.Option("--op", help=_op_help(Command.BERNOULLI))],
    sets: Sets = None,
    horizon: Horizon = config.DEFAULT_HORIZON,
    seed: Seed = config.DEFAULT_SEED,
    threshold: Threshold = config.DEFAULT_DIVERGENCE_THRESHOLD,
    lp_limit: LpLimit = config.DEFAULT_LP_LIMIT,
    eps_trunc: EpsTrunc = config.DEFAULT_EPS_TRUNC,
    out: Out = None,
    csv_dir: CsvDir = None,
    verbose: Verbose = False,
) -> None:
    """Structure and type certificates for a Bernoulli family."""
    _execute(
        Command.BERNOULLI,
        op,
        [input_file],
        **_options(
            _params(sets, {}), horizon, seed, threshold, lp_limit, eps_trunc, out, csv_dir, verbose
        ),
    )


@app.command()
def suspend(
    input_file: InputFile,
    op: Annotated[str, typer.Option("--op", help=_op_help(Command.SUSPEND))],
    sets: Sets = None,
    horizon: Horizon = config.DEFAULT_HORIZON,
    seed: Seed = config.DEFAULT_SEED,
    threshold: Threshold = config.DEFAULT_DIVERGENCE_THRESHOLD,
    lp_limit: LpLimit = config.DEFAULT_LP_LIMIT,
    eps_trunc: EpsTrunc = config.DEFAULT_EPS_TRUNC,
    out: Out = None,
    csv_dir: CsvDir = None,
    verbose: Verbose = False,
) -> None:
    """Poisson suspensions: kappa, growth, selection and family emission."""
    _execute(
        Command.SUSPEND,
        op,
        [input_file],
        **_options(
            _params(sets, {}), horizon, seed, threshold, lp_limit, eps_trunc, out, csv_dir, verbose
        ),
    )


@app.command(name="run")
def run_batch(
    batch_file: Annotated[Path, typer.Argument(help="TOML file of [[job]] tables")],
    verbose: Verbose = False,
) -> None:
    """Run every job of a batch file."""
    setup_logging(verbose)
    try:
        jobs = load_batch(batch_file)
    except (FlowlabError, ValueError) as e:
        _fail(EXIT_INPUT, "Error", e)

    table = Table(title="Jobs", title_justify="left")
    table.add_column("#", justify="right")
    table.add_column("job")
    table.add_column("series", justify="right")
    table.add_column("verdicts")
    table.add_column("report")

    exit_code = 0
    for number, job in enumerate(jobs, start=1):
        name = f"{job.command} --op {job.op}"
        try:
            report = run(job)
            if job.out is not None:
                job.out.parent.mkdir(parents=True, exist_ok=True)
                job.out.write_text(report.dumps(), encoding="utf-8")
            if job.csv_dir is not None:
                export_series(report, job.csv_dir)
        except CertificateViolation as e:
            exit_code = EXIT_VIOLATION
            table.add_row(str(number), name, "-", "[red]violation[/red]", escape(str(e)))
            continue
        except (FlowlabError, ValueError, OSError) as e:
            exit_code = max(exit_code, EXIT_INPUT)
            table.add_row(str(number), name, "-", "[red]error[/red]", escape(str(e)))
            continue
        verdicts = ", ".join(format_verdict(s.verdict.value) for s in report.certificates)
        table.add_row(
            str(number),
            name,
            str(len(report.certificates)),
            verdicts or "-",
            str(job.out) if job.out is not None else "-",
        )

    console.print(Panel(table, title=f"Batch: {batch_file.name}"))
    if exit_code:
        raise typer.Exit(code=exit_code)


if __name__ == "__main__":
    app()
