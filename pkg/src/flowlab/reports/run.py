"""Orchestration of one analysis: config in, self-verifying report out.

A run reads its input documents, dispatches to the handler registered for
``(command, op)`` and wraps the handler's results and certificate series in a
:class:`Report`. Report bodies exclude timestamps, so the same config always
serializes to the same bytes.
"""

import csv
import json
import logging
import math
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import tomli_w

from flowlab import __version__
from flowlab.bernoulli.analysis import (
    BoundedCocycleWitness,
    LinearGrowthWitness,
    cocycle_norm,
    conservative_core_check,
    dissipativity_certificate,
    hellinger_bridge,
    kakutani_check,
    structure_report,
)
from flowlab.bernoulli.types import SigmaFiniteMeasure, type_II1_check, type_IIinf_check
from flowlab.config import (
    BRIDGE_TOLERANCE,
    CSV_FLOAT_FORMAT,
    DEFAULT_DIVERGENCE_THRESHOLD,
    DEFAULT_EPS_TRUNC,
    DEFAULT_HORIZON,
    DEFAULT_LP_LIMIT,
    DEFAULT_SEED,
    SELECTION_GROWTH,
    TRANSLATION_BUDGET,
)
from flowlab.errors import DomainError, InputError, InternalError
from flowlab.metrics.distances import hellinger, hellinger_sq, total_variation
from flowlab.metrics.transport import TransportMode, wasserstein2, wasserstein2_cutoff
from flowlab.pipelines.almost_periodic import (
    AlmostPeriodicTarget,
    almost_periodic_pipeline,
    rotation_seeds,
)
from flowlab.pipelines.itpfi import (
    binomial_approx_check,
    itpfi2_to_poisson,
    itpfi_bounded_reduce,
    poisson_to_itpfi2,
)
from flowlab.pipelines.specs import ITPFI2Spec, PipelineResult, PoissonFlowSpec
from flowlab.pipelines.two_point import poisson_to_two_point, two_point_to_poisson, verify_split
from flowlab.reports.loader import file_digest, load_document, parse_toml
from flowlab.reports.sequences import (
    family_from_config,
    intensity_from_config,
    measure_from_config,
    measures_from_config,
    require,
    sequence_from_config,
)
from flowlab.suspension.generator import (
    IntensitySpec,
    associated_flow_spec,
    conservativity_growth,
    emit_bernoulli,
    kappa_eval,
    probe_window,
    subsequence_select,
)
from flowlab.tail.analysis import (
    ConcentrationBlock,
    concentration_points,
    eigenvalue_certificate,
    equivalence_certificate,
    interval_extractor,
    periodicity_score,
)
from flowlab.tail.certificates import CertificateSeries, finite_series
from flowlab.tail.walk import simulate_walk
from flowlab.utils.expressions import index_function
from flowlab.utils.formatting import encode_float

logger = logging.getLogger(__name__)

Params = Mapping[str, object]
HandlerResult = Tuple[Dict[str, object], Tuple[CertificateSeries, ...]]
Handler = Callable[[Dict[str, object], Params, "RunConfig"], HandlerResult]

HANDLERS: Dict[Tuple[str, str], Handler] = {}


class Command(str, Enum):
    METRIC = "metric"
    TAIL = "tail"
    PIPELINE = "pipeline"
    BERNOULLI = "bernoulli"
    SUSPEND = "suspend"


def handler(command: Command, op: str) -> Callable[[Handler], Handler]:
    def register(fn: Handler) -> Handler:
        HANDLERS[(command.value, op)] = fn
        return fn

    return register


def operations(command: str) -> List[str]:
    """Operation names registered for a command, in registration order."""
    return [op for cmd, op in HANDLERS if cmd == command]


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run.

    Attributes:
        command: Subcommand name (metric, tail, pipeline, bernoulli, suspend)
        op: Operation within the command
        inputs: Input documents (two measures for ``metric``, one otherwise)
        params: Overrides merged over the document's ``[params]`` table
        horizon: Window size for certificate series
        seed: Seed for sampled quantities
        divergence_threshold: Partial sum required by the growth witness
        lp_limit: Largest support solved by the exact transport LP
        eps_trunc: Poisson truncation tolerance
        out: Report destination (stdout when None)
        csv_dir: Directory for per-series CSV files
    """

    command: str
    op: str
    inputs: Tuple[Path, ...] = ()
    params: Dict[str, object] = field(default_factory=dict)
    horizon: int = DEFAULT_HORIZON
    seed: int = DEFAULT_SEED
    divergence_threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    lp_limit: int = DEFAULT_LP_LIMIT
    eps_trunc: float = DEFAULT_EPS_TRUNC
    out: Optional[Path] = None
    csv_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if (self.command, self.op) not in HANDLERS:
            known = ", ".join(operations(self.command)) or "none"
            raise DomainError(
                f"unknown operation {self.op!r} for {self.command!r} (known: {known})"
            )
        if self.horizon < 1:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if not self.divergence_threshold > 0.0:
            raise DomainError("divergence threshold must be positive")
        if self.lp_limit < 1:
            raise DomainError(f"LP limit must be positive, got {self.lp_limit}")
        if not self.eps_trunc > 0.0:
            raise DomainError("eps_trunc must be positive")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))

    def echo(self) -> Dict[str, object]:
        return {
            "command": self.command,
            "op": self.op,
            "inputs": [str(p) for p in self.inputs],
            "params": dict(sorted(self.params.items())),
            "horizon": self.horizon,
            "seed": self.seed,
            "divergence_threshold": self.divergence_threshold,
            "lp_limit": self.lp_limit,
            "eps_trunc": self.eps_trunc,
        }


def jsonable(value: object) -> object:
    """Plain JSON data: tuples become lists, enums their values, infinities strings."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return encode_float(float(value))
    if hasattr(value, "to_json"):
        return jsonable(value.to_json())
    return value


@dataclass(frozen=True)
class Report:
    """Config echo, per-operation results, certificate series and provenance."""

    config: Dict[str, object]
    results: Dict[str, object]
    certificates: Tuple[CertificateSeries, ...]
    provenance: Dict[str, object]
    timestamps: Dict[str, str] = field(default_factory=dict)

    def body(self) -> Dict[str, object]:
        """Everything but the timestamps."""
        return {
            "config": jsonable(self.config),
            "results": jsonable(self.results),
            "certificates": [s.to_json() for s in self.certificates],
            "provenance": jsonable(self.provenance),
        }

    def to_json(self) -> Dict[str, object]:
        payload = self.body()
        payload["provenance"] = dict(payload["provenance"], timestamps=dict(self.timestamps))
        return payload

    def dumps(self, timestamps: bool = True) -> str:
        payload = self.to_json() if timestamps else self.body()
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def verify(self) -> bool:
        """Re-sum every embedded series and recompute its verdict."""
        return all(s.verify() for s in self.certificates)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run(config: RunConfig) -> Report:
    """Execute one configured operation.

    Raises:
        InputError: If an input cannot be read or lacks a required key
        CertificateViolation: If an exact quantity exceeds its analytic bound
        InternalError: If the assembled report fails its own verification
    """
    started = _now()
    documents = [load_document(path) for path in config.inputs]
    params: Dict[str, object] = {}
    for document in documents:
        table = document.get("params", {})
        if not isinstance(table, Mapping):
            raise InputError("[params] must be a table")
        params.update(table)
    params.update(config.params)

    logger.info("running %s --op %s on %d input(s)", config.command, config.op, len(documents))
    fn = HANDLERS[(config.command, config.op)]
    document = documents[0] if documents else {}
    if config.command == Command.METRIC.value:
        document = {"measures": documents}
    results, certificates = fn(document, params, config)

    provenance = {
        "tool": "flowlab",
        "version": __version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
        "seed": config.seed,
        "inputs": [{"path": str(p), "sha256": file_digest(p)} for p in config.inputs],
    }
    report = Report(
        config.echo(),
        results,
        tuple(certificates),
        provenance,
        {"started": started, "finished": _now()},
    )
    if not report.verify():
        raise InternalError("report verdicts do not match their embedded terms")
    return report


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "series"


def _csv_float(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, CSV_FLOAT_FORMAT)


def write_series_csv(series: CertificateSeries, path: Path) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["index", "term", "partial_sum"])
        for index, term, partial in zip(series.indices, series.terms, series.partial_sums):
            writer.writerow([index, _csv_float(term), _csv_float(partial)])
    return path


def export_series(report: Report, directory: Path) -> List[Path]:
    """Write one ``index,term,partial_sum`` CSV per certificate series.

    Raises:
        DomainError: If the report holds no series
        OSError: If the directory cannot be written
    """
    if not report.certificates:
        raise DomainError("the report has no certificate series to export")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        write_series_csv(series, directory / f"{i:02d}_{_slug(series.name)}.csv")
        for i, series in enumerate(report.certificates, start=1)
    ]


def parse_assignment(text: str) -> Tuple[str, object]:
    """``key=value`` with the value read as a TOML literal, else as a string."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise InputError(f"expected key=value, got {text!r}")
    try:
        value = parse_toml(f"value = {raw.strip()}")["value"]
    except InputError:
        value = raw.strip()
    return key, value


BATCH_KEYS = (
    "horizon",
    "seed",
    "divergence_threshold",
    "lp_limit",
    "eps_trunc",
)


def load_batch(path: Path) -> List[RunConfig]:
    """Jobs from a TOML file of ``[[job]]`` tables.

    Relative input and output paths resolve against the batch file. A
    ``[defaults]`` table supplies values every job may override.
    """
    path = Path(path)
    document = load_document(path)
    jobs = document.get("job")
    if not isinstance(jobs, list) or not jobs:
        raise InputError("batch file needs at least one [[job]] table", str(path))
    defaults = document.get("defaults", {})
    base = path.parent

    def resolve(value: object) -> Path:
        candidate = Path(str(value))
        return candidate if candidate.is_absolute() else base / candidate

    configs = []
    for number, job in enumerate(jobs, start=1):
        where = f"job {number}"
        merged = dict(defaults, **job)
        inputs = merged.get("input", merged.get("inputs", []))
        if isinstance(inputs, str):
            inputs = [inputs]
        options = {key: merged[key] for key in BATCH_KEYS if key in merged}
        configs.append(
            RunConfig(
                command=str(require(merged, "command", where)),
                op=str(require(merged, "op", where)),
                inputs=tuple(resolve(p) for p in inputs),
                params=dict(merged.get("params", {})),
                out=resolve(merged["out"]) if "out" in merged else None,
                csv_dir=resolve(merged["csv"]) if "csv" in merged else None,
                **options,
            )
        )
    return configs


# Parameter helpers


def _number(params: Params, key: str, default: Optional[float] = None) -> float:
    value = params.get(key, default)
    if value is None:
        raise InputError(f"missing parameter {key!r}")
    if isinstance(value, str):
        return index_function(value)(0)
    return float(value)


def _optional_number(params: Params, key: str) -> Optional[float]:
    return None if params.get(key) is None else _number(params, key)


def _integer(params: Params, key: str, default: Optional[int] = None) -> int:
    value = _number(params, key, default)
    if value != int(value):
        raise InputError(f"parameter {key!r} must be an integer, got {value}")
    return int(value)


def _sequence(document: Mapping[str, object], key: str, config: RunConfig):
    table = require(document, key, "input")
    if not isinstance(table, Mapping):
        raise InputError(f"[{key}] must be a table")
    return sequence_from_config(table, config.eps_trunc)


# metric


def _measure_pair(document: Mapping[str, object]):
    measures = document["measures"]
    if len(measures) != 2:
        raise InputError(f"metric needs exactly two measure files, got {len(measures)}")
    return measure_from_config(measures[0]), measure_from_config(measures[1])


@handler(Command.METRIC, "hellinger")
def _metric_hellinger(document, params, config) -> HandlerResult:
    mu, nu = _measure_pair(document)
    return {"hellinger_sq": hellinger_sq(mu, nu), "hellinger": hellinger(mu, nu)}, ()


@handler(Command.METRIC, "tv")
def _metric_tv(document, params, config) -> HandlerResult:
    mu, nu = _measure_pair(document)
    return {"total_variation": total_variation(mu, nu)}, ()


@handler(Command.METRIC, "w2")
def _metric_w2(document, params, config) -> HandlerResult:
    mu, nu = _measure_pair(document)
    result = wasserstein2(mu, nu)
    return {"distance": result.distance, "plan": result.plan.to_json()}, ()


@handler(Command.METRIC, "w2k")
def _metric_w2k(document, params, config) -> HandlerResult:
    mu, nu = _measure_pair(document)
    kappa = _number(params, "kappa")
    mode = TransportMode(str(params.get("mode", TransportMode.EXACT.value)))
    result = wasserstein2_cutoff(mu, nu, kappa, mode, config.lp_limit)
    return {
        "kappa": kappa,
        "mode": mode.value,
        "distance": result.distance,
        "plan": result.plan.to_json(),
    }, ()


# tail


@handler(Command.TAIL, "eigen")
def _tail_eigen(document, params, config) -> HandlerResult:
    seq = _sequence(document, "sequence", config)
    omega = _number(params, "omega")
    series = eigenvalue_certificate(
        seq,
        omega,
        config.horizon,
        tail_bound=_optional_number(params, "tail_bound"),
        threshold=config.divergence_threshold,
    )
    return {"omega": omega, "eigenvalue_certified": series.verdict.value}, (series,)


@handler(Command.TAIL, "period")
def _tail_period(document, params, config) -> HandlerResult:
    seq = _sequence(document, "sequence", config)
    low, high = _number(params, "low"), _number(params, "high")
    width = _number(params, "width_bound", high - low)
    series = periodicity_score(
        seq,
        interval_extractor(low, high),
        config.horizon,
        width,
        threshold=config.divergence_threshold,
    )
    return {"interval": [low, high], "width_bound": width, "note": series.note}, (series,)


@handler(Command.TAIL, "concentrate")
def _tail_concentrate(document, params, config) -> HandlerResult:
    seq = _sequence(document, "sequence", config)
    blocks = []
    for table in require(document, "blocks", "input"):
        blocks.append(
            ConcentrationBlock(
                tuple(int(n) for n in require(table, "indices", "block")),
                float(require(table, "low", "block")),
                float(require(table, "high", "block")),
                float(require(table, "p", "block")),
                float(require(table, "q", "block")),
            )
        )
    result = concentration_points(
        seq, blocks, width_bound=_optional_number(params, "width_bound")
    )
    return {"midpoints": list(result.midpoints)}, (result.weighted_sum,)


@handler(Command.TAIL, "equiv")
def _tail_equiv(document, params, config) -> HandlerResult:
    first = _sequence(document, "sequence", config)
    if document.get("sequence2") == document.get("sequence"):
        second = first
    else:
        second = _sequence(document, "sequence2", config)
    metric = str(params.get("metric", "hellinger"))
    series = equivalence_certificate(
        first,
        second,
        metric,
        config.horizon,
        kappa=_optional_number(params, "kappa"),
        tail_bound=_optional_number(params, "tail_bound"),
        lp_limit=config.lp_limit,
        threshold=config.divergence_threshold,
    )
    return {"metric": metric}, (series,)


@handler(Command.TAIL, "walk")
def _tail_walk(document, params, config) -> HandlerResult:
    seq = _sequence(document, "sequence", config)
    blocks = params.get("blocks")
    stats = simulate_walk(
        seq,
        config.horizon,
        _integer(params, "samples", 1000),
        config.seed,
        [[int(n) for n in block] for block in blocks] if blocks else None,
    )
    return {"walk": stats.to_json()}, ()


# pipeline


def _pipeline(result: PipelineResult) -> HandlerResult:
    return {"output": result.to_json()["output"], "report": result.report}, result.certificates


def _flow(document: Mapping[str, object]) -> PoissonFlowSpec:
    return PoissonFlowSpec.from_json(require(document, "flow", "input"))


@handler(Command.PIPELINE, "itpfi2poisson")
def _pipeline_itpfi2poisson(document, params, config) -> HandlerResult:
    spec = ITPFI2Spec.from_json(require(document, "itpfi2", "input"))
    return _pipeline(itpfi2_to_poisson(spec, config.eps_trunc))


@handler(Command.PIPELINE, "poisson2itpfi")
def _pipeline_poisson2itpfi(document, params, config) -> HandlerResult:
    intensities = measures_from_config(require(document, "intensities", "input"))
    return _pipeline(poisson_to_itpfi2(intensities, config.eps_trunc))


@handler(Command.PIPELINE, "2pt2poisson")
def _pipeline_two_point_to_poisson(document, params, config) -> HandlerResult:
    measures = measures_from_config(require(document, "measures", "input"))
    return _pipeline(
        two_point_to_poisson(measures, _number(params, "variance_bound"), config.eps_trunc)
    )


@handler(Command.PIPELINE, "poisson22pt")
def _pipeline_poisson_to_two_point(document, params, config) -> HandlerResult:
    return _pipeline(poisson_to_two_point(_flow(document), eps_trunc=config.eps_trunc))


@handler(Command.PIPELINE, "split")
def _pipeline_split(document, params, config) -> HandlerResult:
    return _pipeline(verify_split(_flow(document), _integer(params, "L"), config.eps_trunc))


@handler(Command.PIPELINE, "almostperiodic")
def _pipeline_almost_periodic(document, params, config) -> HandlerResult:
    depth = _integer(params, "depth", 5)
    if "thetas" in params:
        thetas = [_number({"t": t}, "t") for t in params["thetas"]]
    else:
        theta = _number(params, "theta")
        count = _integer(params, "characters", depth)
        thetas = [(j * theta) % 1.0 for j in range(count)]
    seeds = (
        _sequence(document, "sequence", config) if "sequence" in document else rotation_seeds()
    )
    result = almost_periodic_pipeline(
        AlmostPeriodicTarget(tuple(thetas), seeds),
        depth,
        config.eps_trunc,
        translation_budget=_integer(params, "budget", TRANSLATION_BUDGET),
    )
    return _pipeline(result)


@handler(Command.PIPELINE, "binomcheck")
def _pipeline_binomial(document, params, config) -> HandlerResult:
    check = binomial_approx_check(
        measure_from_config(require(document, "P", "input")),
        measure_from_config(require(document, "Q", "input")),
        _number(params, "alpha"),
        _number(params, "beta"),
        _integer(params, "L"),
    )
    series = finite_series("binomial", [check.exact_tv], [check.bound]).check_bounds()
    return check.to_json(), (series,)


@handler(Command.PIPELINE, "itpfireduce")
def _pipeline_itpfi_reduce(document, params, config) -> HandlerResult:
    vectors = require(document, "vectors", "input")
    if not isinstance(vectors, list) or not vectors:
        raise InputError("vectors must be a nonempty list of rows")
    N = _integer(params, "N", len(vectors[0]))
    collapse = bool(params.get("collapse_unit_slice", True))
    return _pipeline(itpfi_bounded_reduce(vectors, N, collapse_unit_slice=collapse))


# bernoulli


def _family(document: Mapping[str, object], config: RunConfig):
    table = require(document, "family", "input")
    if not isinstance(table, Mapping):
        raise InputError("[family] must be a table")
    return family_from_config(table, config.eps_trunc)


def _witness(params: Params):
    kind = params.get("witness")
    if kind is None:
        return None
    if kind == "linear":
        return LinearGrowthWitness(_number(params, "slope"), _number(params, "offset", 0.0))
    if kind == "bounded":
        return BoundedCocycleWitness(_number(params, "bound"))
    raise InputError(f"unknown witness {kind!r} (expected 'linear' or 'bounded')")


@handler(Command.BERNOULLI, "kakutani")
def _bernoulli_kakutani(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    g = _integer(params, "g", 1)
    series = kakutani_check(
        fam,
        g,
        config.horizon,
        tail_bound=_optional_number(params, "tail_bound"),
        threshold=config.divergence_threshold,
    )
    return {"g": g}, (series,)


@handler(Command.BERNOULLI, "cocycle")
def _bernoulli_cocycle(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    k = _integer(params, "k", 1)
    series = cocycle_norm(fam, k, config.horizon)
    return {"k": k, "norm_sq": series.total}, (series,)


@handler(Command.BERNOULLI, "dissipative")
def _bernoulli_dissipative(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    k_range = _integer(params, "k_range", config.horizon)
    series = dissipativity_certificate(
        fam, k_range, config.horizon, _witness(params), config.divergence_threshold
    )
    return {"k_range": k_range, "note": series.note}, (series,)


@handler(Command.BERNOULLI, "bridge")
def _bernoulli_bridge(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    result = hellinger_bridge(
        fam,
        _integer(params, "depth", min(10, config.horizon)),
        config.horizon,
        _number(params, "tolerance", BRIDGE_TOLERANCE),
    )
    return {"bridge": result.to_json()}, ()


@handler(Command.BERNOULLI, "core")
def _bernoulli_core(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    core = [str(label) for label in require(params, "core", "params")]
    series = conservative_core_check(
        fam, core, config.horizon, _optional_number(params, "tail_bound")
    )
    return {"core": core}, (series,)


def _weights(params: Params, key: str) -> Dict[str, float]:
    table = require(params, key, "params")
    if not isinstance(table, Mapping):
        raise InputError(f"parameter {key!r} must be a table of label = weight")
    return {str(label): float(w) for label, w in table.items()}


@handler(Command.BERNOULLI, "type2a")
def _bernoulli_type_II1(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    certificate = type_II1_check(
        fam, _weights(params, "nu"), config.horizon, _optional_number(params, "tail_bound")
    )
    return {"type": certificate.to_json()}, certificate.series


def _set_rule(labels: Sequence[str], kind: str) -> Callable[[int], Sequence[str]]:
    """𝒰_n as every label, or the first |n| + 1 labels."""
    if kind == "all":
        return lambda n: labels
    if kind == "prefix":
        return lambda n: labels[: abs(n) + 1]
    raise InputError(f"unknown set rule {kind!r} (expected 'all' or 'prefix')")


@handler(Command.BERNOULLI, "type2b")
def _bernoulli_type_IIinf(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    infinite_tail = bool(params.get("infinite_tail", False))
    if params.get("nu", "counting") == "counting":
        nu = SigmaFiniteMeasure.counting(fam.labels, infinite_tail)
    else:
        nu = SigmaFiniteMeasure(_weights(params, "nu"), infinite_tail)

    sets = _set_rule(fam.labels, str(params.get("sets", "all")))
    bounds = params.get("tail_bounds", [None, None])
    if not isinstance(bounds, list) or len(bounds) != 2:
        raise InputError("tail_bounds must be a pair")
    certificate = type_IIinf_check(
        fam,
        nu,
        sets,
        config.horizon,
        tuple(None if b is None else float(b) for b in bounds),
    )
    return {"type": certificate.to_json()}, certificate.series


@handler(Command.BERNOULLI, "structure")
def _bernoulli_structure(document, params, config) -> HandlerResult:
    fam = _family(document, config)
    k_range = params.get("k_range")
    report = structure_report(
        fam,
        config.horizon,
        k_range=None if k_range is None else int(k_range),
        witness=_witness(params),
        atom=None if params.get("atom") is None else str(params["atom"]),
        atom_tail_bound=_optional_number(params, "atom_tail_bound"),
        core_tail_bound=_optional_number(params, "core_tail_bound"),
    )
    payload = report.to_json()
    payload.pop("certificates")
    return {"structure": payload}, report.certificates


# suspend


def _intensity(document: Mapping[str, object]) -> IntensitySpec:
    table = require(document, "suspension", "input")
    if not isinstance(table, Mapping):
        raise InputError("[suspension] must be a table")
    return intensity_from_config(table)


def _group_elements(params: Params, key: str, default: object) -> list:
    value = params.get(key, default)
    items = value if isinstance(value, list) else [value]
    return [tuple(int(x) for x in g) if isinstance(g, list) else int(g) for g in items]


@handler(Command.SUSPEND, "kappa")
def _suspend_kappa(document, params, config) -> HandlerResult:
    spec = _intensity(document)
    level_horizon = params.get("level_horizon")
    levels = None if level_horizon is None else int(level_horizon)
    values = [
        {"g": g, "kappa": kappa_eval(spec, g, levels)} for g in _group_elements(params, "g", 1)
    ]
    return {"kappa": values}, ()


@handler(Command.SUSPEND, "growth")
def _suspend_growth(document, params, config) -> HandlerResult:
    spec = _intensity(document)
    grid = [float(s) for s in params.get("s_grid", [1.0, 2.0, 3.0, 4.0, 5.0])]
    probe = (
        _group_elements(params, "probe", [])
        if "probe" in params
        else probe_window(_integer(params, "probe_radius", config.horizon))
    )
    report = conservativity_growth(spec, grid, probe, _optional_number(params, "kappa_bound"))
    return {"growth": report.to_json()}, ()


def _selected(spec: IntensitySpec, params: Params) -> Tuple[IntensitySpec, Dict[str, object]]:
    selection = subsequence_select(
        spec.lambdas, spec.a, spec.folner, _number(params, "growth", SELECTION_GROWTH)
    )
    return IntensitySpec(spec.lambdas, spec.a, selection.folner), selection.to_json()


@handler(Command.SUSPEND, "select")
def _suspend_select(document, params, config) -> HandlerResult:
    spec, selection = _selected(_intensity(document), params)
    return {"selection": selection, "spec": spec.to_dict()}, ()


@handler(Command.SUSPEND, "emit")
def _suspend_emit(document, params, config) -> HandlerResult:
    spec = _intensity(document)
    results: Dict[str, object] = {}
    if params.get("select", False):
        spec, results["selection"] = _selected(spec, params)
    level_horizon = params.get("level_horizon")
    emitted = emit_bernoulli(
        spec, None if level_horizon is None else int(level_horizon), config.eps_trunc
    )
    certificates = tuple(
        emitted.kakutani_certificate(g, config.horizon)
        for g in _group_elements(params, "g", [1])
    )
    results["family"] = dict(
        spec.to_dict(),
        kind="suspension",
        level_horizon=emitted.level_horizon,
        eps_trunc=config.eps_trunc,
    )
    results["labels"] = len(emitted.family.labels)
    results["supports"] = list(emitted.supports)
    if params.get("family_out"):
        target = write_family_document(results["family"], Path(str(params["family_out"])))
        results["family_out"] = str(target)
    return results, certificates


def write_family_document(family: Mapping[str, object], path: Path) -> Path:
    """Save a ``{"family": ...}`` document that ``flowlab bernoulli`` reads back.

    The format follows the loader: JSON for a ``.json`` path, TOML otherwise.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"family": jsonable(family)}
    if path.suffix.lower() == ".json":
        text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    else:
        text = tomli_w.dumps(document)
    path.write_text(text, encoding="utf-8")
    return path


@handler(Command.SUSPEND, "flowspec")
def _suspend_flowspec(document, params, config) -> HandlerResult:
    spec = _intensity(document)
    flow = associated_flow_spec(spec.lambdas, spec.a)
    certificates: Tuple[CertificateSeries, ...] = ()
    if "omega" in params:
        certificates = (
            eigenvalue_certificate(
                flow.laws(config.eps_trunc),
                _number(params, "omega"),
                len(flow),
                tail_bound=_optional_number(params, "tail_bound"),
                threshold=config.divergence_threshold,
            ),
        )
    return {"flow": flow.to_json()}, certificates
