"""Domain objects from parsed TOML/JSON tables.

Sequence tables look like::

    [sequence]
    domain = "N"
    kind = "atoms"              # or "poisson", "table"
    atoms = [[0, "1 - 2^(-n)"], [1, "2^(-n)"]]

Position and mass entries are numbers or expressions in ``n``.
"""

from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from flowlab.bernoulli.family import (
    BernoulliFamily,
    bernoulli_family,
    constant_family,
    expression_family,
    mixture_family,
    step_family,
    table_family,
)
from flowlab.config import DEFAULT_EPS_TRUNC
from flowlab.errors import InputError
from flowlab.measures.discrete import DiscreteMeasure, IndexDomain, MeasureSequence, dirac
from flowlab.measures.poisson import compound_poisson
from flowlab.suspension.folner import FolnerSpec
from flowlab.suspension.generator import IntensitySpec, emit_bernoulli
from flowlab.utils.expressions import index_function


def require(table: Mapping[str, object], key: str, where: str) -> object:
    if key not in table:
        raise InputError(f"{where}: missing key {key!r}")
    return table[key]


def measure_from_config(value: object) -> DiscreteMeasure:
    """A measure given as ``{atoms = [[x, m], ...], defect = d}`` or a bare pair list."""
    if isinstance(value, Mapping):
        return DiscreteMeasure.from_json(value)
    if isinstance(value, list):
        return DiscreteMeasure.from_json({"atoms": value})
    raise InputError(f"expected a measure table or a list of pairs, got {type(value).__name__}")


def measures_from_config(values: object) -> List[DiscreteMeasure]:
    if not isinstance(values, list):
        raise InputError("expected a list of measures")
    return [measure_from_config(v) for v in values]


def _atom_rules(atoms: object) -> List[Tuple[Callable[[int], float], Callable[[int], float]]]:
    if not isinstance(atoms, list) or not all(isinstance(a, list) and len(a) == 2 for a in atoms):
        raise InputError("atoms must be a list of [position, mass] pairs")
    return [(index_function(x), index_function(m)) for x, m in atoms]


def sequence_from_config(
    table: Mapping[str, object], eps_trunc: float = DEFAULT_EPS_TRUNC
) -> MeasureSequence:
    """Build the transition sequence described by a ``[sequence]`` table."""
    try:
        domain = IndexDomain(str(table.get("domain", "N")))
    except ValueError:
        raise InputError(
            f"sequence domain must be 'N' or 'Z', got {table.get('domain')!r}"
        ) from None
    start = int(table.get("start", 1 if domain is IndexDomain.NATURAL else 0))
    kind = str(table.get("kind", "atoms"))

    if kind in ("atoms", "poisson"):
        rules = _atom_rules(require(table, "atoms", "sequence"))

        def atoms_at(n: int) -> DiscreteMeasure:
            return DiscreteMeasure.from_atoms([(x(n), m(n)) for x, m in rules])

        if kind == "atoms":
            return MeasureSequence(atoms_at, domain, kind, start)
        return MeasureSequence(
            lambda n: compound_poisson(atoms_at(n), eps_trunc), domain, kind, start
        )

    if kind == "table":
        items = measures_from_config(require(table, "measures", "sequence"))

        def tabulated(n: int) -> DiscreteMeasure:
            i = n - start
            return items[i] if 0 <= i < len(items) else dirac(0.0)

        return MeasureSequence(tabulated, domain, "table", start)

    raise InputError(f"unknown sequence kind {kind!r}")


def intensity_from_config(table: Mapping[str, object]) -> IntensitySpec:
    """``lambda = [...]``, ``a = [...]`` and a ``[folner]`` table."""
    lambdas = require(table, "lambda", "suspension spec")
    drifts = require(table, "a", "suspension spec")
    folner = require(table, "folner", "suspension spec")
    if not isinstance(folner, Mapping):
        raise InputError("suspension spec: folner must be a table")
    return IntensitySpec(
        tuple(float(x) for x in lambdas),
        tuple(float(x) for x in drifts),
        FolnerSpec.from_dict(folner),
    )


def _labels(table: Mapping[str, object]) -> Sequence[str]:
    return [str(label) for label in require(table, "labels", "family")]


def family_from_config(
    table: Mapping[str, object], eps_trunc: float = DEFAULT_EPS_TRUNC
) -> BernoulliFamily:
    """Build the Bernoulli family described by a ``[family]`` table."""
    kind = str(require(table, "kind", "family"))
    if kind == "step":
        return step_family(
            float(require(table, "p_before", "family")),
            float(require(table, "p_after", "family")),
            int(table.get("split", 0)),
        )
    if kind == "constant":
        return constant_family(_labels(table), require(table, "masses", "family"))
    if kind == "bernoulli":
        return bernoulli_family(require(table, "p", "family"))
    if kind == "masses":
        return expression_family(_labels(table), require(table, "masses", "family"))
    if kind == "mixture":
        components = [
            family_from_config(c, eps_trunc) for c in require(table, "components", "family")
        ]
        return mixture_family(components, require(table, "weights", "family"))
    if kind == "table":
        rows: Dict[int, Sequence[float]] = {
            int(n): row for n, row in dict(require(table, "rows", "family")).items()
        }
        return table_family(_labels(table), rows, table.get("default"))
    if kind == "suspension":
        level_horizon = table.get("level_horizon")
        return emit_bernoulli(
            intensity_from_config(table),
            None if level_horizon is None else int(level_horizon),
            float(table.get("eps_trunc", eps_trunc)),
        ).family
    raise InputError(f"unknown family kind {kind!r}")
