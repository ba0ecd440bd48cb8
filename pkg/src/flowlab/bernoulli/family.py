"""Nonsingular Bernoulli families (μ_n)_{n∈ℤ} over a finite labelled base.

Every μ_n is stored as a DiscreteMeasure whose positions are label indices
0, 1, ..., len(labels) − 1, so all metrics apply unchanged.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from flowlab.config import MASS_TOL
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, IndexDomain, MeasureSequence
from flowlab.utils.expressions import index_function

logger = logging.getLogger(__name__)

MassRow = Sequence[float]
Expression = Union[str, int, float]


def symmetric_indices(horizon: int) -> List[int]:
    """0, −1, 1, −2, 2, ..., so prefix sums grow outward from the origin."""
    if horizon < 0:
        raise DomainError(f"horizon must be nonnegative, got {horizon}")
    indices = [0]
    for h in range(1, horizon + 1):
        indices.extend((-h, h))
    return indices


def _row_measure(row: MassRow, size: int, defect: float = 0.0) -> DiscreteMeasure:
    masses = np.asarray(list(row), dtype=np.float64)
    if masses.shape != (size,):
        raise DomainError(f"mass row must have {size} entries, got {masses.size}")
    if np.any(masses < 0.0) or not np.all(np.isfinite(masses)):
        raise DomainError(f"masses must be finite and nonnegative: {list(row)}")
    total = float(masses.sum()) + defect
    if abs(total - 1.0) > MASS_TOL:
        raise DomainError(f"mass row must sum to 1, sums to {total:.12g}")
    return DiscreteMeasure(np.arange(size, dtype=np.float64), masses, defect)


@dataclass(frozen=True)
class BernoulliFamily:
    """Probability measures μ_n on the labelled base X_0, for every n ∈ ℤ."""

    labels: Tuple[str, ...]
    measures: MeasureSequence
    description: str = ""
    _positions: Dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        if not labels:
            raise DomainError("a Bernoulli family needs at least one base atom")
        if len(set(labels)) != len(labels):
            raise DomainError(f"base atom labels must be distinct: {labels}")
        if self.measures.index_domain is not IndexDomain.INTEGER:
            raise DomainError("a Bernoulli family is indexed by the integers")
        object.__setattr__(self, "labels", labels)
        self._positions.update({label: i for i, label in enumerate(labels)})

    @classmethod
    def from_rows(
        cls,
        labels: Sequence[str],
        row: Callable[[int], MassRow],
        description: str = "",
    ) -> "BernoulliFamily":
        """Build a family from a function returning the masses of μ_n per label."""
        size = len(labels)
        sequence = MeasureSequence(
            lambda n: _row_measure(row(n), size), IndexDomain.INTEGER, description
        )
        return cls(tuple(labels), sequence, description)

    def __getitem__(self, n: int) -> DiscreteMeasure:
        return self.measures[n]

    def __len__(self) -> int:
        return len(self.labels)

    def label_index(self, label: str) -> int:
        try:
            return self._positions[str(label)]
        except KeyError:
            raise DomainError(f"unknown base atom {label!r}") from None

    def masses(self, n: int) -> np.ndarray:
        """Masses of μ_n aligned with ``labels``."""
        mu = self[n]
        row = np.zeros(len(self.labels))
        row[mu.positions.astype(np.int64)] = mu.masses
        return row

    def mass_of(self, n: int, labels: Iterable[str]) -> float:
        row = self.masses(n)
        return float(sum(row[self.label_index(label)] for label in set(labels)))

    def window(self, horizon: int) -> List[int]:
        return symmetric_indices(horizon)

    def singular_atoms(self, horizon: int) -> List[Tuple[int, str]]:
        """Pairs (n, x) where μ_n({x}) = 0 although some μ_m in the window charges x.

        Such pairs break mutual absolute continuity on the window and are
        logged as warnings.
        """
        indices = self.window(horizon)
        rows = np.stack([self.masses(n) for n in indices])
        charged = np.any(rows > 0.0, axis=0)
        flagged = [
            (n, self.labels[j])
            for i, n in enumerate(indices)
            for j in np.flatnonzero(charged & (rows[i] == 0.0))
        ]
        if flagged:
            logger.warning(
                "%d index/atom pairs break mutual absolute continuity on the window",
                len(flagged),
            )
        return flagged

    def to_table(self, indices: Iterable[int], default: Optional[int] = None) -> Dict[str, object]:
        """TOML-ready tabulation of the given rows, with an optional default row."""
        payload: Dict[str, object] = {
            "labels": list(self.labels),
            "kind": "table",
            "rows": {str(n): [float(m) for m in self.masses(n)] for n in indices},
        }
        if default is not None:
            payload["default"] = [float(m) for m in self.masses(default)]
        return payload


def bernoulli_row(p: float) -> Tuple[float, float]:
    """Masses (1 − p, p) of Bern(p) on the labels ("0", "1")."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"Bernoulli parameter must lie in [0, 1], got {p}")
    return (1.0 - p, p)


def constant_family(labels: Sequence[str], row: MassRow) -> BernoulliFamily:
    fixed = tuple(float(m) for m in row)
    return BernoulliFamily.from_rows(labels, lambda n: fixed, "constant")


def step_family(p_before: float, p_after: float, split: int = 0) -> BernoulliFamily:
    """Bern(p_before) for n < split and Bern(p_after) for n ≥ split."""
    before, after = bernoulli_row(p_before), bernoulli_row(p_after)
    return BernoulliFamily.from_rows(
        ("0", "1"),
        lambda n: before if n < split else after,
        f"step Bern({p_before:g}) -> Bern({p_after:g}) at {split}",
    )


def bernoulli_family(p: Union[Expression, Callable[[int], float]]) -> BernoulliFamily:
    """Bern(p_n) with p_n a function, a number or an expression in ``n``."""
    fn = p if callable(p) else index_function(p)
    description = f"Bern({p})" if not callable(p) else "Bern(p_n)"
    return BernoulliFamily.from_rows(("0", "1"), lambda n: bernoulli_row(fn(n)), description)


def expression_family(labels: Sequence[str], expressions: Sequence[Expression]) -> BernoulliFamily:
    """One mass expression in ``n`` per label; every row must sum to 1."""
    if len(labels) != len(expressions):
        raise DomainError("need one mass expression per base atom")
    fns = [index_function(e) for e in expressions]
    return BernoulliFamily.from_rows(
        labels, lambda n: [fn(n) for fn in fns], "mass expressions"
    )


def mixture_family(
    components: Sequence[BernoulliFamily], weights: Sequence[Expression]
) -> BernoulliFamily:
    """Σ_i w_i(n) μ_n^{(i)} over components sharing one label set."""
    if not components or len(components) != len(weights):
        raise DomainError("need one weight schedule per mixture component")
    labels = components[0].labels
    if any(c.labels != labels for c in components):
        raise DomainError("mixture components must share their base atoms")
    fns = [index_function(w) for w in weights]

    def row(n: int) -> np.ndarray:
        return sum(fn(n) * c.masses(n) for fn, c in zip(fns, components))

    return BernoulliFamily.from_rows(labels, row, "mixture schedule")


def table_family(
    labels: Sequence[str],
    rows: Mapping[int, MassRow],
    default: Optional[MassRow] = None,
) -> BernoulliFamily:
    """Tabulated rows; indices without a row use ``default``."""
    table = {int(n): tuple(float(m) for m in row) for n, row in rows.items()}
    fallback = None if default is None else tuple(float(m) for m in default)

    def row(n: int) -> MassRow:
        if n in table:
            return table[n]
        if fallback is None:
            raise DomainError(f"no row for index {n} and no default row")
        return fallback

    return BernoulliFamily.from_rows(labels, row, "table")
