"""Finitely supported measures on the real line.

A DiscreteMeasure is an immutable list of atoms with strictly increasing
positions plus a ``defect``: mass that was deliberately truncated away and
must be carried by every downstream bound.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from flowlab.config import MASS_TOL, MERGE_RTOL
from flowlab.errors import DomainError


def _merge_sorted(
    positions: np.ndarray, masses: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Sort atoms and merge positions closer than the merge tolerance."""
    if positions.size == 0:
        return positions, masses

    order = np.argsort(positions, kind="stable")
    positions = positions[order]
    masses = masses[order]

    tol = MERGE_RTOL * np.maximum(1.0, np.abs(positions[:-1]))
    starts = np.concatenate(([True], np.diff(positions) > tol))
    first = np.flatnonzero(starts)

    merged_positions = positions[first]
    merged_masses = np.add.reduceat(masses, first)

    keep = merged_masses > 0.0
    return merged_positions[keep], merged_masses[keep]


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A finite nonnegative measure with finitely many atoms.

    Attributes:
        positions: Strictly increasing atom positions
        masses: Strictly positive atom masses
        defect: Truncated mass, tracked but not located
    """

    positions: np.ndarray
    masses: np.ndarray
    defect: float = 0.0

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions, dtype=np.float64).ravel()
        masses = np.asarray(self.masses, dtype=np.float64).ravel()
        if positions.shape != masses.shape:
            raise DomainError("positions and masses must have equal length")
        if not np.all(np.isfinite(positions)) or not np.all(np.isfinite(masses)):
            raise DomainError("atoms must be finite")
        if np.any(masses < 0.0):
            raise DomainError("atom masses must be nonnegative")
        if not math.isfinite(self.defect) or self.defect < 0.0:
            raise DomainError(f"defect must be a nonnegative real, got {self.defect}")

        positions, masses = _merge_sorted(positions, masses)
        object.__setattr__(self, "positions", _frozen(positions))
        object.__setattr__(self, "masses", _frozen(masses))
        object.__setattr__(self, "defect", float(self.defect))

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[Tuple[float, float]],
        defect: float = 0.0,
    ) -> "DiscreteMeasure":
        """Build a measure from (position, mass) pairs, merging duplicates."""
        pairs = list(atoms)
        if not pairs:
            return cls(np.empty(0), np.empty(0), defect)
        positions, masses = zip(*pairs)
        return cls(np.array(positions, dtype=float), np.array(masses, dtype=float), defect)

    @classmethod
    def from_dict(cls, atoms: Dict[float, float], defect: float = 0.0) -> "DiscreteMeasure":
        """Build a measure from a ``{position: mass}`` mapping."""
        return cls.from_atoms(atoms.items(), defect)

    @classmethod
    def from_json(cls, payload: Dict[str, object]) -> "DiscreteMeasure":
        """Inverse of :meth:`to_json`."""
        try:
            atoms = [(float(p), float(m)) for p, m in payload["atoms"]]
            defect = float(payload.get("defect", 0.0))
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed measure payload: {e}") from e
        return cls.from_atoms(atoms, defect)

    def to_json(self) -> Dict[str, object]:
        """Serialize as ``{"atoms": [[pos, mass], ...], "defect": d}``."""
        return {
            "atoms": [[float(p), float(m)] for p, m in zip(self.positions, self.masses)],
            "defect": self.defect,
        }

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return [(float(p), float(m)) for p, m in zip(self.positions, self.masses)]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    @property
    def intended_mass(self) -> float:
        """Atom mass plus defect."""
        return self.total_mass + self.defect

    @property
    def support_width(self) -> float:
        if self.positions.size == 0:
            return 0.0
        return float(self.positions[-1] - self.positions[0])

    def __len__(self) -> int:
        return int(self.positions.size)

    def __repr__(self) -> str:
        shown = ", ".join(f"{p:g}: {m:.6g}" for p, m in self.atoms[:6])
        if len(self) > 6:
            shown += ", ..."
        return f"DiscreteMeasure({{{shown}}}, defect={self.defect:.3g})"

    def is_probability(self, tol: float = MASS_TOL) -> bool:
        return abs(self.intended_mass - 1.0) <= tol

    def mass_at(self, x: float) -> float:
        """Mass of the atom at ``x`` (zero if there is none)."""
        if self.positions.size == 0:
            return 0.0
        i = int(np.searchsorted(self.positions, x))
        tol = MERGE_RTOL * max(1.0, abs(x))
        for j in (i - 1, i):
            if 0 <= j < self.positions.size and abs(self.positions[j] - x) <= tol:
                return float(self.masses[j])
        return 0.0

    def allclose(self, other: "DiscreteMeasure", atol: float = 1e-12) -> bool:
        """Atomwise comparison over the union of supports."""
        _, a, b = align(self, other)
        return bool(np.all(np.abs(a - b) <= atol))

    def translate(self, t: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.positions + t, self.masses, self.defect)

    def reflect(self) -> "DiscreteMeasure":
        """The measure U ↦ μ(−U)."""
        return DiscreteMeasure(-self.positions, self.masses, self.defect)

    def scale_mass(self, c: float) -> "DiscreteMeasure":
        if c < 0:
            raise DomainError(f"mass scale must be nonnegative, got {c}")
        return DiscreteMeasure(self.positions, self.masses * c, self.defect * c)

    def normalized(self) -> "DiscreteMeasure":
        """Rescale so that atoms plus defect have total mass one."""
        total = self.intended_mass
        if total <= 0.0:
            raise DomainError("cannot normalize a zero measure")
        return self.scale_mass(1.0 / total)

    def restrict(
        self,
        low: float,
        high: float,
        closed_low: bool = False,
        closed_high: bool = True,
    ) -> "DiscreteMeasure":
        """Keep atoms inside the interval; the default is ``(low, high]``.

        The defect is dropped: it has no position, so it cannot be attributed
        to any interval.
        """
        x = self.positions
        above = x >= low if closed_low else x > low
        below = x <= high if closed_high else x < high
        keep = above & below
        return DiscreteMeasure(x[keep], self.masses[keep], 0.0)


def zero_measure() -> DiscreteMeasure:
    return DiscreteMeasure(np.empty(0), np.empty(0))


def dirac(x: float, mass: float = 1.0) -> DiscreteMeasure:
    """The measure ``mass · δ_x``."""
    return DiscreteMeasure(np.array([x]), np.array([mass]))


def align(
    mu: DiscreteMeasure, nu: DiscreteMeasure
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Put two measures on their common support.

    Returns:
        Tuple of (positions, masses of mu, masses of nu)
    """
    positions = np.concatenate((mu.positions, nu.positions))
    if positions.size == 0:
        empty = np.empty(0)
        return empty, empty, empty

    tags = np.concatenate((np.zeros(len(mu), dtype=int), np.ones(len(nu), dtype=int)))
    masses = np.concatenate((mu.masses, nu.masses))
    order = np.argsort(positions, kind="stable")
    positions, tags, masses = positions[order], tags[order], masses[order]

    tol = MERGE_RTOL * np.maximum(1.0, np.abs(positions[:-1]))
    starts = np.concatenate(([True], np.diff(positions) > tol))
    group = np.cumsum(starts) - 1
    size = int(group[-1]) + 1

    a = np.zeros(size)
    b = np.zeros(size)
    np.add.at(a, group[tags == 0], masses[tags == 0])
    np.add.at(b, group[tags == 1], masses[tags == 1])
    return positions[starts], a, b


def mix(weights: Sequence[float], measures: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    """The combination Σ w_i μ_i; defects add with the same weights."""
    if len(weights) != len(measures):
        raise DomainError("mixture weights and measures must have equal length")
    if any(w < 0 for w in weights):
        raise DomainError("mixture weights must be nonnegative")
    if not measures:
        return zero_measure()

    positions = np.concatenate([m.positions for m in measures])
    masses = np.concatenate([m.masses * w for w, m in zip(weights, measures)])
    defect = sum(w * m.defect for w, m in zip(weights, measures))
    return DiscreteMeasure(positions, masses, defect)


def add(*measures: DiscreteMeasure) -> DiscreteMeasure:
    """Sum of measures (mixture with unit weights)."""
    return mix([1.0] * len(measures), measures)


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Convolution μ * ν by pairwise sums of atoms."""
    if len(mu) == 0 or len(nu) == 0:
        defect = mu.defect * nu.intended_mass + nu.defect * mu.total_mass
        return DiscreteMeasure(np.empty(0), np.empty(0), defect)

    positions = np.add.outer(mu.positions, nu.positions).ravel()
    masses = np.multiply.outer(mu.masses, nu.masses).ravel()
    defect = (
        mu.defect * nu.total_mass
        + nu.defect * mu.total_mass
        + mu.defect * nu.defect
    )
    return DiscreteMeasure(positions, masses, defect)


def convolve_power(mu: DiscreteMeasure, k: int) -> DiscreteMeasure:
    """The k-fold convolution power μ^{*k}; k = 0 gives δ_0."""
    if k < 0:
        raise DomainError(f"convolution power must be nonnegative, got {k}")
    result = dirac(0.0)
    base = mu
    while k:
        if k & 1:
            result = convolve(result, base)
        k >>= 1
        if k:
            base = convolve(base, base)
    return result


def moments(mu: DiscreteMeasure) -> Tuple[float, float, float]:
    """Mass, mean and variance of the normalized atoms.

    Raises:
        DomainError: If the measure has no atom mass
    """
    mass = mu.total_mass
    if mass <= 0.0:
        raise DomainError("mean and variance need a measure with positive mass")
    weights = mu.masses / mass
    mean = float(np.dot(weights, mu.positions))
    variance = float(np.dot(weights, (mu.positions - mean) ** 2))
    return mass, mean, max(variance, 0.0)


def second_moment_about(mu: DiscreteMeasure, t: float) -> float:
    """The unnormalized integral ∫ (x − t)² dμ(x)."""
    return float(np.dot(mu.masses, (mu.positions - t) ** 2))


def char_fn(mu: DiscreteMeasure, omega: float) -> complex:
    """Characteristic function Σ_j m_j exp(iω x_j)."""
    if len(mu) == 0:
        return 0j
    return complex(np.dot(mu.masses, np.exp(1j * omega * mu.positions)))


class AlgebraOp(str, Enum):
    TRANSLATE = "translate"
    SCALE_MASS = "scale_mass"
    RESTRICT = "restrict"
    MIX = "mix"


def measure_algebra(op: str, *args, **kwargs) -> DiscreteMeasure:
    """Dispatch one of the elementary measure operations by name.

    ``translate(mu, t)``, ``scale_mass(mu, c)``,
    ``restrict(mu, low, high, closed_low=False, closed_high=True)`` and
    ``mix(weights, measures)``.
    """
    try:
        kind = AlgebraOp(op)
    except ValueError:
        raise DomainError(f"unknown measure operation {op!r}") from None

    if kind is AlgebraOp.MIX:
        return mix(*args, **kwargs)
    mu, *rest = args
    if kind is AlgebraOp.TRANSLATE:
        return mu.translate(*rest, **kwargs)
    if kind is AlgebraOp.SCALE_MASS:
        return mu.scale_mass(*rest, **kwargs)
    return mu.restrict(*rest, **kwargs)


class IndexDomain(str, Enum):
    NATURAL = "N"
    INTEGER = "Z"


@dataclass(frozen=True)
class MeasureSequence:
    """A lazily generated family of measures indexed by ℕ or ℤ.

    The generator must be a pure function of the index.
    """

    generator: Callable[[int], DiscreteMeasure]
    index_domain: IndexDomain = IndexDomain.NATURAL
    description: str = ""
    start: int = 1
    _cache: Dict[int, DiscreteMeasure] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __getitem__(self, n: int) -> DiscreteMeasure:
        if self.index_domain is IndexDomain.NATURAL and n < self.start:
            raise DomainError(f"index {n} is outside the domain n >= {self.start}")
        cached = self._cache.get(n)
        if cached is None:
            cached = self.generator(n)
            self._cache[n] = cached
        return cached

    def window(self, horizon: int) -> List[int]:
        """Indices start..start+horizon-1 over ℕ, or −horizon..horizon over ℤ."""
        if horizon < 0:
            raise DomainError(f"horizon must be nonnegative, got {horizon}")
        if self.index_domain is IndexDomain.INTEGER:
            return list(range(-horizon, horizon + 1))
        return list(range(self.start, self.start + horizon))

    def translated(self, shift: Callable[[int], float]) -> "MeasureSequence":
        """Translate μ_n by shift(n)."""
        return MeasureSequence(
            lambda n: self[n].translate(shift(n)),
            self.index_domain,
            f"{self.description} (translated)",
            self.start,
        )

    @classmethod
    def from_list(
        cls,
        measures: Sequence[DiscreteMeasure],
        description: str = "",
        start: int = 1,
    ) -> "MeasureSequence":
        """A finite list padded with δ_0, which leaves tail boundaries unchanged."""
        items = list(measures)

        def generator(n: int) -> DiscreteMeasure:
            i = n - start
            return items[i] if 0 <= i < len(items) else dirac(0.0)

        return cls(generator, IndexDomain.NATURAL, description, start)


def ensure_probability(mu: DiscreteMeasure, name: str = "measure") -> None:
    if not mu.is_probability():
        raise DomainError(
            f"{name} must be a probability measure, has mass {mu.intended_mass:.12g}"
        )
