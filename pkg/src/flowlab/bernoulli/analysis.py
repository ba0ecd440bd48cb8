"""Structure of the Bernoulli shift ⊗_n μ_n: nonsingularity, dissipativity and cores.

All sums run over symmetric windows ordered 0, −1, 1, ... so that the usual
prefix-sum evidence reads outward from the origin.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from flowlab.bernoulli.family import BernoulliFamily, symmetric_indices
from flowlab.config import (
    BRIDGE_TOLERANCE,
    DEFAULT_DIVERGENCE_THRESHOLD,
    DEFAULT_GROWTH_RATIO,
    STABILIZATION_TOL,
)
from flowlab.errors import DomainError, InternalError
from flowlab.metrics.distances import hellinger, hellinger_sq
from flowlab.tail.certificates import CertificateSeries, Verdict, build_series
from flowlab.utils.parallel import evaluate_terms

logger = logging.getLogger(__name__)

WINDOW_NOTE = "horizon-truncated window evidence"


def kakutani_check(
    fam: BernoulliFamily,
    g: int,
    horizon: int,
    tail_bound: Optional[float] = None,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> CertificateSeries:
    """Terms H²(μ_{g+h}, μ_h) for |h| ≤ horizon.

    The shift by g is nonsingular exactly when their sum over ℤ is finite.

    Raises:
        DomainError: If g is 0
    """
    if g == 0:
        raise DomainError("the Kakutani check needs a nonzero shift")
    indices = symmetric_indices(horizon)
    terms = evaluate_terms(lambda h: hellinger_sq(fam[g + h], fam[h]), indices)
    return build_series(
        f"kakutani[g={g}]", indices, terms, tail_bound=tail_bound, threshold=threshold
    )


def cocycle_norm(fam: BernoulliFamily, k: int, horizon: int) -> CertificateSeries:
    """Terms 2H²(μ_{m+k}, μ_m); the total is the windowed ‖c_k‖².

    Over ℤ the norms of k and −k agree. On a window the −k series holds the
    same summands shifted by k, so the two totals differ by the edge terms.
    """
    indices = symmetric_indices(horizon)
    terms = evaluate_terms(lambda m: 2.0 * hellinger_sq(fam[m + k], fam[m]), indices)
    return build_series(f"cocycle[k={k}]", indices, terms, note=WINDOW_NOTE)


@dataclass(frozen=True)
class LinearGrowthWitness:
    """Analytic lower bound ‖c_k‖² ≥ slope·|k| − offset for every k."""

    slope: float
    offset: float = 0.0

    def __post_init__(self) -> None:
        if not self.slope > 0.0 or self.offset < 0.0:
            raise DomainError("a linear growth witness needs slope > 0 and offset >= 0")

    def lower(self, k: int) -> float:
        return self.slope * abs(k) - self.offset

    def tail(self, k_range: int) -> float:
        """Σ_{|k| > k_range} exp(−(slope·|k| − offset)/2)."""
        ratio = math.exp(-self.slope / 2.0)
        return 2.0 * math.exp(self.offset / 2.0) * ratio ** (k_range + 1) / (1.0 - ratio)


@dataclass(frozen=True)
class BoundedCocycleWitness:
    """Analytic upper bound ‖c_k‖² ≤ bound for every k."""

    bound: float

    def __post_init__(self) -> None:
        if not (self.bound >= 0.0 and math.isfinite(self.bound)):
            raise DomainError(f"cocycle bound must be finite and nonnegative, got {self.bound}")


def cocycle_norms(fam: BernoulliFamily, k_range: int, horizon: int) -> Dict[int, float]:
    """Windowed ‖c_k‖² for |k| ≤ k_range."""
    norms = {}
    for k in symmetric_indices(k_range):
        if k == 0:
            norms[k] = 0.0
        elif -k in norms:
            norms[k] = norms[-k]
        else:
            norms[k] = cocycle_norm(fam, k, horizon).total
    return norms


def dissipativity_certificate(
    fam: BernoulliFamily,
    k_range: int,
    horizon: int,
    witness: Optional[object] = None,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> CertificateSeries:
    """Terms exp(−‖c_k‖²/2) for |k| ≤ k_range.

    A finite sum makes the shift dissipative. Window-truncated norms only
    overestimate terms, so the verdict is certified only through a witness: a
    LinearGrowthWitness supplies the tail bound, a BoundedCocycleWitness the
    divergence. Each witness is checked against the computed norms.

    Raises:
        DomainError: If a witness contradicts the windowed norms
    """
    norms = cocycle_norms(fam, k_range, horizon)
    indices = symmetric_indices(k_range)
    terms = [math.exp(-norms[k] / 2.0) for k in indices]

    tail_bound = None
    divergence = None
    note = f"heuristic: {WINDOW_NOTE}"
    if isinstance(witness, LinearGrowthWitness):
        for k in indices:
            if norms[k] < witness.lower(k) - 1e-9:
                raise DomainError(
                    f"linear growth witness fails at k={k}: "
                    f"{norms[k]:.12g} < {witness.lower(k):.12g}"
                )
        tail_bound = witness.tail(k_range)
        note = f"linear growth witness slope={witness.slope:g} offset={witness.offset:g}"
    elif isinstance(witness, BoundedCocycleWitness):
        for k in indices:
            if norms[k] > witness.bound + 1e-9:
                raise DomainError(
                    f"bounded cocycle witness fails at k={k}: {norms[k]:.12g} > {witness.bound:g}"
                )
        divergence = (
            f"cocycle norms bounded by {witness.bound:g}: "
            f"every term >= exp(-{witness.bound / 2:g})"
        )
        note = "bounded cocycle witness"
    elif witness is not None:
        raise DomainError(f"unsupported witness {witness!r}")

    return build_series(
        "dissipativity",
        indices,
        terms,
        tail_bound=tail_bound,
        divergence_witness=divergence,
        note=note,
        threshold=threshold,
    )


@dataclass(frozen=True)
class BridgeResult:
    """Pairs n_k ≤ −k, m_k ≥ k with the smallest H(μ_{n_k}, μ_{m_k}) on the window."""

    pairs: Tuple[Tuple[int, int, float], ...]
    found: bool
    floor: float

    def to_json(self) -> Dict[str, object]:
        return {
            "pairs": [list(p) for p in self.pairs],
            "found": self.found,
            "floor": self.floor,
        }


def hellinger_bridge(
    fam: BernoulliFamily,
    depth: int,
    horizon: int,
    tolerance: float = BRIDGE_TOLERANCE,
) -> BridgeResult:
    """Greedy search for Hellinger bridges between the two ends of the family.

    For every k ≤ depth the best pair over n ∈ [−horizon, −k], m ∈ [k, horizon]
    is kept; ties prefer indices closest to the origin. The bridge counts as
    found when the last distance is below ``tolerance``.
    """
    if not 1 <= depth <= horizon:
        raise DomainError(f"need 1 <= depth <= horizon, got depth={depth}, horizon={horizon}")
    left = list(range(-1, -horizon - 1, -1))
    right = list(range(1, horizon + 1))
    grid = np.array([[hellinger(fam[n], fam[m]) for m in right] for n in left])

    pairs = []
    for k in range(1, depth + 1):
        block = grid[k - 1 :, k - 1 :]
        i, j = np.unravel_index(np.argmin(block), block.shape)
        pairs.append((left[k - 1 + i], right[k - 1 + j], float(block[i, j])))

    floor = min(p[2] for p in pairs)
    found = pairs[-1][2] < tolerance
    logger.debug("bridge search: last distance %.6g, floor %.6g", pairs[-1][2], floor)
    return BridgeResult(tuple(pairs), found, floor)


@dataclass(frozen=True)
class AtomCertificate:
    label: str
    series: CertificateSeries
    certified: bool


def atom_series(
    fam: BernoulliFamily, label: str, horizon: int, tail_bound: Optional[float] = None
) -> CertificateSeries:
    """Terms 1 − μ_n({x}) for the base atom x."""
    j = fam.label_index(label)
    indices = symmetric_indices(horizon)
    terms = [1.0 - fam.masses(n)[j] for n in indices]
    return build_series(f"atom[{label}]", indices, terms, tail_bound=tail_bound)


def atom_fixed_point_check(
    fam: BernoulliFamily,
    horizon: int,
    tail_bound: Optional[float] = None,
    atom: Optional[str] = None,
) -> Optional[AtomCertificate]:
    """The base atom b with Σ_n (1 − μ_n({b})) < ∞, if there is one.

    ``tail_bound`` bounds the series of ``atom`` beyond the window and
    certifies it. Otherwise a stabilized window sum is accepted as window
    evidence. Two atoms can never both qualify, since
    1 − μ_n({x}) + 1 − μ_n({y}) ≥ 1.

    Raises:
        DomainError: If a tail bound is given without its atom
        InternalError: If two atoms qualify
    """
    if tail_bound is not None and atom is None:
        raise DomainError("an atom tail bound must name its atom")
    if atom is not None:
        label = fam.labels[fam.label_index(atom)]
        series = atom_series(fam, label, horizon, tail_bound)
        if series.verdict is Verdict.CERTIFIED_CONVERGENT:
            return AtomCertificate(label, series, True)

    candidates = []
    for label in fam.labels:
        series = atom_series(fam, label, horizon)
        if series.stabilized():
            candidates.append(AtomCertificate(label, series, False))
    if len(candidates) > 1:
        raise InternalError(
            "two atoms with summable complements: " + ", ".join(c.label for c in candidates)
        )
    return candidates[0] if candidates else None


def conservative_core_check(
    fam: BernoulliFamily,
    core: Sequence[str],
    horizon: int,
    tail_bound: Optional[float] = None,
) -> CertificateSeries:
    """Terms μ_n(X_0 ∖ C_0).

    Raises:
        DomainError: If C_0 is empty or names an unknown atom
    """
    core = list(dict.fromkeys(str(c) for c in core))
    if not core:
        raise DomainError("the conservative core candidate must be nonempty")
    keep = [fam.label_index(label) for label in core]
    indices = symmetric_indices(horizon)
    terms = [1.0 - float(fam.masses(n)[keep].sum()) for n in indices]
    return build_series(
        f"core[{','.join(core)}]", indices, [max(0.0, t) for t in terms], tail_bound=tail_bound
    )


def retained_atoms(
    fam: BernoulliFamily, horizon: int, growth_ratio: float = DEFAULT_GROWTH_RATIO
) -> List[str]:
    """Atoms whose window mass Σ_n μ_n({x}) keeps growing over the outer half of the window."""
    indices = symmetric_indices(horizon)
    rows = np.stack([fam.masses(n) for n in indices])
    full = rows.sum(axis=0)
    half = rows[: len(indices) // 2].sum(axis=0)
    return [
        label
        for label, s, h in zip(fam.labels, full, half)
        if s > 0 and s - h >= growth_ratio * h
    ]


class StructureCase(str, Enum):
    ATOMIC_FIXED_POINT = "atomic_fixed_point"
    DISSIPATIVE = "dissipative"
    CONSERVATIVE_CORE = "conservative_core"


@dataclass(frozen=True)
class StructureReport:
    """Exactly one case of the structure theorem, with the evidence behind it."""

    case: StructureCase
    evidence: str
    atom: Optional[str] = None
    core: Tuple[str, ...] = ()
    certificates: Tuple[CertificateSeries, ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "case": self.case.value,
            "evidence": self.evidence,
            "certificates": [s.to_json() for s in self.certificates],
        }
        if self.atom is not None:
            payload["atom"] = self.atom
        if self.core:
            payload["core"] = list(self.core)
        return payload


def structure_report(
    fam: BernoulliFamily,
    horizon: int,
    k_range: Optional[int] = None,
    witness: Optional[object] = None,
    atom: Optional[str] = None,
    atom_tail_bound: Optional[float] = None,
    core_tail_bound: Optional[float] = None,
) -> StructureReport:
    """Decide which case of the structure theorem the window supports.

    Order: a fixed atom, then dissipativity, then a conservative core found
    greedily from ``retained_atoms`` and validated by conservative_core_check.
    """
    fixed = atom_fixed_point_check(fam, horizon, atom_tail_bound, atom)
    if fixed is not None:
        evidence = "certified" if fixed.certified else "window"
        return StructureReport(
            StructureCase.ATOMIC_FIXED_POINT,
            evidence,
            atom=fixed.label,
            certificates=(fixed.series,),
        )

    dissipation = dissipativity_certificate(
        fam, horizon if k_range is None else k_range, horizon, witness
    )
    if dissipation.verdict is Verdict.CERTIFIED_CONVERGENT:
        return StructureReport(StructureCase.DISSIPATIVE, "certified", certificates=(dissipation,))
    if dissipation.verdict is Verdict.INCONCLUSIVE and dissipation.stabilized(STABILIZATION_TOL):
        return StructureReport(StructureCase.DISSIPATIVE, "window", certificates=(dissipation,))

    core = retained_atoms(fam, horizon) or list(fam.labels)
    check = conservative_core_check(fam, core, horizon, core_tail_bound)
    if check.verdict is not Verdict.CERTIFIED_CONVERGENT and not check.stabilized():
        logger.info("greedy core %s not validated; widening to the full base", core)
        core = list(fam.labels)
        check = conservative_core_check(fam, core, horizon, core_tail_bound)
    evidence = "certified" if check.verdict is Verdict.CERTIFIED_CONVERGENT else "window"
    return StructureReport(
        StructureCase.CONSERVATIVE_CORE,
        evidence,
        core=tuple(core),
        certificates=(dissipation, check),
    )
