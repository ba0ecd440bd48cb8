"""Krieger type conditions for Bernoulli shifts, checked against supplied witnesses.

The type conditions quantify over all candidate measures ν. Only the witness
handed in is tested, so a failed check never classifies the action.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from flowlab.bernoulli.analysis import BoundedCocycleWitness
from flowlab.bernoulli.family import BernoulliFamily, symmetric_indices
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure
from flowlab.metrics.distances import hellinger_sq, require_probability
from flowlab.tail.certificates import CertificateSeries, Verdict, build_series

logger = logging.getLogger(__name__)

NO_II1 = "no II1 certificate found for supplied witnesses"
NO_IIINF = "no IIinf certificate found for supplied witnesses"
INFINITE_TAIL_WITNESS = "nu has infinite mass outside every finite set"


class TypeKind(str, Enum):
    II1 = "II1"
    IIINF = "IIinf"
    UNCERTIFIED = "uncertified"


@dataclass(frozen=True)
class TypeCertificate:
    kind: TypeKind
    witness: Dict[str, object]
    series: Tuple[CertificateSeries, ...]
    message: str = ""

    @property
    def certified(self) -> bool:
        return self.kind is not TypeKind.UNCERTIFIED

    def to_json(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "witness": self.witness,
            "series": [s.to_json() for s in self.series],
            "message": self.message,
        }


def _weights_row(fam: BernoulliFamily, weights: Mapping[str, float]) -> np.ndarray:
    row = np.zeros(len(fam))
    for label, w in weights.items():
        row[fam.label_index(label)] = float(w)
    return row


def _label_measure(fam: BernoulliFamily, row: np.ndarray) -> DiscreteMeasure:
    return DiscreteMeasure(np.arange(len(fam), dtype=np.float64), row)


def type_II1_check(
    fam: BernoulliFamily,
    nu: Mapping[str, float],
    horizon: int,
    tail_bound: Optional[float] = None,
) -> TypeCertificate:
    """II₁ test: Σ_n H²(μ_n, ν) < ∞ means ν^ℤ is an invariant equivalent measure.

    Args:
        fam: The Bernoulli family
        nu: Probability weights per base atom
        horizon: Symmetric window
        tail_bound: Analytic bound on the sum outside the window

    Raises:
        DomainError: If ν is not a probability measure equivalent to μ_0
    """
    row = _weights_row(fam, nu)
    witness = _label_measure(fam, row)
    require_probability(witness, "nu")
    if not np.array_equal(fam.masses(0) > 0.0, row > 0.0):
        raise DomainError("nu must charge exactly the atoms charged by mu_0")

    indices = symmetric_indices(horizon)
    terms = [hellinger_sq(fam[n], witness) for n in indices]
    series = build_series("type_II1", indices, terms, tail_bound=tail_bound)
    certified = series.verdict is Verdict.CERTIFIED_CONVERGENT
    return TypeCertificate(
        TypeKind.II1 if certified else TypeKind.UNCERTIFIED,
        {"nu": dict(nu)},
        (series,),
        "" if certified else NO_II1,
    )


def cocycle_bound_from_ii1(certificate: TypeCertificate) -> BoundedCocycleWitness:
    """‖c_k‖² ≤ 8 Σ_n H²(μ_n, ν) for every k, from a certified II₁ witness.

    Raises:
        DomainError: If the certificate is not a certified II₁ certificate
    """
    if certificate.kind is not TypeKind.II1:
        raise DomainError("a cocycle bound needs a certified II1 certificate")
    upper = certificate.series[0].upper_estimate
    return BoundedCocycleWitness(8.0 * upper)


@dataclass(frozen=True)
class SigmaFiniteMeasure:
    """Atom weights on the materialized base, plus an optional infinite tail.

    ``infinite_tail`` marks counting-type measures that put infinite total mass
    on atoms beyond the materialized labels.
    """

    weights: Mapping[str, float]
    infinite_tail: bool = False

    def __post_init__(self) -> None:
        for label, w in self.weights.items():
            if not (w >= 0.0 and math.isfinite(w)):
                raise DomainError(f"nu weight of {label!r} must be finite and nonnegative")

    @classmethod
    def counting(cls, labels: Sequence[str], infinite_tail: bool = True) -> "SigmaFiniteMeasure":
        return cls({str(label): 1.0 for label in labels}, infinite_tail)


def type_IIinf_check(
    fam: BernoulliFamily,
    nu: SigmaFiniteMeasure,
    sets: Callable[[int], Sequence[str]],
    horizon: int,
    tail_bounds: Tuple[Optional[float], Optional[float]] = (None, None),
) -> TypeCertificate:
    """II_∞ test through three series over the window.

    Σ μ_n(X_0 ∖ 𝒰_n) and Σ H²(μ_n, ν|𝒰_n / ν(𝒰_n)) must converge while
    Σ ν(X_0 ∖ 𝒰_n) must diverge.

    Raises:
        DomainError: If some ν(𝒰_n) is zero or 𝒰_n names an unknown atom
    """
    indices = symmetric_indices(horizon)
    nu_row = _weights_row(fam, nu.weights)
    outside, distance, complement = [], [], []
    for n in indices:
        chosen = [fam.label_index(label) for label in dict.fromkeys(sets(n))]
        mask = np.zeros(len(fam), dtype=bool)
        mask[chosen] = True
        inside = float(nu_row[mask].sum())
        if inside <= 0.0:
            raise DomainError(f"nu(U_{n}) must be positive and finite, got {inside}")

        masses = fam.masses(n)
        outside.append(max(0.0, float(masses[~mask].sum())))
        conditioned = np.where(mask, nu_row, 0.0) / inside
        distance.append(hellinger_sq(fam[n], _label_measure(fam, conditioned)))
        complement.append(float(nu_row[~mask].sum()))

    first = build_series("IIinf_outside", indices, outside, tail_bound=tail_bounds[0])
    second = build_series("IIinf_hellinger", indices, distance, tail_bound=tail_bounds[1])
    third = build_series(
        "IIinf_nu_complement",
        indices,
        complement,
        divergence_witness=INFINITE_TAIL_WITNESS if nu.infinite_tail else None,
    )
    certified = (
        first.verdict is Verdict.CERTIFIED_CONVERGENT
        and second.verdict is Verdict.CERTIFIED_CONVERGENT
        and third.verdict is Verdict.CERTIFIED_DIVERGENT
    )
    if not certified:
        logger.info(
            "IIinf refused: verdicts %s, %s, %s",
            first.verdict.value,
            second.verdict.value,
            third.verdict.value,
        )
    return TypeCertificate(
        TypeKind.IIINF if certified else TypeKind.UNCERTIFIED,
        {"nu": dict(nu.weights), "infinite_tail": nu.infinite_tail},
        (first, second, third),
        "" if certified else NO_IIINF,
    )
