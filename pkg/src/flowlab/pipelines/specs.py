"""Flow specifications exchanged by the pipelines."""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from flowlab.config import DEFAULT_EPS_TRUNC
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, MeasureSequence, dirac
from flowlab.measures.poisson import standard_poisson
from flowlab.tail.certificates import CertificateSeries


def _pairs(payload: object, what: str) -> List[Tuple[float, float]]:
    try:
        return [(float(x), float(y)) for x, y in payload]
    except (TypeError, ValueError) as e:
        raise DomainError(f"{what} must be a list of pairs: {e}") from e


@dataclass(frozen=True)
class PoissonFlowSpec:
    """Intensity atoms (λ_k, b_k): the flow of the laws 𝓔(λ_k δ_{b_k})."""

    entries: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        entries = tuple((float(lam), float(b)) for lam, b in self.entries)
        for lam, b in entries:
            if not (lam > 0.0 and math.isfinite(lam)):
                raise DomainError(f"intensity must be positive and finite, got {lam}")
            if b == 0.0 or not math.isfinite(b):
                raise DomainError(f"jump size must be a nonzero real, got {b}")
        object.__setattr__(self, "entries", entries)

    @property
    def positive_type(self) -> bool:
        return all(b > 0.0 for _, b in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def laws(self, eps_trunc: float = DEFAULT_EPS_TRUNC) -> MeasureSequence:
        """The sequence k ↦ 𝓔(λ_k δ_{b_k}), indexed from 1 and padded with δ_0."""
        entries = self.entries

        def generator(k: int) -> DiscreteMeasure:
            if k > len(entries):
                return dirac(0.0)
            lam, b = entries[k - 1]
            return standard_poisson(lam, b, eps_trunc)

        return MeasureSequence(generator, description="Poisson flow spec")

    def to_json(self) -> List[List[float]]:
        return [[lam, b] for lam, b in self.entries]

    @classmethod
    def from_json(cls, payload: object) -> "PoissonFlowSpec":
        return cls(tuple(_pairs(payload, "Poisson flow spec")))


@dataclass(frozen=True)
class ITPFI2Spec:
    """Eigenvalue list (b_k, M_k): the flow of the laws γ(b_k)^{*M_k}."""

    entries: Tuple[Tuple[float, int], ...]

    def __post_init__(self) -> None:
        entries = []
        for b, count in self.entries:
            if not (float(b) > 0.0 and math.isfinite(float(b))):
                raise DomainError(f"ITPFI2 parameter must be positive, got {b}")
            if int(count) != count or int(count) < 1:
                raise DomainError(f"ITPFI2 multiplicity must be a positive integer, got {count}")
            entries.append((float(b), int(count)))
        object.__setattr__(self, "entries", tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> List[List[float]]:
        return [[b, m] for b, m in self.entries]

    @classmethod
    def from_json(cls, payload: object) -> "ITPFI2Spec":
        pairs = _pairs(payload, "ITPFI2 spec")
        return cls(tuple((b, m) for b, m in pairs))


@dataclass(frozen=True)
class PipelineResult:
    """Output of a pipeline with its certificates and a free-form report."""

    output: object
    certificates: Tuple[CertificateSeries, ...]
    report: Dict[str, object] = field(default_factory=dict)

    def certificate(self, name: str) -> CertificateSeries:
        for series in self.certificates:
            if series.name == name:
                return series
        raise KeyError(name)

    def to_json(self) -> Dict[str, object]:
        output = self.output.to_json() if hasattr(self.output, "to_json") else self.output
        return {
            "output": output,
            "certificates": [s.to_json() for s in self.certificates],
            "report": self.report,
        }
