"""Certificates and analyses for tail boundary flows of transition sequences."""

from flowlab.tail.analysis import (
    APERIODICITY_NOTE,
    ConcentrationBlock,
    ConcentrationResult,
    EquivalenceMetric,
    concentration_points,
    eigenvalue_certificate,
    equivalence_certificate,
    identity_extractor,
    interval_extractor,
    middle_point,
    periodicity_score,
)
from flowlab.tail.certificates import (
    FINITE_INPUT_NOTE,
    CertificateSeries,
    Verdict,
    build_series,
    finite_series,
)
from flowlab.tail.walk import WalkStatistics, simulate_walk

__all__ = [
    "APERIODICITY_NOTE",
    "FINITE_INPUT_NOTE",
    "CertificateSeries",
    "ConcentrationBlock",
    "ConcentrationResult",
    "EquivalenceMetric",
    "Verdict",
    "WalkStatistics",
    "build_series",
    "concentration_points",
    "eigenvalue_certificate",
    "equivalence_certificate",
    "finite_series",
    "identity_extractor",
    "interval_extractor",
    "middle_point",
    "periodicity_score",
    "simulate_walk",
]
