"""Poisson suspensions: from flow specs and Følner data to Bernoulli families."""

from flowlab.suspension.folner import FolnerKind, FolnerSpec
from flowlab.suspension.generator import (
    EmittedFamily,
    GrowthReport,
    GrowthVerdict,
    IntensitySpec,
    SelectionResult,
    associated_flow_spec,
    check_selection,
    conservativity_growth,
    emit_bernoulli,
    kappa_eval,
    subsequence_select,
)

__all__ = [
    "EmittedFamily",
    "FolnerKind",
    "FolnerSpec",
    "GrowthReport",
    "GrowthVerdict",
    "IntensitySpec",
    "SelectionResult",
    "associated_flow_spec",
    "check_selection",
    "conservativity_growth",
    "emit_bernoulli",
    "kappa_eval",
    "subsequence_select",
]
