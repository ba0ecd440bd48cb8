"""Finitely supported measures and the compound Poisson calculus."""

from flowlab.measures.discrete import (
    DiscreteMeasure,
    IndexDomain,
    MeasureSequence,
    add,
    align,
    char_fn,
    convolve,
    convolve_power,
    dirac,
    ensure_probability,
    measure_algebra,
    mix,
    moments,
    second_moment_about,
    zero_measure,
)
from flowlab.measures.poisson import (
    compound_poisson,
    rho_state,
    standard_poisson,
    two_point_gamma,
)

__all__ = [
    "DiscreteMeasure",
    "IndexDomain",
    "MeasureSequence",
    "add",
    "align",
    "char_fn",
    "compound_poisson",
    "convolve",
    "convolve_power",
    "dirac",
    "ensure_probability",
    "measure_algebra",
    "mix",
    "moments",
    "rho_state",
    "second_moment_about",
    "standard_poisson",
    "two_point_gamma",
    "zero_measure",
]
