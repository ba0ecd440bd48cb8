"""Certificate analysis of nonsingular Bernoulli shifts over ℤ."""

from flowlab.bernoulli.analysis import (
    BoundedCocycleWitness,
    BridgeResult,
    LinearGrowthWitness,
    StructureCase,
    StructureReport,
    atom_fixed_point_check,
    cocycle_norm,
    conservative_core_check,
    dissipativity_certificate,
    hellinger_bridge,
    kakutani_check,
    structure_report,
)
from flowlab.bernoulli.family import (
    BernoulliFamily,
    bernoulli_family,
    constant_family,
    expression_family,
    mixture_family,
    step_family,
    table_family,
)
from flowlab.bernoulli.types import (
    SigmaFiniteMeasure,
    TypeCertificate,
    TypeKind,
    cocycle_bound_from_ii1,
    type_II1_check,
    type_IIinf_check,
)

__all__ = [
    "BernoulliFamily",
    "BoundedCocycleWitness",
    "BridgeResult",
    "LinearGrowthWitness",
    "SigmaFiniteMeasure",
    "StructureCase",
    "StructureReport",
    "TypeCertificate",
    "TypeKind",
    "atom_fixed_point_check",
    "bernoulli_family",
    "cocycle_bound_from_ii1",
    "cocycle_norm",
    "conservative_core_check",
    "constant_family",
    "dissipativity_certificate",
    "expression_family",
    "hellinger_bridge",
    "kakutani_check",
    "mixture_family",
    "step_family",
    "structure_report",
    "table_family",
    "type_II1_check",
    "type_IIinf_check",
]
