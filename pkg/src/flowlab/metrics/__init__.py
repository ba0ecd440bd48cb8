"""Probability distances: Hellinger, total variation and quadratic transport."""

from flowlab.metrics.distances import (
    hellinger,
    hellinger_affinity,
    hellinger_sq,
    poisson_hellinger_sq,
    require_probability,
    total_variation,
    total_variation_upper,
)
from flowlab.metrics.transport import (
    CouplingPlan,
    TransportMode,
    TransportResult,
    mixture_w2_bound,
    monotone_coupling,
    optimal_coupling,
    wasserstein2,
    wasserstein2_cutoff,
)

__all__ = [
    "CouplingPlan",
    "TransportMode",
    "TransportResult",
    "hellinger",
    "hellinger_affinity",
    "hellinger_sq",
    "mixture_w2_bound",
    "monotone_coupling",
    "optimal_coupling",
    "poisson_hellinger_sq",
    "require_probability",
    "total_variation",
    "total_variation_upper",
    "wasserstein2",
    "wasserstein2_cutoff",
]
