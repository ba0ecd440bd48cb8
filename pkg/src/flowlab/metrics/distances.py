"""Hellinger and total variation distances between discrete measures.

Defects are treated as mass sitting on a private atom that no other measure
shares. This keeps every inequality derived from these distances valid.
Total variation uses the ℓ¹ convention, so its range is [0, 2].
"""

import math

import numpy as np

from flowlab.config import MASS_TOL
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, align


def require_probability(mu: DiscreteMeasure, name: str = "measure") -> None:
    """Raise DomainError unless atoms plus defect carry unit mass."""
    if abs(mu.intended_mass - 1.0) > MASS_TOL:
        raise DomainError(
            f"{name} must be a probability measure, has mass {mu.intended_mass:.12g}"
        )


def hellinger_affinity(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Σ_x √(μ{x} ν{x}) over shared atoms."""
    _, a, b = align(mu, nu)
    return float(np.sum(np.sqrt(a * b)))


def hellinger_sq(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Squared Hellinger distance 1 − Σ_x √(μ{x} ν{x}).

    Raises:
        DomainError: If either input is not a probability measure
    """
    require_probability(mu, "first measure")
    require_probability(nu, "second measure")
    return min(1.0, max(0.0, 1.0 - hellinger_affinity(mu, nu)))


def hellinger(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    return math.sqrt(hellinger_sq(mu, nu))


def total_variation(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """ℓ¹ distance Σ_x |μ{x} − ν{x}| + |defect(μ) − defect(ν)|."""
    _, a, b = align(mu, nu)
    return float(np.sum(np.abs(a - b))) + abs(mu.defect - nu.defect)


def total_variation_upper(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Upper bound on the ℓ¹ distance of the untruncated measures.

    Each defect may sit anywhere, so both are added in full.
    """
    _, a, b = align(mu, nu)
    return float(np.sum(np.abs(a - b))) + mu.defect + nu.defect


def poisson_hellinger_sq(alpha: float, beta: float) -> float:
    """Squared Hellinger distance between Poisson laws of means α and β."""
    if alpha < 0.0 or beta < 0.0:
        raise DomainError("Poisson means must be nonnegative")
    return -math.expm1(-0.5 * (math.sqrt(alpha) - math.sqrt(beta)) ** 2)
