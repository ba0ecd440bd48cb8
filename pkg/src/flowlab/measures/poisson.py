"""Compound Poisson distributions and the two-point state measures."""

import logging
import math
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from flowlab.config import DEFAULT_EPS_TRUNC
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, convolve, dirac

logger = logging.getLogger(__name__)


def truncation_order(rate: float, eps_trunc: float) -> int:
    """Smallest K with P(Poisson(rate) > K) < eps_trunc."""
    if rate <= 0.0:
        return 0
    upper = int(rate + 12.0 * math.sqrt(rate) + 64)
    while True:
        ks = np.arange(upper + 1)
        below = np.flatnonzero(poisson.sf(ks, rate) < eps_trunc)
        if below.size:
            return int(below[0])
        upper *= 2


def compound_poisson(
    mu: DiscreteMeasure,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    atom_floor: float = 0.0,
) -> DiscreteMeasure:
    """The compound Poisson law exp(−‖μ‖) Σ_k μ^{*k}/k!.

    The series is cut at the minimal order whose Poisson tail falls below
    ``eps_trunc``; that tail becomes the defect. Atoms of the convolution
    powers lighter than ``atom_floor`` also move into the defect. Any defect
    already carried by ``mu`` is added as well.

    Args:
        mu: Finite intensity measure
        eps_trunc: Truncation tolerance for the Poisson tail
        atom_floor: Mass below which power atoms are dropped into the defect

    Returns:
        The truncated compound Poisson distribution
    """
    if eps_trunc <= 0.0:
        raise DomainError(f"eps_trunc must be positive, got {eps_trunc}")
    if atom_floor < 0.0:
        raise DomainError(f"atom_floor must be nonnegative, got {atom_floor}")

    rate = mu.total_mass
    if rate == 0.0:
        return DiscreteMeasure(np.array([0.0]), np.array([1.0]), mu.defect)

    order = truncation_order(rate, eps_trunc)
    weights = poisson.pmf(np.arange(order + 1), rate)
    tail = float(poisson.sf(order, rate))

    step = mu.scale_mass(1.0 / rate)
    step = DiscreteMeasure(step.positions, step.masses)
    power = dirac(0.0)
    positions = [power.positions]
    masses = [power.masses * weights[0]]
    dropped = 0.0

    for k in range(1, order + 1):
        power = convolve(power, step)
        if atom_floor > 0.0:
            light = power.masses < atom_floor
            if np.any(light):
                dropped += float(np.sum(power.masses[light])) * weights[k]
                power = DiscreteMeasure(power.positions[~light], power.masses[~light])
        positions.append(power.positions)
        masses.append(power.masses * weights[k])

    logger.debug(
        "compound Poisson: rate=%.6g order=%d tail=%.3g dropped=%.3g",
        rate,
        order,
        tail,
        dropped,
    )
    return DiscreteMeasure(
        np.concatenate(positions),
        np.concatenate(masses),
        tail + dropped + mu.defect,
    )


def standard_poisson(
    lam: float, a: float, eps_trunc: float = DEFAULT_EPS_TRUNC
) -> DiscreteMeasure:
    """The Poisson law of intensity λδ_a, with mass e^{−λ}λ^k/k! at ka."""
    if not lam > 0.0:
        raise DomainError(f"Poisson intensity must be positive, got {lam}")
    return compound_poisson(dirac(a, lam), eps_trunc)


def two_point_gamma(a: float) -> DiscreteMeasure:
    """The state measure with masses 1/(1+e^{−a}) at 0 and e^{−a}/(1+e^{−a}) at a."""
    if a < 0.0:
        raise DomainError(f"two-point parameter must be nonnegative, got {a}")
    return rho_state([a])


def rho_state(a: Sequence[float]) -> DiscreteMeasure:
    """Normalized state measure 1/(1+Σe^{−a_j}) (δ_0 + Σ_i e^{−a_i} δ_{a_i})."""
    values = np.asarray(a, dtype=np.float64).ravel()
    if values.size == 0:
        raise DomainError("rho_state needs at least one entry")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise DomainError("rho_state entries must be finite and nonnegative")

    weights = np.exp(-values)
    norm = 1.0 + float(np.sum(weights))
    positions = np.concatenate(([0.0], values))
    masses = np.concatenate(([1.0], weights)) / norm
    return DiscreteMeasure(positions, masses)
