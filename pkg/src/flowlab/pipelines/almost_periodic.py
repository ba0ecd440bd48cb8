"""Realize an almost periodic ℤ-action as a Poisson flow of positive type.

The target is a dense embedding ℤ → K described by characters
ω_j(g) = e^{2πiθ_j g}. Seeds η_n on ℤ are symmetrized, contracted into
blocks α_k whose Fourier transforms are close to 1 on the first k
characters, translated by m_k into ℕ, and Poissonized as β_k = 𝓔(kγ_k).
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from flowlab.config import (
    CONTRACTION_BUDGET,
    CONTRACTION_LOOKAHEAD,
    DEFAULT_EPS_TRUNC,
    TRANSLATION_BUDGET,
)
from flowlab.errors import CertificateViolation, DomainError, NoContraction, NoTranslation
from flowlab.measures.discrete import (
    DiscreteMeasure,
    IndexDomain,
    MeasureSequence,
    char_fn,
    convolve,
    dirac,
)
from flowlab.measures.poisson import compound_poisson
from flowlab.pipelines.specs import PipelineResult, PoissonFlowSpec
from flowlab.tail.analysis import eigenvalue_certificate

logger = logging.getLogger(__name__)

SEED_ASSUMPTION = "seed tail boundary flow assumed to be the target rotation and not computed"
ISOMORPHISM_NOTE = (
    "eigenvalues certified; isomorphism with the target follows from the "
    "factor argument and is not computed"
)

TRANSLATION_CHUNK = 65536


@dataclass(frozen=True)
class AlmostPeriodicTarget:
    """Characters θ_0 = 0, θ_1, ... and integer-supported seed laws η_n, n ≥ 1."""

    thetas: Tuple[float, ...]
    seeds: MeasureSequence

    def __post_init__(self) -> None:
        thetas = tuple(float(t) % 1.0 for t in self.thetas)
        if not thetas or thetas[0] != 0.0:
            raise DomainError("the character enumeration must start with the trivial character")
        object.__setattr__(self, "thetas", thetas)

    def characters(self, k: int) -> np.ndarray:
        """Frequencies 2πθ_j of the first k characters (all of them if fewer)."""
        return 2.0 * math.pi * np.asarray(self.thetas[: max(0, k)])


def rotation_seeds() -> MeasureSequence:
    """Stock seeds (1 − 2^{−n})δ_0 + 2^{−n}δ_1."""

    def generator(n: int) -> DiscreteMeasure:
        p = 2.0 ** (-n)
        return DiscreteMeasure.from_atoms([(0.0, 1.0 - p), (1.0, p)])

    return MeasureSequence(generator, IndexDomain.NATURAL, SEED_ASSUMPTION)


def rotation_target(
    theta: float, count: int, seeds: Optional[MeasureSequence] = None
) -> AlmostPeriodicTarget:
    """Characters θ_j = jθ mod 1, j < count, of the rotation by θ."""
    if count < 1:
        raise DomainError(f"need at least one character, got {count}")
    thetas = tuple((j * theta) % 1.0 for j in range(count))
    return AlmostPeriodicTarget(thetas, seeds if seeds is not None else rotation_seeds())


def symmetrize(eta: DiscreteMeasure) -> DiscreteMeasure:
    """η * η̃, whose Fourier transform is |η̂|² ≥ 0."""
    for x in eta.positions:
        if x != round(x):
            raise DomainError("seed measures must be supported on integers")
    return convolve(eta, eta.reflect())


class _FourierTable:
    """Lazily computed values |η̂_m(ω_j)| for m = 1, 2, ..."""

    def __init__(self, seeds: MeasureSequence, omegas: np.ndarray):
        self._seeds = seeds
        self._omegas = omegas
        self._columns: List[np.ndarray] = []

    def window(self, start: int, length: int) -> np.ndarray:
        """Rows per character, columns for indices start..start+length-1."""
        stop = start + length - 1
        while len(self._columns) < stop:
            m = len(self._columns) + 1
            eta = self._seeds[m]
            self._columns.append(
                np.array([abs(char_fn(eta, w)) for w in self._omegas])
            )
        return np.stack(self._columns[start - 1 : stop], axis=1)


def contraction_points(
    target: AlmostPeriodicTarget,
    depth: int,
    budget: int = CONTRACTION_BUDGET,
    lookahead: int = CONTRACTION_LOOKAHEAD,
) -> List[int]:
    """Block ends n_1 < ... < n_depth.

    n_k is the least index after n_{k−1} whose next ``lookahead`` factors have
    product above 1 − (k+1)^{−3} on the first k+1 characters.

    Raises:
        NoContraction: If no admissible n_k exists below ``budget``
    """
    omegas = target.characters(depth + 1)
    table = _FourierTable(target.seeds, omegas)
    ends: List[int] = []
    previous = 0

    for k in range(1, depth + 1):
        rows = min(k + 1, omegas.size)
        threshold = 1.0 - (k + 1) ** -3.0
        found = None
        for n in range(max(previous + 1, 1), budget + 1):
            product = np.prod(table.window(n + 1, lookahead)[:rows], axis=1)
            if np.all(product > threshold):
                found = n
                break
        if found is None:
            raise NoContraction(
                f"block {k}: no contraction point up to index {budget} "
                f"reaches 1 - {k + 1}^-3 on the first {rows} characters"
            )
        logger.debug("block %d ends at seed index %d", k, found)
        ends.append(found)
        previous = found
    return ends


def translation_amount(
    thetas: Sequence[float], k: int, start: int, budget: int = TRANSLATION_BUDGET
) -> int:
    """Least integer m ≥ start with |e^{2πiθ_j m} − 1| < k^{−3} for the given θ_j.

    Raises:
        NoTranslation: If no such m lies within ``budget`` of ``start``
    """
    tolerance = k ** -3.0
    freqs = np.asarray(thetas, dtype=np.float64)
    offset = 0
    while offset < budget:
        size = min(TRANSLATION_CHUNK, budget - offset)
        candidates = np.arange(start + offset, start + offset + size, dtype=np.int64)
        phases = np.outer(freqs, candidates.astype(np.float64)) % 1.0
        distance = np.abs(np.exp(2j * math.pi * phases) - 1.0)
        admissible = np.flatnonzero(np.all(distance < tolerance, axis=0))
        if admissible.size:
            return int(candidates[admissible[0]])
        offset += size
    raise NoTranslation(
        f"block {k}: no translation within {budget} of {start} brings the first "
        f"{len(freqs)} characters within {tolerance:.3g} of 1"
    )


@dataclass(frozen=True)
class AlmostPeriodicOutput:
    intensities: Tuple[Tuple[int, DiscreteMeasure], ...]
    flow: PoissonFlowSpec
    block_ends: Tuple[int, ...]
    translations: Tuple[int, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "intensities": [
                {"lambda": lam, "gamma": gamma.to_json()} for lam, gamma in self.intensities
            ],
            "flow": self.flow.to_json(),
            "block_ends": list(self.block_ends),
            "translations": list(self.translations),
        }


def almost_periodic_pipeline(
    target: AlmostPeriodicTarget,
    depth: int,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    translation_budget: int = TRANSLATION_BUDGET,
    contraction_budget: int = CONTRACTION_BUDGET,
    lookahead: int = CONTRACTION_LOOKAHEAD,
) -> PipelineResult:
    """Build intensities kγ_k and eigenvalue certificates for β_k = 𝓔(kγ_k).

    Every character among the first ``depth`` gets a certificate whose tail
    bound 2/depth follows from |1 − γ̂_k(ω)| ≤ 2k^{−3}.

    Raises:
        NoContraction: If the block contraction stalls
        NoTranslation: If the translation search is exhausted
        CertificateViolation: If a block misses its Fourier bound
    """
    if depth < 1:
        raise DomainError(f"depth must be at least 1, got {depth}")

    symmetric = MeasureSequence(
        lambda n: symmetrize(target.seeds[n]), IndexDomain.NATURAL, "symmetrized seeds"
    )
    sym_target = AlmostPeriodicTarget(target.thetas, symmetric)
    ends = contraction_points(sym_target, depth, contraction_budget, lookahead)

    gammas: List[DiscreteMeasure] = []
    translations: List[int] = []
    previous = 0
    for k, end in enumerate(ends, start=1):
        alpha = dirac(0.0)
        for m in range(previous + 1, end + 1):
            alpha = convolve(alpha, symmetric[m])
        previous = end

        omegas = target.characters(k)
        for w in omegas:
            if char_fn(alpha, w).real < 1.0 - k ** -3.0 - 1e-12:
                raise NoContraction(f"block {k} misses 1 - {k}^-3 at frequency {w:.6g}")

        start = 1 - int(round(alpha.positions[0]))
        shift = translation_amount(target.thetas[:k], k, start, translation_budget)
        gamma = alpha.translate(float(shift))
        for w in omegas:
            if abs(1.0 - char_fn(gamma, w)) > 2.0 * k ** -3.0 + 1e-12:
                raise CertificateViolation(f"block {k}: |1 - gamma_hat| exceeds 2 {k}^-3")
        logger.debug("block %d: support %d atoms, translation %d", k, len(gamma), shift)
        translations.append(shift)
        gammas.append(gamma)

    betas = [
        compound_poisson(gamma.scale_mass(float(k)), eps_trunc)
        for k, gamma in enumerate(gammas, start=1)
    ]
    laws = MeasureSequence.from_list(betas, description="compound Poisson blocks")

    certificates = []
    for j in range(min(depth, len(target.thetas))):
        omega = 2.0 * math.pi * target.thetas[j]
        bounds = [2.0 * k ** -2.0 if j < k else 1.0 for k in range(1, depth + 1)]
        certificates.append(
            eigenvalue_certificate(
                laws,
                omega,
                depth,
                tail_bound=2.0 / depth,
                term_bounds=bounds,
                name=f"eigenvalue[theta={target.thetas[j]:.12g}]",
            )
        )

    flow = PoissonFlowSpec(
        tuple(
            (k * mass, position)
            for k, gamma in enumerate(gammas, start=1)
            for position, mass in gamma.atoms
        )
    )
    output = AlmostPeriodicOutput(
        tuple((k, gamma) for k, gamma in enumerate(gammas, start=1)),
        flow,
        tuple(ends),
        tuple(translations),
    )
    report = {
        "depth": depth,
        "thetas": list(target.thetas),
        "seeds": target.seeds.description,
        "note": ISOMORPHISM_NOTE,
    }
    return PipelineResult(output, tuple(certificates), report)
