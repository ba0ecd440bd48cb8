"""Certificate-producing analyses of a transition sequence (μ_n).

Each analysis evaluates one summand per index over a finite window and
wraps the result in a CertificateSeries. Conclusions about the tail boundary
flow are those of the criteria being checked; they are not re-derived here.
"""

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

from flowlab.config import DEFAULT_DIVERGENCE_THRESHOLD, DEFAULT_LP_LIMIT, MASS_TOL
from flowlab.errors import CapacityError, DomainError, ExtractionError
from flowlab.measures.discrete import (
    DiscreteMeasure,
    MeasureSequence,
    char_fn,
    moments,
    second_moment_about,
)
from flowlab.metrics.distances import hellinger_sq, total_variation_upper
from flowlab.metrics.transport import TransportMode, wasserstein2_cutoff
from flowlab.tail.certificates import CertificateSeries, Verdict, build_series
from flowlab.utils.parallel import evaluate_terms

logger = logging.getLogger(__name__)

SubMeasureRule = Callable[[int, DiscreteMeasure], DiscreteMeasure]

APERIODICITY_NOTE = (
    "a convergent periodicity score is not evidence of aperiodicity"
)
PERIODIC_NOTE = "divergent periodicity score: the tail boundary flow is periodic"
IDENTICAL_NOTE = "identical sequences: every term is zero"


def eigenvalue_certificate(
    seq: MeasureSequence,
    omega: float,
    horizon: int,
    tail_bound: Optional[float] = None,
    term_bounds: Optional[Sequence[float]] = None,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    name: Optional[str] = None,
) -> CertificateSeries:
    """Summands 1 − |μ̂_n(ω)| of the eigenvalue criterion ∏|μ̂_n(ω)| > 0.

    A defect can move |μ̂_n(ω)| by at most its own mass, so it is added to
    each term to keep the term an upper bound. A single atom has modulus
    equal to its mass, which keeps Dirac terms exact.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be at least 1, got {horizon}")
    indices = seq.window(horizon)

    def term(n: int) -> float:
        mu = seq[n]
        modulus = float(mu.masses[0]) if len(mu) == 1 else abs(char_fn(mu, omega))
        value = 1.0 - modulus + mu.defect
        return min(1.0, max(0.0, value))

    terms = evaluate_terms(term, indices)
    return build_series(
        name or f"eigenvalue[omega={omega:.6g}]",
        indices,
        terms,
        tail_bound=tail_bound,
        term_bounds=term_bounds,
        threshold=threshold,
    ).check_bounds()


def interval_extractor(
    low: float, high: float, closed_low: bool = True, closed_high: bool = True
) -> SubMeasureRule:
    """Sub-measure rule restricting μ_n to an interval (capped at μ_n by construction)."""

    def extract(n: int, mu: DiscreteMeasure) -> DiscreteMeasure:
        return mu.restrict(low, high, closed_low=closed_low, closed_high=closed_high)

    return extract


def identity_extractor(n: int, mu: DiscreteMeasure) -> DiscreteMeasure:
    return DiscreteMeasure(mu.positions, mu.masses)


def check_dominated(
    beta: DiscreteMeasure, mu: DiscreteMeasure, n: int, tol: float = MASS_TOL
) -> None:
    """Raise ExtractionError unless β ≤ μ atomwise."""
    for x, m in beta.atoms:
        if m > mu.mass_at(x) + tol:
            raise ExtractionError(
                f"extracted measure at index {n} has mass {m:.12g} at {x:g}, "
                f"more than the {mu.mass_at(x):.12g} available"
            )


def periodicity_score(
    seq: MeasureSequence,
    extractor: SubMeasureRule,
    horizon: int,
    width_bound: float,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> CertificateSeries:
    """Summands β_n(ℝ)·Var(β_n/β_n(ℝ)) of the periodicity criterion.

    A certified divergent score means the flow is periodic. The converse
    does not hold, which the returned note records.

    Raises:
        ExtractionError: If some β_n is not dominated by μ_n or is wider than
            ``width_bound``
    """
    if width_bound <= 0.0:
        raise DomainError(f"width bound must be positive, got {width_bound}")
    indices = seq.window(horizon)

    def term(n: int) -> float:
        mu = seq[n]
        beta = extractor(n, mu)
        check_dominated(beta, mu, n)
        if beta.support_width > width_bound + 1e-12:
            raise ExtractionError(
                f"extracted measure at index {n} has width {beta.support_width:g} "
                f"> {width_bound:g}"
            )
        if beta.total_mass <= 0.0:
            return 0.0
        mass, _, variance = moments(beta)
        return mass * variance

    terms = evaluate_terms(term, indices)
    series = build_series(
        f"periodicity[C={width_bound:g}]", indices, terms, threshold=threshold
    )
    divergent = series.verdict is Verdict.CERTIFIED_DIVERGENT
    return replace(series, note=PERIODIC_NOTE if divergent else APERIODICITY_NOTE)


def middle_point(values: Sequence[float]) -> float:
    """Median of the values; the average of the two middle ones for even counts."""
    if not values:
        raise DomainError("middle point of an empty set")
    ordered = sorted(values)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return 0.5 * (ordered[mid - 1] + ordered[mid])


@dataclass(frozen=True)
class ConcentrationBlock:
    """One block: an index set J, an interval I ⊂ ℝ∖(−1,1) and weights p, q > 0."""

    indices: Tuple[int, ...]
    low: float
    high: float
    p: float
    q: float

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise DomainError(f"empty interval [{self.low}, {self.high}]")
        if self.low < 1.0 and self.high > -1.0:
            raise DomainError(
                f"interval [{self.low}, {self.high}] meets (-1, 1)"
            )
        if not (self.p > 0.0 and self.q > 0.0):
            raise DomainError("block weights p and q must be positive")


BlockExtractor = Callable[[int, DiscreteMeasure, ConcentrationBlock], DiscreteMeasure]


def normalized_restriction(
    n: int, mu: DiscreteMeasure, block: ConcentrationBlock
) -> DiscreteMeasure:
    """β_n = μ_n restricted to the block interval, normalized to mass one."""
    part = mu.restrict(block.low, block.high, closed_low=True, closed_high=True)
    if part.total_mass <= 0.0:
        raise ExtractionError(f"measure at index {n} has no mass in [{block.low}, {block.high}]")
    return part.scale_mass(1.0 / part.total_mass)


@dataclass(frozen=True)
class ConcentrationResult:
    midpoints: Tuple[float, ...]
    weighted_sum: CertificateSeries


def concentration_points(
    seq: MeasureSequence,
    blocks: Sequence[ConcentrationBlock],
    extractor: BlockExtractor = normalized_restriction,
    width_bound: Optional[float] = None,
    tail_bound: Optional[float] = 0.0,
) -> ConcentrationResult:
    """Middle points t_k of the block means and the sums Σ p q ∫(x−t_k)² dβ_n.

    Every β_n must be a probability measure carried by the block interval
    with p δ_0 + q β_n ≤ μ_n. An empty block gets no middle point (NaN) and
    contributes zero.

    Raises:
        ExtractionError: If any dominance or support check fails
    """
    midpoints: List[float] = []
    terms: List[float] = []

    for k, block in enumerate(blocks, start=1):
        if width_bound is not None and block.high - block.low > width_bound:
            raise DomainError(f"block {k} interval is wider than {width_bound:g}")
        if not block.indices:
            midpoints.append(math.nan)
            terms.append(0.0)
            continue

        betas = []
        for n in block.indices:
            mu = seq[n]
            beta = extractor(n, mu, block)
            if abs(beta.total_mass - 1.0) > MASS_TOL:
                raise ExtractionError(f"extracted measure at index {n} is not a probability")
            if beta.positions[0] < block.low - 1e-12 or beta.positions[-1] > block.high + 1e-12:
                raise ExtractionError(f"extracted measure at index {n} leaves its block interval")
            if block.p > mu.mass_at(0.0) + MASS_TOL:
                raise ExtractionError(
                    f"index {n}: p={block.p:g} exceeds the mass {mu.mass_at(0.0):g} at 0"
                )
            check_dominated(beta.scale_mass(block.q), mu, n)
            betas.append(beta)

        t = middle_point([moments(beta)[1] for beta in betas])
        midpoints.append(t)
        terms.append(
            math.fsum(block.p * block.q * second_moment_about(beta, t) for beta in betas)
        )

    indices = list(range(1, len(blocks) + 1))
    series = build_series("concentration", indices, terms, tail_bound=tail_bound)
    return ConcentrationResult(tuple(midpoints), series)


class EquivalenceMetric(str, Enum):
    HELLINGER = "hellinger"
    TV = "tv"
    W2K = "w2k"


def equivalence_certificate(
    seq1: MeasureSequence,
    seq2: MeasureSequence,
    metric: EquivalenceMetric,
    horizon: int,
    kappa: Optional[float] = None,
    tail_bound: Optional[float] = None,
    lp_limit: int = DEFAULT_LP_LIMIT,
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
) -> CertificateSeries:
    """Summands H²(μ_n,ν_n), ‖μ_n−ν_n‖ or W₂,κ(μ_n,ν_n)².

    A convergent verdict means the hypothesis of the matching isomorphism
    criterion holds, so the two tail boundary flows are isomorphic.
    Total variation uses the defect-pessimistic form. W₂,κ falls back to the
    monotone upper bound when a support exceeds the LP limit. A sequence
    compared with itself has zero terms and a zero tail.
    """
    metric = EquivalenceMetric(metric)
    if metric is EquivalenceMetric.W2K and not (kappa is not None and kappa > 0.0):
        raise DomainError("the w2k metric needs a positive kappa")
    indices = seq1.window(horizon)
    label = metric.value if kappa is None else f"{metric.value}[kappa={kappa:g}]"

    if seq1 is seq2:
        return build_series(
            f"equivalence[{label}]",
            indices,
            [0.0] * len(indices),
            tail_bound=0.0 if tail_bound is None else tail_bound,
            threshold=threshold,
            note=IDENTICAL_NOTE,
        )

    def term(n: int) -> float:
        mu, nu = seq1[n], seq2[n]
        if metric is EquivalenceMetric.HELLINGER:
            return hellinger_sq(mu, nu)
        if metric is EquivalenceMetric.TV:
            return total_variation_upper(mu, nu)
        try:
            result = wasserstein2_cutoff(mu, nu, kappa, TransportMode.EXACT, lp_limit)
        except CapacityError:
            logger.warning("index %d exceeds the LP limit, using the monotone upper bound", n)
            result = wasserstein2_cutoff(mu, nu, kappa, TransportMode.MONOTONE_UPPER)
        return result.distance**2

    terms = evaluate_terms(term, indices)
    return build_series(
        f"equivalence[{label}]", indices, terms, tail_bound=tail_bound, threshold=threshold
    )

