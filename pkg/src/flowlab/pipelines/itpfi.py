"""Conversions between ITPFI₂ eigenvalue lists and Poisson flow specs.

Also hosts the binomial splitting check and the reduction of bounded-type
eigenvalue data ρ(a_n) to one dimension lower plus an ITPFI₂ part.
Every exact quantity is compared against the analytic bound the
construction guarantees; a violation raises CertificateViolation.
"""

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from flowlab.config import BOUND_SLACK, DEFAULT_EPS_TRUNC
from flowlab.errors import CertificateViolation, DomainError, InternalError
from flowlab.measures.discrete import (
    DiscreteMeasure,
    MeasureSequence,
    add,
    convolve,
    convolve_power,
    dirac,
    moments,
    second_moment_about,
)
from flowlab.measures.poisson import (
    compound_poisson,
    rho_state,
    standard_poisson,
    two_point_gamma,
)
from flowlab.metrics.distances import hellinger_sq, total_variation_upper
from flowlab.metrics.transport import mixture_w2_bound, wasserstein2
from flowlab.pipelines.specs import ITPFI2Spec, PipelineResult, PoissonFlowSpec
from flowlab.tail.analysis import ConcentrationBlock, concentration_points, middle_point
from flowlab.tail.certificates import finite_series
from flowlab.utils.parallel import evaluate_terms

logger = logging.getLogger(__name__)


def state_weight(b: float) -> float:
    """λ' = e^{−b}/(1+e^{−b}), the mass of γ(b) away from 0."""
    return math.exp(-b) / (1.0 + math.exp(-b))


def itpfi2_to_poisson(
    spec: ITPFI2Spec, eps_trunc: float = DEFAULT_EPS_TRUNC
) -> PipelineResult:
    """Map (b_k, M_k) to (λ_k, b_k) with λ_k = M_k e^{−b_k}/(1+e^{−b_k}).

    The certificate holds the exact distance between γ(b_k)^{*M_k} and
    𝓔(λ_k δ_{b_k}), each bounded by 4e^{−b_k}.
    """

    def convert(entry: Tuple[float, int]) -> Tuple[float, float, float]:
        b, count = entry
        lam = count * state_weight(b)
        exact = total_variation_upper(
            convolve_power(two_point_gamma(b), count), standard_poisson(lam, b, eps_trunc)
        )
        return lam, exact, 4.0 * math.exp(-b)

    rows = evaluate_terms(convert, list(spec.entries))
    flow = PoissonFlowSpec(tuple((lam, b) for (lam, _, _), (b, _) in zip(rows, spec.entries)))
    certificate = finite_series(
        "prokhorov", [r[1] for r in rows], term_bounds=[r[2] for r in rows]
    ).check_bounds()

    report = {"min_b": min((b for b, _ in spec.entries), default=None)}
    return PipelineResult(flow, (certificate,), report)


def slice_index(x: float) -> int:
    """The k with x ∈ (k, k+1]."""
    return int(math.ceil(x)) - 1


def poisson_to_itpfi2(
    intensities: Sequence[DiscreteMeasure], eps_trunc: float = DEFAULT_EPS_TRUNC
) -> PipelineResult:
    """Aggregate positive intensities per unit slice and fit γ(b_k)^{*M_k}.

    The slice (0, 1] only contributes a translation flow and is moved into
    the ``discarded`` report.

    Raises:
        DomainError: If an intensity has an atom at or below 0
    """
    slices: Dict[int, List[DiscreteMeasure]] = defaultdict(list)
    for n, eta in enumerate(intensities, start=1):
        if len(eta) and eta.positions[0] <= 0.0:
            raise DomainError(f"intensity {n} must be supported in (0, inf)")
        for k in sorted({slice_index(x) for x in eta.positions}):
            slices[k].append(eta.restrict(k, k + 1))

    discarded = add(*slices.pop(0, []))
    entries: List[Tuple[float, int]] = []
    concentration, concentration_bounds = [], []
    lipschitz, lipschitz_bounds = [], []
    prokhorov, prokhorov_bounds = [], []

    for k in sorted(slices):
        zeta = add(*slices[k])
        lam, b, _ = moments(zeta)
        weight = state_weight(b)
        count = max(1, int(round(lam / weight)))
        if abs(count * weight - lam) > weight:
            raise InternalError(f"slice {k}: no admissible multiplicity near {lam / weight:g}")

        target = standard_poisson(lam, b, eps_trunc)
        # equal rates, so both laws are cut at the same order
        moved = wasserstein2(compound_poisson(zeta, eps_trunc), target, shared_defect=True)
        concentration.append(moved.distance**2)
        concentration_bounds.append(second_moment_about(zeta, b))

        fitted = standard_poisson(count * weight, b, eps_trunc)
        exact = total_variation_upper(fitted, target)
        allowed = 2.0 * abs(count * weight - lam) + 2.0 * (fitted.defect + target.defect)
        if exact > allowed + BOUND_SLACK:
            raise CertificateViolation(
                f"slice {k}: intensity change costs {exact:.12g} > 2|c-d|"
            )
        lipschitz.append(exact)
        lipschitz_bounds.append(2.0 * math.exp(-b))

        prokhorov.append(total_variation_upper(fitted, convolve_power(two_point_gamma(b), count)))
        prokhorov_bounds.append(4.0 * weight)

        logger.debug("slice %d: lambda=%.6g b=%.6g M=%d", k, lam, b, count)
        entries.append((b, count))

    certificates = (
        finite_series("w2_concentration", concentration, concentration_bounds).check_bounds(),
        finite_series("intensity_lipschitz", lipschitz, lipschitz_bounds).check_bounds(),
        finite_series("prokhorov", prokhorov, prokhorov_bounds).check_bounds(),
    )
    report = {
        "slices": sorted(slices),
        "discarded": {
            "mass": discarded.total_mass,
            "measure": discarded.to_json(),
            "reason": "the slice (0, 1] contributes the translation flow only",
        },
    }
    return PipelineResult(ITPFI2Spec(tuple(entries)), certificates, report)


@dataclass(frozen=True)
class BinomialCheck:
    exact_tv: float
    bound: float
    K: int
    M: int

    def to_json(self) -> Dict[str, object]:
        return {"exact_tv": self.exact_tv, "bound": self.bound, "K": self.K, "M": self.M}


def binomial_split_counts(alpha: float, beta: float, L: int) -> Tuple[int, int]:
    """K = L − ⌊βL/(1+α+β)⌋ and M = ⌊(1+β)L/(1+α+β)⌋."""
    total = 1.0 + alpha + beta
    return L - math.floor(beta * L / total), math.floor((1.0 + beta) * L / total)


def binomial_approx_check(
    P: DiscreteMeasure,
    Q: DiscreteMeasure,
    alpha: float,
    beta: float,
    L: int,
) -> BinomialCheck:
    """Compare ((δ_0+αP+βQ)/(1+α+β))^{*L} with its split into two powers.

    The split is ((δ_0+αP)/(1+α))^{*K} * ((δ_0+βQ)/(1+β))^{*M} and the
    exact ℓ¹ distance is asserted to be at most 4√β.

    Raises:
        DomainError: If α ≥ β > 0, β ≤ 1 or L ≥ 0 fails
        CertificateViolation: If the exact distance exceeds 4√β
    """
    if not (alpha >= beta > 0.0 and beta <= 1.0):
        raise DomainError(f"need alpha >= beta > 0 and beta <= 1, got {alpha}, {beta}")
    if int(L) != L or L < 0:
        raise DomainError(f"L must be a nonnegative integer, got {L}")
    for name, measure in (("P", P), ("Q", Q)):
        if abs(measure.intended_mass - 1.0) > 1e-9:
            raise DomainError(f"{name} must be a probability measure")

    L = int(L)
    K, M = binomial_split_counts(alpha, beta, L)
    origin = dirac(0.0)
    joint = add(origin, P.scale_mass(alpha), Q.scale_mass(beta)).scale_mass(
        1.0 / (1.0 + alpha + beta)
    )
    first = add(origin, P.scale_mass(alpha)).scale_mass(1.0 / (1.0 + alpha))
    second = add(origin, Q.scale_mass(beta)).scale_mass(1.0 / (1.0 + beta))

    left = convolve_power(joint, L)
    right = convolve(convolve_power(first, K), convolve_power(second, M))
    exact = total_variation_upper(left, right)
    bound = 4.0 * math.sqrt(beta)
    if exact > bound + BOUND_SLACK:
        raise CertificateViolation(f"binomial split distance {exact:.12g} exceeds {bound:.12g}")
    return BinomialCheck(exact, bound, K, M)


@dataclass(frozen=True)
class BoundedReduction:
    """Reduced data: ζ(θ̂)^{*K_θ} factors of dimension N−1 and an ITPFI₂ part."""

    factors: Tuple[Tuple[Tuple[float, ...], int], ...]
    itpfi2: ITPFI2Spec
    levels: Tuple[float, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "factors": [{"b": list(b), "K": k} for b, k in self.factors],
            "itpfi2": self.itpfi2.to_json(),
            "levels": list(self.levels),
        }


def _validated_vectors(a_seq: Sequence[Sequence[float]], N: int) -> np.ndarray:
    if N < 2:
        raise DomainError(f"dimension N must be at least 2, got {N}")
    values = np.asarray(a_seq, dtype=np.float64).reshape(-1, N) if len(a_seq) else np.empty((0, N))
    if values.shape[1] != N:
        raise DomainError(f"every vector must have {N} entries")
    if np.any(values < 0.0) or not np.all(np.isfinite(values)):
        raise DomainError("entries must be finite and nonnegative")
    return values


def _slice_levels(
    values: np.ndarray, collapse_unit_slice: bool
) -> Tuple[np.ndarray, np.ndarray, List[float]]:
    """Concentrate every (slice, coordinate) block at its middle point.

    Returns:
        Tuple of (slice index per entry, level per entry, concentration term per block)
    """
    count, N = values.shape
    slices = np.floor(values).astype(int) + 1
    levels = np.zeros_like(values)
    terms: List[float] = []
    p = 1.0 / (1.0 + N)

    for i in range(N):
        column = values[:, i]
        for k in sorted(set(slices[:, i].tolist())):
            members = np.flatnonzero(slices[:, i] == k)
            if k == 1 and collapse_unit_slice:
                b = 0.0
            elif k == 1:
                b = middle_point(column[members].tolist())
            else:
                seq = MeasureSequence.from_list(
                    [rho_state(values[n]) for n in members], start=0
                )
                block = ConcentrationBlock(
                    tuple(range(members.size)), k - 1.0, float(k), p, p * math.exp(-k)
                )
                b = concentration_points(
                    seq, [block], extractor=_coordinate_atom(column[members])
                ).midpoints[0]
            levels[members, i] = b
            terms.append(
                math.fsum(math.exp(-a) * (b - a) ** 2 for a in column[members])
            )
    return slices, levels, terms


def _coordinate_atom(coordinates: np.ndarray):
    def extract(n: int, mu: DiscreteMeasure, block: ConcentrationBlock) -> DiscreteMeasure:
        return dirac(float(coordinates[n]))

    return extract


def itpfi_bounded_reduce(
    a_seq: Sequence[Sequence[float]],
    N: int,
    collapse_unit_slice: bool = True,
) -> PipelineResult:
    """Reduce the laws ρ(a_n), a_n ∈ ℝ^N_{≥0}, by one dimension.

    Steps: concentrate each coordinate slice [k−1, k) at a middle point b,
    move atoms to get μ'_n (Wasserstein step), reweight to get μ''_n = ρ(b)
    (Hellinger step), relabel levels, group equal sorted label tuples θ and
    split each ζ(θ)^{*L_θ} with the binomial check.

    Raises:
        DomainError: On negative entries or N < 2
    """
    values = _validated_vectors(a_seq, N)
    slices, levels, conc_terms = _slice_levels(values, collapse_unit_slice)

    w2_terms, w2_bounds, h_terms, h_bounds = [], [], [], []
    for a, b in zip(values, levels):
        mu = rho_state(a)
        weights = np.exp(-a)
        norm = 1.0 + float(np.sum(weights))
        moved = DiscreteMeasure(
            np.concatenate(([0.0], b)), np.concatenate(([1.0], weights)) / norm
        )
        w2_terms.append(wasserstein2(mu, moved).distance ** 2)
        w2_bounds.append(
            mixture_w2_bound(
                [1.0 / norm, *(weights / norm)],
                [dirac(0.0), *(dirac(float(x)) for x in a)],
                [0.0, *b.tolist()],
            )
        )
        h_terms.append(hellinger_sq(moved, rho_state(b)))
        h_bounds.append(2.0 * float(np.sum(weights * (a - b) ** 2)))

    unique_levels = sorted(set(levels.ravel().tolist()))
    label = {b: j for j, b in enumerate(unique_levels, start=1)}
    groups = Counter(tuple(sorted(label[b] for b in row)) for row in levels.tolist())

    factors: List[Tuple[Tuple[float, ...], int]] = []
    itpfi2: List[Tuple[float, int]] = []
    split_terms, split_bounds = [], []
    for theta in sorted(groups):
        b_theta = [unique_levels[j - 1] for j in theta]
        head, top = b_theta[:-1], b_theta[-1]
        alpha = math.fsum(math.exp(-b) for b in head)
        beta = math.exp(-top)
        P = DiscreteMeasure(np.array(head), np.exp(-np.array(head)) / alpha)
        check = binomial_approx_check(P, dirac(top), alpha, beta, groups[theta])
        split_terms.append(check.exact_tv)
        split_bounds.append(4.0 * math.exp(-top / 2.0))
        if check.K > 0:
            factors.append((tuple(head), check.K))
        if check.M > 0 and top > 0.0:
            itpfi2.append((top, check.M))

    certificates = (
        finite_series("concentration", conc_terms),
        finite_series("w2_replacement", w2_terms, w2_bounds).check_bounds(),
        finite_series("hellinger_replacement", h_terms, h_bounds).check_bounds(),
        finite_series("binomial_split", split_terms, split_bounds).check_bounds(),
    )
    output = BoundedReduction(tuple(factors), ITPFI2Spec(tuple(itpfi2)), tuple(unique_levels))
    report = {
        "N": N,
        "inputs": int(values.shape[0]),
        "groups": {",".join(map(str, theta)): count for theta, count in sorted(groups.items())},
        "collapse_unit_slice": collapse_unit_slice,
    }
    return PipelineResult(output, certificates, report)
