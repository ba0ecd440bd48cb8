"""Two-point laws with bounded variance versus Poisson flow specs.

Also provides the infinite-divisibility split of a Poisson flow spec.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from flowlab.config import BOUND_SLACK, DEFAULT_EPS_TRUNC, MASS_TOL
from flowlab.errors import CertificateViolation, DomainError
from flowlab.measures.discrete import (
    DiscreteMeasure,
    MeasureSequence,
    convolve,
    convolve_power,
    dirac,
    moments,
)
from flowlab.measures.poisson import standard_poisson
from flowlab.metrics.distances import total_variation_upper
from flowlab.metrics.transport import wasserstein2
from flowlab.pipelines.specs import PipelineResult, PoissonFlowSpec
from flowlab.tail.analysis import ConcentrationBlock, concentration_points
from flowlab.tail.certificates import finite_series

logger = logging.getLogger(__name__)

# Convolutions of a bucket are only formed exactly below this many atoms.
EXACT_ATOM_LIMIT = 4096

IGNORED_BUCKETS = (-1, 0, 1)


@dataclass(frozen=True)
class TwoPointAtom:
    """A two-point law translated so the heavier atom sits at 0."""

    index: int
    jump: float
    weight: float
    variance: float


def normalize_two_point(mu: DiscreteMeasure, index: int) -> TwoPointAtom:
    """Translate μ so its heavier atom (the left one on ties) sits at 0.

    Raises:
        DomainError: Unless μ is a probability measure with exactly two atoms
    """
    if len(mu) != 2:
        raise DomainError(f"measure {index} must have exactly two atoms, has {len(mu)}")
    if abs(mu.intended_mass - 1.0) > MASS_TOL:
        raise DomainError(f"measure {index} must be a probability measure")
    (x0, m0), (x1, m1) = mu.atoms
    heavy, light, weight = (x0, x1, m1) if m0 >= m1 else (x1, x0, m0)
    _, _, variance = moments(mu)
    return TwoPointAtom(index, light - heavy, weight, variance)


def _bucket_law(
    members: Sequence[TwoPointAtom], at: Optional[float] = None
) -> Optional[DiscreteMeasure]:
    """⊛ of the bucket's laws, jumps moved to ``at`` if given; None if too large."""
    law = dirac(0.0)
    for atom in members:
        jump = atom.jump if at is None else at
        step = DiscreteMeasure.from_atoms([(0.0, 1.0 - atom.weight), (jump, atom.weight)])
        law = convolve(law, step)
        if len(law) > EXACT_ATOM_LIMIT:
            return None
    return law


def two_point_to_poisson(
    measures: Sequence[DiscreteMeasure],
    variance_bound: float,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
) -> PipelineResult:
    """Group two-point laws by jump bucket [k, k+1) and fit 𝓔(λ_k δ_{b_k}).

    Buckets −1, 0 and 1 carry a convergent variance sum and go into the
    ``ignored`` report. Each remaining bucket gets its middle point b_k and
    λ_k = Σ p_n, with a W₂ concentration certificate and a Le Cam
    certificate in ℓ¹ form, 2λ_k^{−1} Σ p_n².

    Raises:
        DomainError: On a law without exactly two atoms, or a variance above
            ``variance_bound``
    """
    if not variance_bound > 0.0:
        raise DomainError(f"variance bound must be positive, got {variance_bound}")

    atoms = [normalize_two_point(mu, n) for n, mu in enumerate(measures, start=1)]
    for atom in atoms:
        if atom.variance > variance_bound * (1.0 + 1e-12):
            raise DomainError(
                f"bounded-variance hypothesis violated: measure {atom.index} has "
                f"variance {atom.variance:.6g} > {variance_bound:g}"
            )

    buckets: Dict[int, List[TwoPointAtom]] = defaultdict(list)
    for atom in atoms:
        buckets[math.floor(atom.jump)].append(atom)
    ignored = {k: buckets.pop(k) for k in IGNORED_BUCKETS if k in buckets}

    entries: List[Tuple[float, float]] = []
    conc_terms, conc_exact = [], []
    lecam_terms, lecam_bounds = [], []
    bucket_report = []

    for k in sorted(buckets):
        members = buckets[k]
        lam = math.fsum(a.weight for a in members)
        p_sq = math.fsum(a.weight**2 for a in members)
        seq = MeasureSequence.from_list(
            [
                DiscreteMeasure.from_atoms([(0.0, 1.0 - a.weight), (a.jump, a.weight)])
                for a in members
            ],
            start=0,
        )
        block = ConcentrationBlock(
            tuple(range(len(members))),
            float(k),
            float(k + 1),
            0.5,
            min(a.weight for a in members),
        )
        b = concentration_points(seq, [block]).midpoints[0]
        conc_bound = math.fsum(a.weight * (a.jump - b) ** 2 for a in members)
        conc_terms.append(conc_bound)

        exact_tv = None
        law = _bucket_law(members)
        if law is not None:
            moved = _bucket_law(members, at=b)
            exact_w2 = wasserstein2(law, moved).distance ** 2
            if exact_w2 > conc_bound + BOUND_SLACK:
                raise CertificateViolation(
                    f"bucket {k}: W2^2 {exact_w2:.12g} exceeds concentration sum {conc_bound:.12g}"
                )
            conc_exact.append(exact_w2)
            exact_tv = total_variation_upper(moved, standard_poisson(lam, b, eps_trunc))
        else:
            logger.debug("bucket %d: exact convolution skipped, over %d atoms", k, EXACT_ATOM_LIMIT)

        lecam = p_sq / lam
        majorant = 2.0 * variance_bound / (abs(k) - 1) ** 2
        if lecam > majorant + BOUND_SLACK:
            raise CertificateViolation(
                f"bucket {k}: Le Cam term {lecam:.12g} exceeds {majorant:.12g}"
            )
        lecam_terms.append(2.0 * lecam if exact_tv is None else exact_tv)
        lecam_bounds.append(2.0 * lecam)

        entries.append((lam, b))
        bucket_report.append(
            {
                "k": k,
                "lambda": lam,
                "b": b,
                "members": [a.index for a in members],
                "lecam": lecam,
                "lecam_l1": 2.0 * lecam,
                "majorant": majorant,
                "exact_tv": exact_tv,
            }
        )

    certificates = (
        finite_series("w2_concentration", conc_terms),
        finite_series("lecam", lecam_terms, lecam_bounds).check_bounds(),
    )
    report = {
        "buckets": bucket_report,
        "ignored": {
            str(k): {
                "members": [a.index for a in group],
                "variance_sum": math.fsum(a.variance for a in group),
            }
            for k, group in sorted(ignored.items())
        },
        "exact_concentration": conc_exact,
    }
    return PipelineResult(PoissonFlowSpec(tuple(entries)), certificates, report)


@dataclass(frozen=True)
class TwoPointFamily:
    """Two-point laws (1−p)δ_0 + pδ_b with their multiplicities."""

    laws: Tuple[Tuple[DiscreteMeasure, int], ...]

    def expanded(self) -> List[DiscreteMeasure]:
        return [law for law, count in self.laws for _ in range(count)]

    def as_sequence(self) -> MeasureSequence:
        return MeasureSequence.from_list(self.expanded(), description="two-point laws")

    def to_json(self) -> List[Dict[str, object]]:
        return [{"measure": law.to_json(), "count": count} for law, count in self.laws]


def default_mass_cap(k: int) -> float:
    """ε_k = 2^{−k}, capped at 1."""
    return min(1.0, 2.0 ** (-k))


def poisson_to_two_point(
    spec: PoissonFlowSpec,
    mass_cap: Callable[[int], float] = default_mass_cap,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
) -> PipelineResult:
    """Expand (λ_k, b_k) into M_k copies of (1−λ_k/M_k)δ_0 + (λ_k/M_k)δ_{b_k}.

    M_k is the least integer with λ_k/M_k ≤ ε_k. The Prokhorov certificate
    holds the exact distance to 𝓔(λ_k δ_{b_k}), bounded by 4λ_k/M_k.
    """
    if len(spec) == 0:
        raise DomainError("the Poisson flow spec is empty")

    laws: List[Tuple[DiscreteMeasure, int]] = []
    terms, bounds, variances = [], [], []
    for k, (lam, b) in enumerate(spec.entries, start=1):
        cap = mass_cap(k)
        if not 0.0 < cap <= 1.0:
            raise DomainError(f"mass cap at {k} must lie in (0, 1], got {cap}")
        count = max(1, math.ceil(lam / cap - 1e-12))
        p = lam / count
        law = DiscreteMeasure.from_atoms([(0.0, 1.0 - p), (b, p)])
        laws.append((law, count))

        target = standard_poisson(lam, b, eps_trunc)
        terms.append(total_variation_upper(convolve_power(law, count), target))
        bounds.append(4.0 * p)
        variances.append(p * (1.0 - p) * b * b)

    certificate = finite_series("prokhorov", terms, bounds).check_bounds()
    report = {"sup_variance": max(variances), "variances": variances}
    return PipelineResult(TwoPointFamily(tuple(laws)), (certificate,), report)


def split_divisible(spec: PoissonFlowSpec, L: int) -> PoissonFlowSpec:
    """Each (λ_k, b_k) becomes (λ_k/L, b_k); L copies recover the original flow."""
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L}")
    return PoissonFlowSpec(tuple((lam / L, b) for lam, b in spec.entries))


def verify_split(
    spec: PoissonFlowSpec, L: int, eps_trunc: float = DEFAULT_EPS_TRUNC
) -> PipelineResult:
    """Check 𝓔(λδ_b / L)^{*L} = 𝓔(λδ_b) entry by entry, up to truncation defects."""
    part = split_divisible(spec, L)
    terms, bounds = [], []
    for (lam, b), (piece, _) in zip(spec.entries, part.entries):
        whole = standard_poisson(lam, b, eps_trunc)
        power = convolve_power(standard_poisson(piece, b, eps_trunc), L)
        terms.append(total_variation_upper(power, whole))
        bounds.append(2.0 * (power.defect + whole.defect))
    certificate = finite_series("split", terms, bounds).check_bounds()
    return PipelineResult(part, (certificate,), {"L": int(L)})
