"""From intensity and Følner data to an explicit nonsingular Bernoulli family.

Level n carries the two-valued intensity γ_0(g, n): λ_n e^{a_n}/|A_n| on A_n
and λ_n/|A_n| elsewhere. The Poisson suspension of γ_0 is a Bernoulli shift
whose marginals are products of Poisson laws, one per level.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import poisson

from flowlab.bernoulli.analysis import kakutani_check
from flowlab.bernoulli.family import BernoulliFamily, symmetric_indices
from flowlab.config import (
    CONSERVATIVITY_RATIO,
    DEFAULT_EPS_TRUNC,
    DEFECT_BUDGET,
    SELECTION_GROWTH,
)
from flowlab.errors import (
    CapacityError,
    CertificateViolation,
    DomainError,
    InternalError,
    SelectionError,
)
from flowlab.measures.discrete import DiscreteMeasure, IndexDomain, MeasureSequence
from flowlab.measures.poisson import truncation_order
from flowlab.metrics.distances import poisson_hellinger_sq
from flowlab.pipelines.specs import PoissonFlowSpec
from flowlab.suspension.folner import Element, FolnerKind, FolnerSpec
from flowlab.tail.certificates import CertificateSeries

logger = logging.getLogger(__name__)


def drift_weight(a: float) -> float:
    """(e^a − e^{−a})(e^a − 1), nonnegative for every real a."""
    return (math.exp(a) - math.exp(-a)) * math.expm1(a)


def _inverse(g: Element) -> Element:
    return -g if isinstance(g, int) else tuple(-x for x in g)


@dataclass(frozen=True)
class IntensitySpec:
    """Level data (λ_n, a_n, A_n)."""

    lambdas: Tuple[float, ...]
    a: Tuple[float, ...]
    folner: FolnerSpec

    def __post_init__(self) -> None:
        lambdas = tuple(float(x) for x in self.lambdas)
        a = tuple(float(x) for x in self.a)
        if len(lambdas) != len(a):
            raise DomainError("need one drift a_n per intensity lambda_n")
        if len(self.folner) < len(lambdas):
            raise DomainError(f"need {len(lambdas)} Følner sets, got {len(self.folner)}")
        for lam, drift in zip(lambdas, a):
            if not (lam > 0.0 and math.isfinite(lam)) or not math.isfinite(drift):
                raise DomainError(f"invalid level (lambda={lam}, a={drift})")
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "a", a)

    def __len__(self) -> int:
        return len(self.lambdas)

    def gamma0(self, g: Element, level: int) -> float:
        base = self.lambdas[level] / self.folner.sizes[level]
        return base * math.exp(self.a[level]) if self.folner.contains(g, level) else base

    def weights(self) -> List[float]:
        """Per-level κ weights λ_n (e^{a_n} − e^{−a_n})(e^{a_n} − 1)."""
        return [lam * drift_weight(drift) for lam, drift in zip(self.lambdas, self.a)]

    def to_dict(self) -> Dict[str, object]:
        return {
            "lambda": list(self.lambdas),
            "a": list(self.a),
            "folner": self.folner.to_dict(),
        }


def kappa_eval(spec: IntensitySpec, g: Element, level_horizon: Optional[int] = None) -> float:
    """κ_0(g) = Σ_n ½ λ_n |A_n|^{−1} |gA_n △ A_n| (e^{a_n} − e^{−a_n})(e^{a_n} − 1).
    """
    levels = len(spec) if level_horizon is None else min(level_horizon, len(spec))
    return math.fsum(
        0.5 * w / spec.folner.sizes[n] * spec.folner.sym_diff(g, n)
        for n, w in zip(range(levels), spec.weights())
    )


def level_kappa_bounds(spec: IntensitySpec) -> List[float]:
    """K_m ≥ κ_0(g) for every |g| ≤ L_m, for interval Følner data."""
    weights = spec.weights()
    sizes = spec.folner.sizes
    bounds = []
    for m in range(len(spec)):
        inner = math.fsum(weights[: m + 1])
        outer = math.fsum(w * sizes[m] / sizes[n] for n, w in enumerate(weights) if n > m)
        bounds.append(inner + outer)
    return bounds


class GrowthVerdict(str, Enum):
    CERTIFIED_PASS = "certified_pass"
    EMPIRICAL_PASS = "empirical_pass"
    FAIL = "fail"


@dataclass(frozen=True)
class GrowthReport:
    """Counts N(s) = |{g ∈ Λ : κ(g^{±1}) ≤ s}| and the ratio log N(s)/s."""

    rows: Tuple[Tuple[float, int, float], ...]
    verdict: GrowthVerdict
    witness: str = ""
    level_ratios: Tuple[float, ...] = field(default_factory=tuple)

    def to_json(self) -> Dict[str, object]:
        return {
            "rows": [{"s": s, "count": n, "ratio": r} for s, n, r in self.rows],
            "verdict": self.verdict.value,
            "witness": self.witness,
            "level_ratios": list(self.level_ratios),
        }


def conservativity_growth(
    spec: IntensitySpec,
    s_grid: Sequence[float],
    probe: Sequence[Element],
    kappa_bound: Optional[float] = None,
) -> GrowthReport:
    """Check limsup_s log N(s)/s > 3, the recurrence condition of the suspension.

    A bounded κ (``kappa_bound``, checked on the probe) certifies the pass. For
    interval data the level bounds K_m certify N(K_m) ≥ 2L_m + 1; the last level
    decides. Otherwise the probe counts at the largest s give an empirical verdict.

    Raises:
        DomainError: If the grid has a nonpositive point or the probe exceeds
            ``kappa_bound``
    """
    grid = sorted(float(s) for s in s_grid)
    if not grid or grid[0] <= 0.0:
        raise DomainError("the s grid must be nonempty and positive")
    kappas = np.array([max(kappa_eval(spec, g), kappa_eval(spec, _inverse(g))) for g in probe])

    rows = []
    for s in grid:
        count = int(np.count_nonzero(kappas <= s))
        ratio = math.log(count) / s if count else -math.inf
        rows.append((s, count, ratio))

    level_ratios: Tuple[float, ...] = ()
    if spec.folner.kind is FolnerKind.INTERVAL and len(spec):
        level_ratios = tuple(
            math.inf if bound == 0.0 else math.log(2 * size + 1) / bound
            for size, bound in zip(spec.folner.sizes, level_kappa_bounds(spec))
        )

    if kappa_bound is not None:
        if kappas.size and kappas.max() > kappa_bound + 1e-12:
            raise DomainError(f"probe kappa {kappas.max():.12g} exceeds the bound {kappa_bound:g}")
        verdict, witness = GrowthVerdict.CERTIFIED_PASS, f"kappa bounded by {kappa_bound:g}"
    elif len(spec) == 0:
        verdict, witness = GrowthVerdict.CERTIFIED_PASS, "empty spec: kappa vanishes"
    elif level_ratios and level_ratios[-1] > CONSERVATIVITY_RATIO:
        verdict = GrowthVerdict.CERTIFIED_PASS
        witness = f"level bound: log(2L+1)/K = {level_ratios[-1]:.6g}"
    elif rows[-1][2] > CONSERVATIVITY_RATIO:
        verdict, witness = GrowthVerdict.EMPIRICAL_PASS, "probe window"
    else:
        verdict, witness = GrowthVerdict.FAIL, ""
    return GrowthReport(tuple(rows), verdict, witness, level_ratios)


@dataclass(frozen=True)
class SelectionResult:
    folner: FolnerSpec
    indices: Tuple[int, ...]
    constraints: Tuple[Dict[str, object], ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "folner": self.folner.to_dict(),
            "indices": list(self.indices),
            "constraints": list(self.constraints),
        }


def _level_requirements(
    level: int, lam: float, drift: float, previous: int, accumulated: float, growth: float
) -> Dict[str, float]:
    """Minimal |A| for the atomic, κ-uniform and growth constraints of a level (1-based)."""
    scale = 2.0**level
    weight = lam * drift_weight(drift)
    target = growth * (accumulated + weight + 2.0 ** (-level))
    return {
        "atomic_min": lam * (1.0 + math.exp(drift)) * scale,
        "kappa_min": weight * previous * scale,
        "growth_min": math.expm1(target) / 2.0,
    }


def check_selection(
    lambdas: Sequence[float],
    a: Sequence[float],
    folner: FolnerSpec,
    growth: float = SELECTION_GROWTH,
) -> List[str]:
    """Violated level constraints of a selected Følner subsequence."""
    problems = []
    previous, accumulated = 0, 0.0
    for m, (lam, drift) in enumerate(zip(lambdas, a), start=1):
        size = folner.sizes[m - 1]
        requirements = _level_requirements(m, lam, drift, previous, accumulated, growth)
        for name, minimum in requirements.items():
            if size < minimum * (1.0 - 1e-12):
                problems.append(f"level {m}: |A| = {size} below {name} {minimum:.6g}")
        previous = size
        accumulated += lam * drift_weight(drift)
    return problems


def subsequence_select(
    lambdas: Sequence[float],
    a: Sequence[float],
    folner: FolnerSpec,
    growth: float = SELECTION_GROWTH,
) -> SelectionResult:
    """Greedily keep, for each level m, the first later Følner set large enough.

    Level m needs λ_m(1 + e^{a_m})/|A| ≤ 2^{−m} (atomic condition),
    λ_m w(a_m)|A_{m−1}|/|A| ≤ 2^{−m} (κ stays uniformly bounded on the previous
    set) and log(2|A| + 1) ≥ growth·(Σ_{n≤m} λ_n w(a_n) + 2^{−m}).

    Raises:
        SelectionError: If the Følner data runs out before every level is placed
    """
    if len(lambdas) != len(a):
        raise DomainError("need one drift a_n per intensity lambda_n")
    chosen: List[int] = []
    constraints = []
    previous, accumulated, cursor = 0, 0.0, 0
    for m, (lam, drift) in enumerate(zip(lambdas, a), start=1):
        if drift == 0.0:
            logger.warning("level %d has a = 0: b_k = 0 excluded by PoissonFlowSpec invariant", m)
        needs = _level_requirements(m, lam, drift, previous, accumulated, growth)
        minimum = max(needs.values())
        while cursor < len(folner) and folner.sizes[cursor] < minimum:
            cursor += 1
        if cursor == len(folner):
            binding = max(needs, key=needs.get)
            raise SelectionError(
                f"level {m}: no Følner set of size >= {minimum:.6g} ({binding}) remains"
            )
        logger.debug("level %d takes Følner set %d of size %d", m, cursor, folner.sizes[cursor])
        chosen.append(cursor)
        record = {"level": m, "index": cursor, "size": folner.sizes[cursor]}
        record.update(needs)
        record["binding"] = max(needs, key=needs.get)
        constraints.append(record)
        previous = folner.sizes[cursor]
        accumulated += lam * drift_weight(drift)
        cursor += 1

    selected = folner.subsequence(chosen)
    problems = check_selection(lambdas, a, selected, growth)
    if problems:
        raise InternalError("selection fails its own re-check: " + "; ".join(problems))
    return SelectionResult(selected, tuple(chosen), tuple(constraints))


def _interval_xor(first: Tuple[int, int], second: Tuple[int, int]) -> List[range]:
    (a0, a1), (b0, b1) = first, second
    if a1 <= b0 or b1 <= a0:
        return [range(a0, a1), range(b0, b1)]
    return [range(min(a0, b0), max(a0, b0)), range(min(a1, b1), max(a1, b1))]


@dataclass(frozen=True)
class EmittedFamily:
    """A Bernoulli family over ℤ built from an IntensitySpec, with its closed forms."""

    family: BernoulliFamily
    spec: IntensitySpec
    level_horizon: int
    supports: Tuple[int, ...]

    def rates(self, g: int) -> List[float]:
        return [self.spec.gamma0(g, n) for n in range(self.level_horizon)]

    def closed_form_term(self, g: int, h: int) -> float:
        """H²(μ_{g+h}, μ_h) of the untruncated Poisson products."""
        affinity = 1.0
        for alpha, beta in zip(self.rates(g + h), self.rates(h)):
            affinity *= 1.0 - poisson_hellinger_sq(alpha, beta)
        return 1.0 - affinity

    def breakpoints(self, g: int) -> List[int]:
        """Every h where μ_{g+h} and μ_h can differ."""
        points = set()
        for n in range(self.level_horizon):
            size = self.spec.folner.sizes[n]
            for piece in _interval_xor((0, size), (-g, size - g)):
                points.update(piece)
        return sorted(points)

    def kakutani_closed_form(self, g: int, horizon: int) -> Tuple[float, float]:
        """Exact Kakutani sum split into the window |h| ≤ horizon and the rest."""
        inside, outside = [], []
        for h in self.breakpoints(g):
            (inside if abs(h) <= horizon else outside).append(self.closed_form_term(g, h))
        return math.fsum(inside), math.fsum(outside)

    def kakutani_certificate(self, g: int, horizon: int, tol: float = 1e-10) -> CertificateSeries:
        """kakutani_check with the closed-form remainder as tail bound.

        Truncation only lowers affinities, so each window term may exceed its
        closed form by half the two defects involved.

        Raises:
            CertificateViolation: If the window sum leaves that band by more than ``tol``
        """
        window, remainder = self.kakutani_closed_form(g, horizon)
        series = kakutani_check(self.family, g, horizon, tail_bound=remainder + tol)
        slack = math.fsum(
            0.5 * (self.family[g + h].defect + self.family[h].defect) for h in series.indices
        )
        if not window - tol <= series.total <= window + slack + tol:
            raise CertificateViolation(
                f"kakutani window sum {series.total:.15g} differs from closed form {window:.15g}"
            )
        return series


def emit_bernoulli(
    spec: IntensitySpec,
    level_horizon: Optional[int] = None,
    eps_trunc: float = DEFAULT_EPS_TRUNC,
    defect_budget: float = DEFECT_BUDGET,
) -> EmittedFamily:
    """The family μ_g = ⊗_{n} Poisson(γ_0(g, n)) over levels below ``level_horizon``.

    Each level is cut at the order where both of its rates have Poisson tail
    below ``eps_trunc``. Higher levels are restricted to the zero atom with
    mass ∏ exp(−γ_0(g, n)); everything cut away is the defect.

    Raises:
        DomainError: For Følner data of dimension above 1
        CapacityError: If some marginal's defect exceeds ``defect_budget``
    """
    if spec.folner.dimension != 1:
        raise DomainError("Bernoulli families are emitted for the integers only")
    horizon = len(spec) if level_horizon is None else min(level_horizon, len(spec))

    supports = []
    for n in range(horizon):
        outside = spec.lambdas[n] / spec.folner.sizes[n]
        supports.append(truncation_order(max(outside, outside * math.exp(spec.a[n])), eps_trunc))
    labels = tuple(
        "(" + ",".join(str(k) for k in combo) + ")"
        for combo in itertools.product(*(range(k + 1) for k in supports))
    )
    positions = np.arange(len(labels), dtype=np.float64)

    def generator(g: int) -> DiscreteMeasure:
        rates = [spec.gamma0(g, n) for n in range(len(spec))]
        pmfs = [poisson.pmf(np.arange(k + 1), rate) for k, rate in zip(supports, rates)]
        masses = np.ravel(reduce(np.multiply.outer, pmfs, np.ones(())))
        masses = masses * math.exp(-math.fsum(rates[horizon:]))
        defect = max(0.0, 1.0 - math.fsum(masses))
        if defect > defect_budget:
            raise CapacityError(
                f"marginal at g={g} has defect {defect:.3g} above the budget {defect_budget:g}"
            )
        if masses[0] < 1.0 - math.fsum(rates) - 1e-15:
            raise CertificateViolation(f"zero atom at g={g} below 1 - sum of rates")
        return DiscreteMeasure(positions, masses, defect)

    family = BernoulliFamily(
        labels,
        MeasureSequence(generator, IndexDomain.INTEGER, f"Poisson suspension, {horizon} levels"),
        "Poisson suspension",
    )
    return EmittedFamily(family, spec, horizon, tuple(supports))


def associated_flow_spec(lambdas: Sequence[float], a: Sequence[float]) -> PoissonFlowSpec:
    """Entries (λ_n, a_n), the Poisson flow the emitted family's associated flow realizes.

    Raises:
        DomainError: If lengths differ or some a_n is 0
    """
    if len(lambdas) != len(a):
        raise DomainError("need one drift a_n per intensity lambda_n")
    for n, drift in enumerate(a, start=1):
        if drift == 0.0:
            raise DomainError(f"a_{n} = 0 has no Poisson flow counterpart")
    return PoissonFlowSpec(tuple(zip(lambdas, a)))


def probe_window(radius: int) -> List[int]:
    return symmetric_indices(radius)
