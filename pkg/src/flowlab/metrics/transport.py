"""Quadratic optimal transport on the line.

Without a cutoff the monotone (quantile) coupling is optimal. With the cutoff
cost min((x−y)², κ²) it no longer is, and the transportation problem is
solved as a linear program with HiGHS.

A defect is mass of unknown position. Under the cutoff cost it sits on its
own slot at cost κ² from everything, the other side's defect included, so
truncation can only raise a distance. Plain W₂ has no such bound and
refuses defects unless the caller declares them the same truncated event.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from flowlab.config import DEFAULT_LP_LIMIT, MASS_TOL
from flowlab.errors import CapacityError, DomainError, InternalError
from flowlab.measures.discrete import DiscreteMeasure, second_moment_about
from flowlab.metrics.distances import require_probability

logger = logging.getLogger(__name__)

PlanEntry = Tuple[Optional[float], Optional[float], float]


class TransportMode(str, Enum):
    EXACT = "exact"
    MONOTONE_UPPER = "monotone_upper"


@dataclass(frozen=True)
class CouplingPlan:
    """A transport plan as (source, target, mass) triples and its cost.

    A ``None`` position stands for the defect on that side.
    """

    entries: Tuple[PlanEntry, ...]
    cost: float

    def marginals(self) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
        """Row and column marginals of the plan, defects included."""
        rows = DiscreteMeasure.from_atoms(
            ((x, m) for x, _, m in self.entries if x is not None),
            math.fsum(m for x, _, m in self.entries if x is None),
        )
        cols = DiscreteMeasure.from_atoms(
            ((y, m) for _, y, m in self.entries if y is not None),
            math.fsum(m for _, y, m in self.entries if y is None),
        )
        return rows, cols

    def to_json(self) -> Dict[str, object]:
        return {"entries": [list(e) for e in self.entries], "cost": self.cost}


@dataclass(frozen=True)
class TransportResult:
    distance: float
    plan: CouplingPlan


@dataclass(frozen=True)
class _Slots:
    """Atom positions and masses, with the defect as a flagged last slot."""

    positions: np.ndarray
    masses: np.ndarray
    defect: np.ndarray

    @classmethod
    def of(cls, mu: DiscreteMeasure, name: str) -> "_Slots":
        require_probability(mu, name)
        positions, masses = mu.positions, mu.masses
        defect = np.zeros(masses.size, dtype=bool)
        if mu.defect > 0.0:
            positions = np.append(positions, 0.0)
            masses = np.append(masses, mu.defect)
            defect = np.append(defect, True)
        return cls(positions, masses, defect)

    def __len__(self) -> int:
        return int(self.masses.size)

    def label(self, i: int) -> Optional[float]:
        return None if self.defect[i] else float(self.positions[i])


def cutoff_cost(x: np.ndarray, y: np.ndarray, kappa: float) -> np.ndarray:
    """Cost min((x−y)², κ²), with κ = inf giving the plain quadratic cost."""
    return np.minimum((x - y) ** 2, kappa**2)


def _slot_cost(
    source: _Slots,
    i: np.ndarray,
    target: _Slots,
    j: np.ndarray,
    kappa: float,
    shared_defect: bool = False,
) -> np.ndarray:
    cost = np.where(
        source.defect[i] | target.defect[j],
        kappa**2,
        cutoff_cost(source.positions[i], target.positions[j], kappa),
    )
    if shared_defect:
        cost = np.where(source.defect[i] & target.defect[j], 0.0, cost)
    return cost


def monotone_coupling(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    kappa: float = math.inf,
    shared_defect: bool = False,
) -> CouplingPlan:
    """Couple the quantile functions of μ and ν, defects last.

    Raises:
        DomainError: If κ = inf and a defect would have to move
    """
    a = _Slots.of(mu, "source measure")
    b = _Slots.of(nu, "target measure")

    cum_a = np.cumsum(a.masses)
    cum_b = np.cumsum(b.masses)
    cum_a[-1] = cum_b[-1] = 1.0

    breaks = np.union1d(cum_a, cum_b)
    lengths = np.diff(np.concatenate(([0.0], breaks)))
    keep = lengths > 0.0
    breaks, lengths = breaks[keep], lengths[keep]
    mids = breaks - 0.5 * lengths

    i = np.minimum(np.searchsorted(cum_a, mids), len(a) - 1)
    j = np.minimum(np.searchsorted(cum_b, mids), len(b) - 1)
    costs = _slot_cost(a, i, b, j, kappa, shared_defect)

    unbounded = np.isinf(costs)
    if np.any(unbounded):
        stray = float(np.sum(lengths[unbounded]))
        if stray > MASS_TOL:
            raise DomainError(f"W2 is infinite: {stray:.6g} of defect mass has no position")
        # rounding slivers between two equal defects
        costs = np.where(unbounded, 0.0, costs)

    cost = float(np.dot(lengths, costs))
    entries = tuple(
        (a.label(r), b.label(c), float(m)) for r, c, m in zip(i, j, lengths)
    )
    return CouplingPlan(entries, cost)


def optimal_coupling(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    kappa: float,
    lp_limit: int = DEFAULT_LP_LIMIT,
) -> CouplingPlan:
    """Solve the transportation LP for the cutoff cost exactly.

    Raises:
        DomainError: If κ is not finite
        CapacityError: If either support exceeds ``lp_limit`` atoms
        InternalError: If the solver reports failure
    """
    if not math.isfinite(kappa):
        raise DomainError("the transportation LP needs a finite kappa")
    a = _Slots.of(mu, "source measure")
    b = _Slots.of(nu, "target measure")
    n, m = len(a), len(b)
    if n > lp_limit or m > lp_limit:
        raise CapacityError(
            f"exact transport needs at most {lp_limit} atoms per side, got {n} and {m}"
        )

    rows, cols = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    cost = _slot_cost(a, rows, b, cols, kappa).ravel()

    # The last column constraint is implied by the others.
    row_sums = sparse.kron(sparse.identity(n), np.ones((1, m)))
    col_sums = sparse.kron(np.ones((1, n)), sparse.identity(m))
    blocks = [row_sums] if m == 1 else [row_sums, col_sums.tocsr()[: m - 1]]
    a_eq = sparse.vstack(blocks).tocsr()
    b_eq = np.concatenate((a.masses, b.masses[: m - 1]))

    result = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not result.success:
        raise InternalError(f"transportation LP failed: {result.message}")

    flow = np.clip(result.x, 0.0, None).reshape(n, m)
    used_rows, used_cols = np.nonzero(flow > 1e-15)
    entries = tuple(
        (a.label(r), b.label(c), float(flow[r, c])) for r, c in zip(used_rows, used_cols)
    )
    return CouplingPlan(entries, float(result.fun))


def wasserstein2(
    mu: DiscreteMeasure, nu: DiscreteMeasure, shared_defect: bool = False
) -> TransportResult:
    """Exact W₂ via the monotone coupling.

    With ``shared_defect`` the two defects stand for one truncated event, for
    example Poisson laws of equal rate cut at the same order. They must agree
    and are coupled to each other at no cost.

    Raises:
        DomainError: If either measure has a defect that is not shared
    """
    if shared_defect and abs(mu.defect - nu.defect) > MASS_TOL:
        raise DomainError(
            f"shared defects must agree, got {mu.defect:.6g} and {nu.defect:.6g}"
        )
    plan = monotone_coupling(mu, nu, shared_defect=shared_defect)
    return TransportResult(math.sqrt(max(plan.cost, 0.0)), plan)


def wasserstein2_cutoff(
    mu: DiscreteMeasure,
    nu: DiscreteMeasure,
    kappa: float,
    mode: TransportMode = TransportMode.EXACT,
    lp_limit: int = DEFAULT_LP_LIMIT,
) -> TransportResult:
    """W₂,κ: transport with cost min((x−y)², κ²).

    ``monotone_upper`` prices the monotone coupling under the cutoff cost,
    which bounds the optimum from above. κ = inf is plain W₂.
    """
    if not kappa > 0.0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    mode = TransportMode(mode)
    if math.isinf(kappa):
        return wasserstein2(mu, nu)
    if mode is TransportMode.MONOTONE_UPPER:
        plan = monotone_coupling(mu, nu, kappa)
    else:
        plan = optimal_coupling(mu, nu, kappa, lp_limit)
    return TransportResult(math.sqrt(max(plan.cost, 0.0)), plan)


def mixture_w2_bound(
    weights: Sequence[float],
    components: Sequence[DiscreteMeasure],
    targets: Sequence[float],
) -> float:
    """Σ_n p_n ∫(x − t_n)² dβ_n, an upper bound on W₂(Σp_nβ_n, Σp_nδ_{t_n})²."""
    if not (len(weights) == len(components) == len(targets)):
        raise DomainError("weights, components and targets must have equal length")
    if any(w < 0 for w in weights):
        raise DomainError("mixture weights must be nonnegative")
    if components and abs(math.fsum(weights) - 1.0) > MASS_TOL:
        raise DomainError(f"mixture weights must sum to 1, got {math.fsum(weights)}")

    terms: List[float] = []
    for w, beta, t in zip(weights, components, targets):
        if w == 0.0:
            continue
        require_probability(beta, "mixture component")
        if beta.defect > 0.0:
            raise DomainError("mixture components must not carry a defect")
        terms.append(w * second_moment_about(beta, t) / beta.total_mass)
    return math.fsum(terms)
