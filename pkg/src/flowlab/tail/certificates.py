"""Certificate series: partial sums of a summability condition plus a verdict.

A finite prefix never decides convergence by itself. A series is
``certified_convergent`` only with an analytic tail bound, and
``certified_divergent`` only with an analytic divergence witness, an infinite
term, or the growth witness of :func:`growth_witness`.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from flowlab.config import (
    BOUND_SLACK,
    DEFAULT_DIVERGENCE_THRESHOLD,
    DEFAULT_GROWTH_RATIO,
    MIN_WITNESS_TERMS,
    STABILIZATION_TOL,
)
from flowlab.errors import CertificateViolation, DomainError
from flowlab.utils.formatting import decode_float, encode_float

FINITE_INPUT_NOTE = "finite input: sum complete"


class Verdict(str, Enum):
    CERTIFIED_CONVERGENT = "certified_convergent"
    CERTIFIED_DIVERGENT = "certified_divergent"
    INCONCLUSIVE = "inconclusive"


def growth_witness(
    partial_sums: Sequence[float],
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    growth_ratio: float = DEFAULT_GROWTH_RATIO,
) -> bool:
    """True when S_N > threshold with nondecreasing increments over the second half.

    The second half must also add at least ``growth_ratio · S_{⌊N/2⌋}``. A window
    shorter than ``MIN_WITNESS_TERMS`` is never a witness.
    """
    count = len(partial_sums)
    if count < MIN_WITNESS_TERMS:
        return False
    sums = np.asarray(partial_sums, dtype=np.float64)
    last = float(sums[-1])
    half = float(sums[count // 2 - 1])
    if not (last > threshold and last - half >= growth_ratio * half):
        return False
    increments = np.diff(sums[count // 2 - 1 :])
    return bool(np.all(increments[1:] >= (1.0 - STABILIZATION_TOL) * increments[:-1]))


def decide_verdict(
    partial_sums: Sequence[float],
    tail_bound: Optional[float],
    divergence_witness: Optional[str],
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    growth_ratio: float = DEFAULT_GROWTH_RATIO,
) -> Verdict:
    if divergence_witness is not None:
        return Verdict.CERTIFIED_DIVERGENT
    if partial_sums and math.isinf(partial_sums[-1]):
        return Verdict.CERTIFIED_DIVERGENT
    if tail_bound is not None and math.isfinite(tail_bound):
        return Verdict.CERTIFIED_CONVERGENT
    if growth_witness(partial_sums, threshold, growth_ratio):
        return Verdict.CERTIFIED_DIVERGENT
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class CertificateSeries:
    """Terms, prefix sums and verdict of one summability condition.

    Attributes:
        name: Label used in reports and CSV file names
        indices: Index of each term (ℕ, ℤ or block number)
        terms: Nonnegative summands, possibly infinite
        partial_sums: Prefix sums in index order
        tail_bound: Analytic bound on the sum beyond the window, if known
        verdict: Three-valued conclusion
        divergence_witness: Analytic reason the sum is infinite, if known
        term_bounds: Per-term analytic bounds the exact terms must respect
        note: Free text carried into reports
    """

    name: str
    indices: Tuple[int, ...]
    terms: Tuple[float, ...]
    partial_sums: Tuple[float, ...]
    tail_bound: Optional[float]
    verdict: Verdict
    divergence_witness: Optional[str] = None
    term_bounds: Optional[Tuple[float, ...]] = None
    note: str = ""
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD
    growth_ratio: float = DEFAULT_GROWTH_RATIO

    @property
    def total(self) -> float:
        """The last partial sum (zero for an empty series)."""
        return self.partial_sums[-1] if self.partial_sums else 0.0

    @property
    def upper_estimate(self) -> Optional[float]:
        """Partial sum plus tail bound, when a tail bound exists."""
        if self.tail_bound is None:
            return None
        return self.total + self.tail_bound

    def __len__(self) -> int:
        return len(self.terms)

    def check_bounds(self, slack: float = BOUND_SLACK) -> "CertificateSeries":
        """Assert every exact term is at most its analytic bound.

        Raises:
            CertificateViolation: On the first violated bound
        """
        if self.term_bounds is None:
            return self
        for index, term, bound in zip(self.indices, self.terms, self.term_bounds):
            if term > bound + slack:
                raise CertificateViolation(
                    f"{self.name}: term {term:.12g} at index {index} "
                    f"exceeds its bound {bound:.12g}"
                )
        return self

    def stabilized(self, rel_tol: float = STABILIZATION_TOL) -> bool:
        """Whether the second half of the window added almost nothing.

        Window evidence only; this never upgrades the verdict.
        """
        count = len(self.partial_sums)
        if count < 2 or math.isinf(self.total):
            return False
        half = self.partial_sums[count // 2 - 1]
        return self.total - half <= rel_tol * max(1.0, self.total)

    def with_tail_bound(self, tail_bound: float, note: str = "") -> "CertificateSeries":
        verdict = decide_verdict(
            self.partial_sums,
            tail_bound,
            self.divergence_witness,
            self.threshold,
            self.growth_ratio,
        )
        return replace(
            self, tail_bound=tail_bound, verdict=verdict, note=note or self.note
        )

    def verify(self, rel_tol: float = 1e-12) -> bool:
        """Recompute prefix sums and verdict from the embedded terms."""
        recomputed = np.cumsum(np.asarray(self.terms, dtype=np.float64))
        if len(recomputed) != len(self.partial_sums):
            return False
        for got, want in zip(self.partial_sums, recomputed):
            if math.isinf(want) or math.isinf(got):
                if got != want:
                    return False
            elif abs(got - want) > rel_tol * max(1.0, abs(want)):
                return False
        verdict = decide_verdict(
            list(recomputed),
            self.tail_bound,
            self.divergence_witness,
            self.threshold,
            self.growth_ratio,
        )
        return verdict is self.verdict

    def to_json(self) -> Dict[str, object]:
        payload: Dict[str, object] = {
            "name": self.name,
            "indices": list(self.indices),
            "terms": [encode_float(t) for t in self.terms],
            "partial": [encode_float(s) for s in self.partial_sums],
            "tail_bound": encode_float(self.tail_bound),
            "verdict": self.verdict.value,
            "threshold": self.threshold,
            "growth_ratio": self.growth_ratio,
        }
        if self.divergence_witness is not None:
            payload["divergence_witness"] = self.divergence_witness
        if self.term_bounds is not None:
            payload["term_bounds"] = [encode_float(b) for b in self.term_bounds]
        if self.note:
            payload["note"] = self.note
        return payload

    @classmethod
    def from_json(cls, payload: Dict[str, object]) -> "CertificateSeries":
        try:
            bounds = payload.get("term_bounds")
            return cls(
                name=str(payload["name"]),
                indices=tuple(int(i) for i in payload["indices"]),
                terms=tuple(decode_float(t) for t in payload["terms"]),
                partial_sums=tuple(decode_float(s) for s in payload["partial"]),
                tail_bound=decode_float(payload.get("tail_bound")),
                verdict=Verdict(payload["verdict"]),
                divergence_witness=payload.get("divergence_witness"),
                term_bounds=None
                if bounds is None
                else tuple(decode_float(b) for b in bounds),
                note=str(payload.get("note", "")),
                threshold=float(payload.get("threshold", DEFAULT_DIVERGENCE_THRESHOLD)),
                growth_ratio=float(payload.get("growth_ratio", DEFAULT_GROWTH_RATIO)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed certificate payload: {e}") from e


def build_series(
    name: str,
    indices: Sequence[int],
    terms: Sequence[float],
    tail_bound: Optional[float] = None,
    divergence_witness: Optional[str] = None,
    term_bounds: Optional[Sequence[float]] = None,
    note: str = "",
    threshold: float = DEFAULT_DIVERGENCE_THRESHOLD,
    growth_ratio: float = DEFAULT_GROWTH_RATIO,
) -> CertificateSeries:
    """Assemble a CertificateSeries, computing prefix sums and the verdict.

    Raises:
        DomainError: If lengths disagree, a term is negative or NaN, or both
            a tail bound and a divergence witness are supplied
    """
    if len(indices) != len(terms):
        raise DomainError(f"{name}: indices and terms must have equal length")
    if term_bounds is not None and len(term_bounds) != len(terms):
        raise DomainError(f"{name}: term_bounds must align with terms")
    if tail_bound is not None and (math.isnan(tail_bound) or tail_bound < 0.0):
        raise DomainError(f"{name}: tail bound must be nonnegative, got {tail_bound}")
    if tail_bound is not None and divergence_witness is not None:
        raise DomainError(
            f"{name}: a series cannot have both a tail bound and a divergence witness"
        )
    if threshold <= 0.0 or growth_ratio <= 0.0:
        raise DomainError(f"{name}: divergence threshold and growth ratio must be positive")

    values = np.asarray(list(terms), dtype=np.float64)
    if np.any(np.isnan(values)):
        raise DomainError(f"{name}: terms must not be NaN")
    if np.any(values < -1e-15):
        raise DomainError(f"{name}: terms must be nonnegative")
    values = np.maximum(values, 0.0)
    partial = np.cumsum(values)

    verdict = decide_verdict(
        list(partial), tail_bound, divergence_witness, threshold, growth_ratio
    )
    return CertificateSeries(
        name=name,
        indices=tuple(int(i) for i in indices),
        terms=tuple(float(v) for v in values),
        partial_sums=tuple(float(s) for s in partial),
        tail_bound=None if tail_bound is None else float(tail_bound),
        verdict=verdict,
        divergence_witness=divergence_witness,
        term_bounds=None if term_bounds is None else tuple(float(b) for b in term_bounds),
        note=note,
        threshold=threshold,
        growth_ratio=growth_ratio,
    )


def finite_series(
    name: str,
    terms: Sequence[float],
    term_bounds: Optional[Sequence[float]] = None,
    note: str = FINITE_INPUT_NOTE,
    start: int = 1,
) -> CertificateSeries:
    """Series over a finite input, complete by construction (tail bound 0)."""
    indices = list(range(start, start + len(terms)))
    return build_series(
        name, indices, terms, tail_bound=0.0, term_bounds=term_bounds, note=note
    )


def summarize(
    series: Sequence[CertificateSeries],
) -> List[Tuple[str, int, float, Optional[float], str]]:
    """Rows of (name, term count, partial sum, tail bound, verdict)."""
    return [(s.name, len(s), s.total, s.tail_bound, s.verdict.value) for s in series]
