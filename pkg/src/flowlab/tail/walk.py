"""Monte Carlo simulation of the random walk S_N = Σ_{n≤N} ω_n.

Verification only: no certificate depends on sampled data. Draws at index n
come from their own counter-based stream derived from (seed, n), so a sample
never depends on the thread count or on which other indices are simulated.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from flowlab.config import DEFAULT_SEED
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, MeasureSequence
from flowlab.utils.parallel import evaluate_terms

logger = logging.getLogger(__name__)


def _stream_key(n: int) -> int:
    """Bijection ℤ → ℕ used as the spawn key of index n."""
    return 2 * n if n >= 0 else -2 * n - 1


def index_stream(seed: int, n: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_stream_key(n),)))


def sample_index(mu: DiscreteMeasure, seed: int, n: int, samples: int) -> np.ndarray:
    """Draw ``samples`` steps from μ_n; draw i is the i-th value of its stream."""
    if len(mu) == 0:
        raise DomainError(f"measure at index {n} has no atoms to sample")
    if mu.defect > 0.0:
        logger.debug("index %d: sampling atoms only, defect %.3g ignored", n, mu.defect)
    weights = mu.masses / mu.total_mass
    return index_stream(seed, n).choice(mu.positions, size=samples, p=weights)


@dataclass(frozen=True)
class BlockStatistics:
    indices: Tuple[int, ...]
    mean: float
    variance: float


@dataclass(frozen=True)
class WalkStatistics:
    """Summary of simulated paths.

    Attributes:
        horizon: Number of steps N
        samples: Number of simulated paths
        seed: Seed of every index stream
        mean: Empirical mean of S_N
        variance: Empirical variance of S_N (ddof 0)
        distribution: Empirical law of S_N
        blocks: Statistics of block sums over caller partitions
    """

    horizon: int
    samples: int
    seed: int
    mean: float
    variance: float
    distribution: DiscreteMeasure
    blocks: Tuple[BlockStatistics, ...]

    def to_json(self) -> Dict[str, object]:
        return {
            "horizon": self.horizon,
            "samples": self.samples,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "distribution": self.distribution.to_json(),
            "blocks": [
                {"indices": list(b.indices), "mean": b.mean, "variance": b.variance}
                for b in self.blocks
            ],
        }


def simulate_walk(
    seq: MeasureSequence,
    horizon: int,
    samples: int,
    seed: int = DEFAULT_SEED,
    blocks: Optional[Sequence[Sequence[int]]] = None,
) -> WalkStatistics:
    """Simulate ``samples`` paths of the walk over the first ``horizon`` indices.

    Args:
        seq: Transition laws μ_n
        horizon: Number of steps
        samples: Number of independent paths
        seed: Base seed
        blocks: Optional index sets whose block sums are summarized

    Returns:
        Path statistics, bit-identical for identical arguments
    """
    if samples < 1:
        raise DomainError(f"samples must be at least 1, got {samples}")
    if horizon < 1:
        raise DomainError(f"horizon must be at least 1, got {horizon}")

    indices = seq.window(horizon)
    steps = evaluate_terms(lambda n: sample_index(seq[n], seed, n, samples), indices)
    by_index = dict(zip(indices, steps))

    total = np.zeros(samples)
    for n in indices:
        total += by_index[n]

    block_stats: List[BlockStatistics] = []
    for block in blocks or ():
        block_sum = np.zeros(samples)
        for n in block:
            draws = by_index.get(n)
            if draws is None:
                draws = sample_index(seq[n], seed, n, samples)
            block_sum += draws
        block_stats.append(
            BlockStatistics(tuple(block), float(block_sum.mean()), float(block_sum.var()))
        )

    values, counts = np.unique(total, return_counts=True)
    distribution = DiscreteMeasure(values, counts / samples)

    logger.debug("simulated %d paths of %d steps with seed %d", samples, horizon, seed)
    return WalkStatistics(
        horizon=horizon,
        samples=samples,
        seed=seed,
        mean=float(total.mean()),
        variance=float(total.var()),
        distribution=distribution,
        blocks=tuple(block_stats),
    )
