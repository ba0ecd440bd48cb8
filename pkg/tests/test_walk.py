"""Tests for the Monte Carlo walk simulator."""

import pytest

from flowlab import config
from flowlab.errors import DomainError
from flowlab.measures.discrete import IndexDomain, MeasureSequence, dirac, zero_measure
from flowlab.tail.walk import simulate_walk


class TestSimulateWalk:
    """Tests for simulate_walk."""

    def test_deterministic_steps(self):
        """Point masses give S_N = Σ t_n on every path."""
        seq = MeasureSequence(lambda n: dirac(0.5 * n))
        stats = simulate_walk(seq, 10, 50, seed=3)
        assert stats.mean == pytest.approx(27.5)
        assert stats.variance == 0.0
        assert stats.distribution.atoms == [(27.5, 1.0)]

    def test_fair_coin_mean(self, fair_coin):
        """400 fair coins average 200 within five standard errors."""
        seq = MeasureSequence(lambda n: fair_coin)
        stats = simulate_walk(seq, 400, 10_000, seed=11)
        assert abs(stats.mean - 200.0) <= 0.5
        assert stats.variance == pytest.approx(100.0, rel=0.1)

    def test_same_seed_identical(self, fair_coin):
        """Equal arguments give bit-identical statistics."""
        seq = MeasureSequence(lambda n: fair_coin)
        first = simulate_walk(seq, 30, 500, seed=7)
        second = simulate_walk(seq, 30, 500, seed=7)
        assert first.to_json() == second.to_json()

    def test_different_seeds(self, fair_coin):
        """Different seeds give different paths."""
        seq = MeasureSequence(lambda n: fair_coin)
        assert simulate_walk(seq, 30, 500, seed=1).mean != simulate_walk(seq, 30, 500, seed=2).mean

    def test_index_streams_independent_of_horizon(self, fair_coin):
        """Block sums over the same indices do not depend on the horizon."""
        seq = MeasureSequence(lambda n: fair_coin)
        short = simulate_walk(seq, 5, 200, seed=5, blocks=[[1, 2, 3]])
        long = simulate_walk(seq, 40, 200, seed=5, blocks=[[1, 2, 3]])
        assert short.blocks == long.blocks

    def test_thread_count_irrelevant(self, fair_coin, monkeypatch):
        """Worker threads do not change the draws."""
        seq = MeasureSequence(lambda n: fair_coin)
        serial = simulate_walk(seq, 25, 300, seed=9)
        monkeypatch.setattr(config, "THREADS", 4)
        threaded = simulate_walk(seq, 25, 300, seed=9)
        assert serial.to_json() == threaded.to_json()

    def test_blocks_outside_window(self, fair_coin):
        """Blocks may use indices beyond the horizon."""
        seq = MeasureSequence(lambda n: fair_coin)
        stats = simulate_walk(seq, 2, 4000, seed=0, blocks=[[10, 11]])
        assert stats.blocks[0].indices == (10, 11)
        assert stats.blocks[0].mean == pytest.approx(1.0, abs=0.1)

    def test_integer_window(self):
        """Sequences over ℤ walk over −N..N."""
        seq = MeasureSequence(lambda n: dirac(1.0), IndexDomain.INTEGER)
        assert simulate_walk(seq, 3, 10).mean == pytest.approx(7.0)

    def test_requires_samples(self, fair_coin):
        """At least one sample is needed."""
        with pytest.raises(DomainError):
            simulate_walk(MeasureSequence(lambda n: fair_coin), 5, 0)

    def test_empty_measure(self):
        """A measure without atoms cannot be sampled."""
        with pytest.raises(DomainError):
            simulate_walk(MeasureSequence(lambda n: zero_measure()), 3, 10)
