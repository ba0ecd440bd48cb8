"""Tests for the Hellinger and total variation distances."""

import math

import pytest

from conftest import random_measure
from flowlab.errors import DomainError
from flowlab.measures.discrete import DiscreteMeasure, dirac
from flowlab.metrics.distances import (
    hellinger,
    hellinger_sq,
    poisson_hellinger_sq,
    total_variation,
    total_variation_upper,
)


class TestHellinger:
    """Tests for hellinger_sq and hellinger."""

    def test_identical(self, fair_coin):
        """A measure is at distance zero from itself."""
        assert hellinger_sq(fair_coin, fair_coin) == 0.0

    def test_disjoint(self):
        """Disjoint supports give the maximum 1."""
        assert hellinger_sq(dirac(0.0), dirac(1.0)) == 1.0

    def test_coins(self, fair_coin, biased_coin):
        """H²(fair, biased) = 1 − (√0.125 + √0.375)."""
        expected = 1.0 - (math.sqrt(0.125) + math.sqrt(0.375))
        assert hellinger_sq(fair_coin, biased_coin) == pytest.approx(expected, abs=1e-12)
        assert hellinger_sq(fair_coin, biased_coin) == pytest.approx(0.034074, abs=1e-6)
        assert hellinger(fair_coin, biased_coin) == pytest.approx(math.sqrt(expected))

    def test_rejects_sub_probability(self):
        """Inputs must carry unit mass."""
        with pytest.raises(DomainError):
            hellinger_sq(dirac(0.0, 0.5), dirac(0.0))

    def test_defect_counts_as_mass(self):
        """A measure with defect is a probability if atoms plus defect sum to 1."""
        mu = DiscreteMeasure.from_dict({0.0: 0.9}, defect=0.1)
        assert hellinger_sq(mu, dirac(0.0)) == pytest.approx(1.0 - math.sqrt(0.9))

    def test_poisson_closed_form(self):
        """Poisson laws with equal means are at distance zero."""
        assert poisson_hellinger_sq(2.0, 2.0) == 0.0
        assert poisson_hellinger_sq(0.0, 4.0) == pytest.approx(1.0 - math.exp(-2.0))


class TestTotalVariation:
    """Tests for total_variation."""

    def test_identical(self, fair_coin):
        """A measure is at distance zero from itself."""
        assert total_variation(fair_coin, fair_coin) == 0.0

    def test_disjoint(self):
        """The ℓ¹ convention gives 2 on disjoint supports."""
        assert total_variation(dirac(0.0), dirac(1.0)) == 2.0

    def test_coins(self, fair_coin, biased_coin):
        """TV(fair, biased) = 0.5."""
        assert total_variation(fair_coin, biased_coin) == pytest.approx(0.5)

    def test_defects(self):
        """The defect difference is added; the upper variant adds both."""
        mu = DiscreteMeasure.from_dict({0.0: 0.9}, defect=0.1)
        nu = DiscreteMeasure.from_dict({0.0: 0.8}, defect=0.2)
        assert total_variation(mu, nu) == pytest.approx(0.2)
        assert total_variation_upper(mu, nu) == pytest.approx(0.4)


class TestDistanceInequalities:
    """Inequalities between the distances on random pairs."""

    def test_hellinger_and_tv(self, rng):
        """H² ≤ TV/2 ≤ √(H²(2 − H²))."""
        for _ in range(1000):
            atoms = int(rng.integers(1, 13))
            mu = random_measure(rng, atoms, grid=0.5)
            nu = random_measure(rng, int(rng.integers(1, 13)), grid=0.5)
            h2 = hellinger_sq(mu, nu)
            tv = total_variation(mu, nu)
            assert 0.0 <= h2 <= 1.0
            assert h2 <= 0.5 * tv + 1e-12
            assert 0.5 * tv <= math.sqrt(h2 * (2.0 - h2)) + 1e-9

    def test_symmetry(self, rng):
        """Both distances are symmetric."""
        for _ in range(100):
            mu, nu = random_measure(rng, 6, grid=0.5), random_measure(rng, 4, grid=0.5)
            assert hellinger_sq(mu, nu) == pytest.approx(hellinger_sq(nu, mu), abs=1e-15)
            assert total_variation(mu, nu) == pytest.approx(total_variation(nu, mu), abs=1e-15)
