"""Tests for the tail boundary analyses."""

import math

import pytest

from conftest import random_measure
from flowlab.errors import CertificateViolation, DomainError, ExtractionError
from flowlab.measures.discrete import DiscreteMeasure, MeasureSequence, dirac
from flowlab.measures.poisson import standard_poisson
from flowlab.tail.analysis import (
    APERIODICITY_NOTE,
    IDENTICAL_NOTE,
    PERIODIC_NOTE,
    ConcentrationBlock,
    EquivalenceMetric,
    concentration_points,
    eigenvalue_certificate,
    equivalence_certificate,
    identity_extractor,
    interval_extractor,
    middle_point,
    periodicity_score,
)
from flowlab.tail.certificates import Verdict


def constant_sequence(mu):
    return MeasureSequence(lambda n: mu)


def geometric_coin():
    """(1 − 2^{−n}) δ_0 + 2^{−n} δ_1."""
    return MeasureSequence(
        lambda n: DiscreteMeasure.from_dict({0.0: 1.0 - 2.0**-n, 1.0: 2.0**-n})
    )


class TestEigenvalueCertificate:
    """Tests for eigenvalue_certificate."""

    def test_poisson_lattice_eigenvalue(self):
        """σ_{λ_n,a} at ω = 2π/a has vanishing terms and a certified eigenvalue."""
        a = 0.75
        seq = MeasureSequence(lambda n: standard_poisson(1.0 + 1.0 / n, a))
        series = eigenvalue_certificate(seq, 2.0 * math.pi / a, 50, tail_bound=0.0)
        assert max(series.terms) < 1e-9
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_dirac_terms_are_exact(self):
        """Identical point masses δ_s give terms of exactly zero."""
        seq = constant_sequence(dirac(0.37))
        series = eigenvalue_certificate(seq, 2.9, 25, tail_bound=0.0)
        assert series.terms == (0.0,) * 25
        assert series.total == 0.0
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_defect_enters_terms(self):
        """A defect raises the term by its own mass."""
        truncated = DiscreteMeasure.from_dict({0.37: 0.9}, defect=0.1)
        series = eigenvalue_certificate(constant_sequence(truncated), 2.9, 3)
        assert series.terms == pytest.approx([0.2] * 3, abs=1e-15)

    def test_fair_coin_at_pi(self, fair_coin):
        """½(δ_0 + δ_1) at ω = π contributes 1 per index."""
        series = eigenvalue_certificate(constant_sequence(fair_coin), math.pi, 50, threshold=10.0)
        assert series.total == pytest.approx(50.0)
        assert series.verdict is Verdict.CERTIFIED_DIVERGENT

    def test_partial_data_only(self, fair_coin):
        """Without a bound or witness the verdict stays inconclusive."""
        series = eigenvalue_certificate(constant_sequence(fair_coin), 0.1, 20)
        assert series.verdict is Verdict.INCONCLUSIVE

    def test_translation_invariance(self):
        """Translating every μ_n leaves each term unchanged."""
        seq = geometric_coin()
        shifted = seq.translated(lambda n: 0.37 * n)
        plain = eigenvalue_certificate(seq, 1.3, 30)
        moved = eigenvalue_certificate(shifted, 1.3, 30)
        assert moved.terms == pytest.approx(plain.terms, abs=1e-12)

    def test_term_bounds_checked(self, fair_coin):
        """Supplied term bounds below the exact terms raise."""
        with pytest.raises(CertificateViolation):
            eigenvalue_certificate(constant_sequence(fair_coin), math.pi, 3, term_bounds=[0.5] * 3)

    def test_horizon(self, fair_coin):
        """The horizon must be positive."""
        with pytest.raises(DomainError):
            eigenvalue_certificate(constant_sequence(fair_coin), 1.0, 0)


class TestPeriodicityScore:
    """Tests for periodicity_score."""

    def test_fair_coin_is_periodic(self, fair_coin):
        """Constant Bernoulli(½) terms of ¼ diverge, which means periodic."""
        series = periodicity_score(
            constant_sequence(fair_coin), identity_extractor, 100, 1.0, threshold=10.0
        )
        assert series.terms[0] == pytest.approx(0.25)
        assert series.total == pytest.approx(25.0)
        assert series.verdict is Verdict.CERTIFIED_DIVERGENT
        assert series.note == PERIODIC_NOTE

    def test_point_masses(self):
        """Point masses have zero variance."""
        seq = MeasureSequence(lambda n: dirac(float(n) ** 0.5))
        series = periodicity_score(seq, identity_extractor, 20, 1.0)
        assert series.total == 0.0
        assert series.note == APERIODICITY_NOTE

    def test_geometric_sum(self):
        """Terms 2^{−n}(1 − 2^{−n}) sum to about 2/3."""
        series = periodicity_score(geometric_coin(), identity_extractor, 60, 1.0)
        assert series.total == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert series.verdict is Verdict.INCONCLUSIVE

    def test_translation_invariance(self):
        """Variance is translation invariant."""
        seq = geometric_coin()
        plain = periodicity_score(seq, identity_extractor, 30, 1.0)
        moved = periodicity_score(seq.translated(lambda n: 5.0 * n), identity_extractor, 30, 1.0)
        assert moved.terms == pytest.approx(plain.terms, abs=1e-9)

    def test_interval_extractor(self):
        """Restricting to an interval drops the far atom."""
        seq = constant_sequence(DiscreteMeasure.from_dict({0.0: 0.25, 1.0: 0.25, 9.0: 0.5}))
        series = periodicity_score(seq, interval_extractor(0.0, 1.0), 5, 1.0)
        assert series.terms[0] == pytest.approx(0.5 * 0.25)

    def test_two_point_lower_bound(self, rng):
        """For two-point β, β(ℝ)Var ≥ β({0})·∫x² dβ / β(ℝ)."""
        for _ in range(50):
            a, b, x = rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(1.0, 3.0)
            beta = DiscreteMeasure.from_dict({0.0: a, x: b})
            term = periodicity_score(constant_sequence(beta), identity_extractor, 1, 3.0).total
            assert term >= a * b * x**2 / (a + b) - 1e-12

    def test_dominance_violation(self, fair_coin):
        """An extractor adding mass raises ExtractionError."""

        def greedy(n, mu):
            return mu.scale_mass(2.0)

        with pytest.raises(ExtractionError):
            periodicity_score(constant_sequence(fair_coin), greedy, 3, 1.0)

    def test_width_violation(self, fair_coin):
        """An extracted measure wider than C raises ExtractionError."""
        with pytest.raises(ExtractionError):
            periodicity_score(constant_sequence(fair_coin), identity_extractor, 3, 0.5)

    def test_refinement(self):
        """A longer window never lowers a partial sum."""
        short = periodicity_score(geometric_coin(), identity_extractor, 10, 1.0)
        long = periodicity_score(geometric_coin(), identity_extractor, 20, 1.0)
        assert long.total >= short.total
        assert long.partial_sums[:10] == short.partial_sums


class TestConcentrationPoints:
    """Tests for concentration_points and middle_point."""

    def test_middle_point(self):
        """Odd counts take the median; even counts average the middle pair."""
        assert middle_point([5.2, 5.0, 5.1]) == 5.1
        assert middle_point([1.0, 4.0, 2.0, 3.0]) == 2.5

    def test_middle_point_empty(self):
        """An empty set has no middle point."""
        with pytest.raises(DomainError):
            middle_point([])

    def test_single_block(self):
        """Points 5.0, 5.1, 5.2 give t = 5.1 and block term 0.02."""
        seq = MeasureSequence.from_list(
            [DiscreteMeasure.from_dict({0.0: 1.0, s: 1.0}) for s in (5.0, 5.1, 5.2)]
        )
        block = ConcentrationBlock((1, 2, 3), 5.0, 5.2, 1.0, 1.0)
        result = concentration_points(seq, [block])
        assert result.midpoints[0] == pytest.approx(5.1)
        assert result.weighted_sum.terms[0] == pytest.approx(0.02)
        assert result.weighted_sum.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_identical_points(self):
        """Identical β_n give t = s and a zero term."""
        seq = constant_sequence(DiscreteMeasure.from_dict({0.0: 0.5, 3.0: 0.5}))
        result = concentration_points(seq, [ConcentrationBlock((1, 2), 2.0, 4.0, 0.5, 0.5)])
        assert result.midpoints == (3.0,)
        assert result.weighted_sum.total == 0.0

    def test_empty_block(self, fair_coin):
        """An empty block contributes zero."""
        result = concentration_points(
            constant_sequence(fair_coin), [ConcentrationBlock((), 2.0, 3.0, 1.0, 1.0)]
        )
        assert math.isnan(result.midpoints[0])
        assert result.weighted_sum.terms == (0.0,)

    def test_dominance_at_zero(self):
        """p larger than the mass at 0 raises ExtractionError."""
        seq = constant_sequence(DiscreteMeasure.from_dict({0.0: 0.5, 3.0: 0.5}))
        with pytest.raises(ExtractionError):
            concentration_points(seq, [ConcentrationBlock((1,), 2.0, 4.0, 0.75, 0.25)])

    def test_dominance_of_beta(self):
        """q β_n above μ_n raises ExtractionError."""
        seq = constant_sequence(DiscreteMeasure.from_dict({0.0: 0.5, 3.0: 0.5}))
        with pytest.raises(ExtractionError):
            concentration_points(seq, [ConcentrationBlock((1,), 2.0, 4.0, 0.25, 0.75)])

    def test_interval_meets_unit_window(self):
        """Block intervals must avoid (−1, 1)."""
        with pytest.raises(DomainError):
            ConcentrationBlock((1,), 0.5, 2.0, 1.0, 1.0)

    def test_width_bound(self):
        """Blocks wider than the bound are rejected."""
        seq = constant_sequence(DiscreteMeasure.from_dict({0.0: 0.5, 3.0: 0.5}))
        with pytest.raises(DomainError):
            concentration_points(
                seq, [ConcentrationBlock((1,), 2.0, 6.0, 0.5, 0.5)], width_bound=1.0
            )


class TestEquivalenceCertificate:
    """Tests for equivalence_certificate."""

    @pytest.mark.parametrize("metric", ["hellinger", "tv", "w2k"])
    def test_identical_sequences(self, metric):
        """A sequence is equivalent to itself with zero terms."""
        seq = geometric_coin()
        series = equivalence_certificate(seq, seq, metric, 20, kappa=1.0, tail_bound=0.0)
        assert series.total == pytest.approx(0.0, abs=1e-12)
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    @pytest.mark.parametrize("metric", ["hellinger", "tv", "w2k"])
    def test_self_comparison_is_certified(self, metric):
        """Comparing a sequence with itself needs no supplied tail bound."""
        seq = geometric_coin()
        series = equivalence_certificate(seq, seq, metric, 10, kappa=1.0)
        assert series.terms == (0.0,) * 10
        assert series.tail_bound == 0.0
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT
        assert series.note == IDENTICAL_NOTE

    def test_truncated_self_comparison(self):
        """Defects do not turn a self comparison into positive terms."""
        seq = MeasureSequence(lambda n: standard_poisson(1.0 + n, 0.5))
        assert seq[1].defect > 0.0
        series = equivalence_certificate(seq, seq, "tv", 5)
        assert series.total == 0.0
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_equal_but_distinct_sequences(self):
        """Separately built sequences are compared term by term."""
        series = equivalence_certificate(geometric_coin(), geometric_coin(), "hellinger", 10)
        assert series.total == pytest.approx(0.0, abs=1e-12)
        assert series.verdict is Verdict.INCONCLUSIVE

    def test_small_translations(self):
        """Translating μ_n by 2^{−n} costs at most 4^{−n} under W₂,κ(1)."""
        seq = geometric_coin()
        shifted = seq.translated(lambda n: 2.0**-n)
        series = equivalence_certificate(seq, shifted, EquivalenceMetric.W2K, 30, kappa=1.0)
        for n, term in zip(series.indices, series.terms):
            assert term <= 4.0**-n + 1e-9
        assert series.total <= 1.0 / 3.0 + 1e-9

    def test_hellinger_terms(self, fair_coin, biased_coin):
        """Hellinger terms match the pairwise distance."""
        series = equivalence_certificate(
            constant_sequence(fair_coin), constant_sequence(biased_coin), "hellinger", 4
        )
        assert series.terms == pytest.approx([0.034074] * 4, abs=1e-6)

    def test_lp_limit_fallback(self, rng):
        """Supports above the LP limit fall back to the monotone upper bound."""
        mu, nu = random_measure(rng, 6), random_measure(rng, 6)
        series = equivalence_certificate(
            constant_sequence(mu), constant_sequence(nu), "w2k", 2, kappa=0.5, lp_limit=3
        )
        assert series.terms[0] > 0.0

    def test_w2k_needs_kappa(self, fair_coin):
        """The w2k metric needs a positive kappa."""
        seq = constant_sequence(fair_coin)
        with pytest.raises(DomainError):
            equivalence_certificate(seq, seq, "w2k", 5)
