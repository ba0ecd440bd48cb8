"""Tests for Følner data and the Poisson suspension generator."""

import math

import pytest

from flowlab.errors import CapacityError, DomainError, SelectionError
from flowlab.metrics.distances import poisson_hellinger_sq
from flowlab.suspension.folner import FolnerKind, FolnerSpec
from flowlab.suspension.generator import (
    GrowthVerdict,
    IntensitySpec,
    associated_flow_spec,
    check_selection,
    conservativity_growth,
    drift_weight,
    emit_bernoulli,
    kappa_eval,
    level_kappa_bounds,
    probe_window,
    subsequence_select,
)
from flowlab.tail.analysis import eigenvalue_certificate
from flowlab.tail.certificates import Verdict

LN2 = math.log(2.0)
POWERS = FolnerSpec.intervals(2**k for k in range(1, 41))


def one_level(size, lam=1.0, a=LN2):
    return IntensitySpec((lam,), (a,), FolnerSpec.intervals([size]))


class TestFolnerSpec:
    """Tests for FolnerSpec."""

    def test_sizes_increase(self):
        """Sizes must be positive and strictly increasing."""
        with pytest.raises(DomainError):
            FolnerSpec.intervals([2, 2])
        with pytest.raises(DomainError):
            FolnerSpec.intervals([0, 3])

    def test_interval_sym_diff(self):
        """|(g + [0, L)) △ [0, L)| = 2 min(|g|, L)."""
        spec = FolnerSpec.intervals([10])
        assert spec.sym_diff(3, 0) == 6
        assert spec.sym_diff(-20, 0) == 20
        assert spec.contains(9, 0) and not spec.contains(10, 0)

    def test_explicit_square(self):
        """Shifting a 2×2 square by one unit moves half of it."""
        spec = FolnerSpec.explicit([[(0, 0), (0, 1), (1, 0), (1, 1)]])
        assert spec.kind is FolnerKind.EXPLICIT
        assert spec.dimension == 2
        assert spec.sym_diff((1, 0), 0) == 4

    def test_explicit_dimensions(self):
        """Mixed dimensions are rejected."""
        with pytest.raises(DomainError):
            FolnerSpec.explicit([[(0, 0)], [(0,), (1,)]])

    def test_dict(self):
        """Specs round-trip through their TOML tables."""
        spec = FolnerSpec.explicit([[0], [0, 1]])
        assert FolnerSpec.from_dict(spec.to_dict()) == spec
        assert FolnerSpec.from_dict({"sizes": [1, 4]}).sizes == (1, 4)
        with pytest.raises(DomainError):
            FolnerSpec.from_dict({"kind": "balls"})

    def test_subsequence(self):
        """Subsequences keep the chosen levels."""
        assert POWERS.subsequence([0, 2]).sizes == (2, 8)


class TestIntensitySpec:
    """Tests for IntensitySpec and κ."""

    def test_drift_weight(self):
        """w(ln 2) = 1.5 and w stays nonnegative for negative drifts."""
        assert drift_weight(LN2) == pytest.approx(1.5)
        assert drift_weight(-LN2) == pytest.approx(0.75)
        assert drift_weight(0.0) == 0.0

    def test_gamma0(self):
        """γ_0 is λe^a/|A| on A and λ/|A| off it."""
        spec = one_level(4)
        assert spec.gamma0(0, 0) == pytest.approx(0.5)
        assert spec.gamma0(4, 0) == pytest.approx(0.25)

    def test_validation(self):
        """Lengths, Følner depth and intensities are checked."""
        with pytest.raises(DomainError):
            IntensitySpec((1.0, 1.0), (LN2,), POWERS)
        with pytest.raises(DomainError):
            IntensitySpec((1.0, 1.0), (LN2, LN2), FolnerSpec.intervals([4]))
        with pytest.raises(DomainError):
            IntensitySpec((0.0,), (LN2,), POWERS)

    def test_kappa(self):
        """κ(g) = ½ w λ |gA △ A| / |A|."""
        spec = one_level(4)
        assert kappa_eval(spec, 1) == pytest.approx(0.375)
        assert kappa_eval(spec, 10) == pytest.approx(1.5)
        assert kappa_eval(spec, 0) == 0.0

    def test_level_bounds(self):
        """K_m dominates κ on |g| ≤ L_m."""
        spec = IntensitySpec((1.0, 1.0, 1.0), (LN2, LN2, LN2), FolnerSpec.intervals([4, 16, 64]))
        bounds = level_kappa_bounds(spec)
        for m, size in enumerate(spec.folner.sizes):
            for g in range(-size, size + 1):
                assert kappa_eval(spec, g) <= bounds[m] + 1e-12


class TestConservativityGrowth:
    """Tests for conservativity_growth."""

    def test_bounded_kappa(self):
        """A κ bound certifies the pass."""
        report = conservativity_growth(one_level(4), [1.0, 2.0], probe_window(10), kappa_bound=1.5)
        assert report.verdict is GrowthVerdict.CERTIFIED_PASS
        assert report.rows[-1][1] == 21

    def test_bound_checked(self):
        """A κ bound below the probe values is rejected."""
        with pytest.raises(DomainError):
            conservativity_growth(one_level(4), [1.0], probe_window(10), kappa_bound=0.1)

    def test_level_bound(self):
        """A single level of size 2^20 has log(2L + 1)/K above 3."""
        report = conservativity_growth(one_level(2**20), [1.0], probe_window(5))
        assert report.verdict is GrowthVerdict.CERTIFIED_PASS
        assert report.level_ratios[0] == pytest.approx(math.log(2**21 + 1) / 1.5)

    def test_fail(self):
        """A small set fails the growth condition."""
        report = conservativity_growth(one_level(2), [1.0, 2.0], probe_window(3))
        assert report.verdict is GrowthVerdict.FAIL
        assert report.rows[0] == (1.0, 3, pytest.approx(math.log(3.0)))
        assert report.rows[1][1] == 7

    def test_empirical(self):
        """Explicit data with tiny κ passes on the probe window only."""
        spec = IntensitySpec((0.01,), (LN2,), FolnerSpec.explicit([[0, 1, 2, 3]]))
        report = conservativity_growth(spec, [1.0], probe_window(50))
        assert report.verdict is GrowthVerdict.EMPIRICAL_PASS
        assert report.level_ratios == ()

    def test_grid(self):
        """The s grid must be positive."""
        with pytest.raises(DomainError):
            conservativity_growth(one_level(4), [0.0, 1.0], probe_window(2))

    def test_json(self):
        """Reports serialize their rows."""
        payload = conservativity_growth(one_level(2), [1.0], probe_window(1)).to_json()
        assert payload["rows"][0]["count"] == 3
        assert payload["verdict"] == "fail"


class TestSubsequenceSelect:
    """Tests for subsequence_select and check_selection."""

    def test_powers_of_two(self):
        """Three levels with λ = 1, a = ln 2 pick 2^10, 2^16 and 2^23."""
        result = subsequence_select([1.0] * 3, [LN2] * 3, POWERS)
        assert result.indices == (9, 15, 22)
        assert result.folner.sizes == (2**10, 2**16, 2**23)
        assert result.constraints[0]["binding"] == "growth_min"
        assert check_selection([1.0] * 3, [LN2] * 3, result.folner) == []

    def test_runs_out(self):
        """Too few Følner sets raise SelectionError."""
        short = FolnerSpec.intervals(2**k for k in range(1, 13))
        with pytest.raises(SelectionError):
            subsequence_select([1.0] * 3, [LN2] * 3, short)

    def test_violations_listed(self):
        """check_selection names violated constraints."""
        problems = check_selection([1.0], [LN2], FolnerSpec.intervals([8]))
        assert any("growth_min" in p for p in problems)

    def test_json(self):
        """Selections serialize their Følner data."""
        payload = subsequence_select([1.0], [LN2], POWERS).to_json()
        assert payload["folner"] == {"kind": "interval", "sizes": [1024]}
        assert payload["indices"] == [9]


class TestEmitBernoulli:
    """Tests for emit_bernoulli and the Kakutani closed forms."""

    def test_marginals(self):
        """Marginals are Poisson laws of γ_0(g)."""
        emitted = emit_bernoulli(one_level(1024))
        inside, outside = emitted.family[0], emitted.family[2000]
        assert inside.mass_at(0.0) == pytest.approx(math.exp(-2.0 / 1024))
        assert outside.mass_at(0.0) == pytest.approx(math.exp(-1.0 / 1024))
        assert emitted.family.labels[0] == "(0)"

    def test_kakutani_closed_form(self):
        """Shifting by 1 meets the two ends of the interval."""
        emitted = emit_bernoulli(one_level(1024))
        series = emitted.kakutani_certificate(1, 1100)
        expected = 2.0 * poisson_hellinger_sq(2.0 / 1024, 1.0 / 1024)
        assert series.total == pytest.approx(expected, abs=1e-8)
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT
        _, remainder = emitted.kakutani_closed_form(1, 1100)
        assert remainder == 0.0

    def test_kakutani_remainder(self):
        """A short window leaves the far end to the tail bound."""
        emitted = emit_bernoulli(one_level(1024))
        window, remainder = emitted.kakutani_closed_form(1, 10)
        assert window == pytest.approx(remainder)
        assert emitted.kakutani_certificate(1, 10).tail_bound >= remainder

    def test_defect_budget(self):
        """Levels cut away by the horizon count against the defect budget."""
        spec = IntensitySpec((1.0, 1.0), (LN2, LN2), FolnerSpec.intervals([1024, 2048]))
        emitted = emit_bernoulli(spec, level_horizon=1)
        with pytest.raises(CapacityError):
            emitted.family[0]

    def test_integers_only(self):
        """Two-dimensional Følner data cannot be emitted."""
        spec = IntensitySpec((1.0,), (LN2,), FolnerSpec.explicit([[(0, 0), (0, 1)]]))
        with pytest.raises(DomainError):
            emit_bernoulli(spec)


class TestAssociatedFlow:
    """Tests for associated_flow_spec."""

    def test_eigenvalue(self):
        """𝓔(δ_{ln 2}) has eigenvalue 2π/ln 2 with zero tail."""
        spec = associated_flow_spec([1.0], [LN2])
        assert spec.entries == ((1.0, LN2),)
        series = eigenvalue_certificate(spec.laws(), 2.0 * math.pi / LN2, 10, tail_bound=0.0)
        assert max(series.terms) < 1e-9
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_zero_drift(self):
        """a_n = 0 has no flow counterpart."""
        with pytest.raises(DomainError):
            associated_flow_spec([1.0], [0.0])
