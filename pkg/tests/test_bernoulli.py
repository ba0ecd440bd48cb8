"""Tests for Bernoulli families and the structure analysis of their shifts."""

import math

import pytest

from conftest import STEP_SLOPE
from flowlab.bernoulli.analysis import (
    BoundedCocycleWitness,
    LinearGrowthWitness,
    StructureCase,
    atom_fixed_point_check,
    cocycle_norm,
    cocycle_norms,
    conservative_core_check,
    dissipativity_certificate,
    hellinger_bridge,
    kakutani_check,
    retained_atoms,
    structure_report,
)
from flowlab.bernoulli.family import (
    bernoulli_family,
    constant_family,
    mixture_family,
    symmetric_indices,
    table_family,
)
from flowlab.errors import DomainError
from flowlab.tail.certificates import Verdict

STEP_H2 = 1.0 - math.sqrt(3.0) / 2.0


class TestBernoulliFamily:
    """Tests for BernoulliFamily and its constructors."""

    def test_symmetric_indices(self):
        """Windows read outward from the origin."""
        assert symmetric_indices(2) == [0, -1, 1, -2, 2]
        with pytest.raises(DomainError):
            symmetric_indices(-1)

    def test_step_masses(self, step_fam):
        """The step family switches from Bern(1/4) to Bern(3/4) at 0."""
        assert list(step_fam.masses(-3)) == [0.75, 0.25]
        assert list(step_fam.masses(0)) == [0.25, 0.75]
        assert step_fam.mass_of(5, ["1"]) == 0.75

    def test_expression_parameter(self):
        """Parameters may be expressions in n."""
        fam = bernoulli_family("1/(Abs(n) + 2)")
        assert fam.masses(0)[1] == pytest.approx(0.5)
        assert fam.masses(-2)[1] == pytest.approx(0.25)

    def test_constant_parameter(self):
        """A plain number gives a constant family."""
        assert bernoulli_family(0.3).masses(17)[1] == pytest.approx(0.3)

    def test_rows_must_sum_to_one(self):
        """Rows not summing to 1 raise DomainError on access."""
        fam = constant_family(["a", "b"], [0.5, 0.6])
        with pytest.raises(DomainError):
            fam[0]

    def test_parameter_range(self):
        """Bernoulli parameters outside [0, 1] raise DomainError."""
        with pytest.raises(DomainError):
            bernoulli_family(1.5)[0]

    def test_labels(self):
        """Labels must be distinct and lookups must name known atoms."""
        with pytest.raises(DomainError):
            constant_family(["a", "a"], [0.5, 0.5])
        with pytest.raises(DomainError):
            constant_family(["a", "b"], [0.5, 0.5]).label_index("c")

    def test_mixture(self, step_fam):
        """An equal mixture averages the rows."""
        fam = mixture_family([step_fam, constant_family(["0", "1"], [1.0, 0.0])], ["1/2", "1/2"])
        assert list(fam.masses(1)) == pytest.approx([0.625, 0.375])

    def test_mixture_needs_shared_labels(self, step_fam):
        """Components on different bases cannot be mixed."""
        with pytest.raises(DomainError):
            mixture_family([step_fam, constant_family(["a", "b"], [0.5, 0.5])], [0.5, 0.5])

    def test_table_default(self, tabulated_fam):
        """Indices without a row fall back to the default."""
        assert list(tabulated_fam.masses(1)) == [0.25, 0.75]
        assert list(tabulated_fam.masses(-9)) == [0.5, 0.5]

    def test_table_without_default(self):
        """A missing row without a default raises DomainError."""
        fam = table_family(["a", "b"], {0: [0.5, 0.5]})
        with pytest.raises(DomainError):
            fam[1]

    def test_singular_atoms(self):
        """Atoms charged elsewhere but not at n are flagged."""
        fam = table_family(["a", "b"], {0: [1.0, 0.0]}, default=[0.5, 0.5])
        assert fam.singular_atoms(1) == [(0, "b")]

    def test_to_table(self, tabulated_fam):
        """Tabulation records labels, rows and the default."""
        table = tabulated_fam.to_table([0, 1], default=5)
        assert table["labels"] == ["a", "b"]
        assert table["rows"]["1"] == [0.25, 0.75]
        assert table["default"] == [0.5, 0.5]


class TestKakutaniAndCocycles:
    """Tests for kakutani_check and the cocycle norms."""

    def test_step_shift(self, step_fam):
        """Shifting the step family by 1 meets the jump once."""
        series = kakutani_check(step_fam, 1, 20, tail_bound=0.0)
        assert series.total == pytest.approx(STEP_H2)
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_zero_shift(self, step_fam):
        """The trivial shift is rejected."""
        with pytest.raises(DomainError):
            kakutani_check(step_fam, 0, 5)

    def test_cocycle_norm(self, step_fam):
        """‖c_3‖² = 6H² for the step family."""
        assert cocycle_norm(step_fam, 3, 20).total == pytest.approx(0.803848, abs=1e-6)

    def test_negative_shift_window(self, step_fam):
        """The −k series holds the +k summands shifted by k, so narrow windows differ."""
        assert cocycle_norm(step_fam, 3, 1).total == pytest.approx(2.0 * STEP_H2)
        assert cocycle_norm(step_fam, -3, 1).total == pytest.approx(4.0 * STEP_H2)
        assert cocycle_norm(step_fam, -3, 20).total == pytest.approx(6.0 * STEP_H2)

        plus = cocycle_norm(step_fam, 3, 5)
        minus = cocycle_norm(step_fam, -3, 5)
        by_index = dict(zip(plus.indices, plus.terms))
        for m, term in zip(minus.indices, minus.terms):
            if m - 3 in by_index:
                assert term == pytest.approx(by_index[m - 3], abs=1e-15)

    def test_norms_symmetric(self, step_fam):
        """‖c_k‖² = ‖c_{−k}‖² and ‖c_0‖² = 0."""
        norms = cocycle_norms(step_fam, 4, 20)
        assert norms[0] == 0.0
        assert norms[-4] == norms[4] == pytest.approx(4.0 * STEP_SLOPE)


class TestDissipativity:
    """Tests for dissipativity_certificate and its witnesses."""

    def test_linear_growth(self, step_fam):
        """Terms exp(−|k|H²) sum to about 14.9502 and the witness certifies it."""
        series = dissipativity_certificate(
            step_fam, 200, 200, witness=LinearGrowthWitness(STEP_SLOPE, 0.0)
        )
        assert series.total == pytest.approx(14.9502, abs=1e-4)
        assert series.tail_bound < 1e-9
        assert series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_witness_checked(self, step_fam):
        """A too steep growth witness is rejected."""
        with pytest.raises(DomainError):
            dissipativity_certificate(step_fam, 5, 10, witness=LinearGrowthWitness(2 * STEP_SLOPE))

    def test_bounded_cocycle(self):
        """A constant family has zero cocycles and diverges."""
        fam = constant_family(["0", "1"], [0.5, 0.5])
        series = dissipativity_certificate(fam, 5, 5, witness=BoundedCocycleWitness(0.0))
        assert series.verdict is Verdict.CERTIFIED_DIVERGENT
        assert series.total == pytest.approx(11.0)

    def test_bounded_witness_checked(self, step_fam):
        """A bound below the windowed norms is rejected."""
        with pytest.raises(DomainError):
            dissipativity_certificate(step_fam, 5, 10, witness=BoundedCocycleWitness(0.1))

    def test_no_witness(self, step_fam):
        """Without a witness the verdict stays inconclusive."""
        series = dissipativity_certificate(step_fam, 10, 10)
        assert series.verdict is Verdict.INCONCLUSIVE
        assert series.note.startswith("heuristic")

    def test_unknown_witness(self, step_fam):
        """Only the two witness kinds are accepted."""
        with pytest.raises(DomainError):
            dissipativity_certificate(step_fam, 3, 3, witness="linear")

    def test_witness_parameters(self):
        """Witnesses validate their parameters."""
        with pytest.raises(DomainError):
            LinearGrowthWitness(0.0)
        with pytest.raises(DomainError):
            BoundedCocycleWitness(math.inf)


class TestHellingerBridge:
    """Tests for hellinger_bridge."""

    def test_symmetric_family(self, epsilon_fam):
        """μ_{−n} = μ_n gives zero-distance bridges."""
        bridge = hellinger_bridge(epsilon_fam, 5, 10)
        assert bridge.found
        assert bridge.pairs[0] == (-1, 1, 0.0)
        assert bridge.floor == 0.0

    def test_step_family(self, step_fam):
        """The two ends of the step family stay apart."""
        bridge = hellinger_bridge(step_fam, 3, 6)
        assert not bridge.found
        assert bridge.floor == pytest.approx(math.sqrt(STEP_H2))

    def test_depth(self, step_fam):
        """depth must lie in [1, horizon]."""
        with pytest.raises(DomainError):
            hellinger_bridge(step_fam, 7, 6)


class TestAtomsAndCores:
    """Tests for atom_fixed_point_check, conservative_core_check and retained_atoms."""

    def test_window_atom(self, atomic_fam):
        """A stabilized window sum finds the atom without certifying it."""
        atom = atom_fixed_point_check(atomic_fam, 80)
        assert atom.label == "0"
        assert not atom.certified
        assert atom.series.total == pytest.approx(0.75, abs=1e-9)

    def test_certified_atom(self, atomic_fam):
        """A tail bound for the named atom certifies it."""
        atom = atom_fixed_point_check(atomic_fam, 20, tail_bound=2.0**-20, atom="0")
        assert atom.certified
        assert atom.series.verdict is Verdict.CERTIFIED_CONVERGENT

    def test_tail_bound_needs_atom(self, atomic_fam):
        """A tail bound without its atom is rejected."""
        with pytest.raises(DomainError):
            atom_fixed_point_check(atomic_fam, 20, tail_bound=0.1)

    def test_no_atom(self, step_fam):
        """The step family has no fixed atom."""
        assert atom_fixed_point_check(step_fam, 40) is None

    def test_core(self, core_fam):
        """Outside {0, 1} the masses sum to about 1.5."""
        series = conservative_core_check(core_fam, ["0", "1"], 80)
        assert series.total == pytest.approx(1.5, abs=1e-9)
        assert series.stabilized()

    def test_empty_core(self, core_fam):
        """The core must be nonempty."""
        with pytest.raises(DomainError):
            conservative_core_check(core_fam, [], 10)

    def test_retained(self, core_fam):
        """Atoms with growing window mass are retained."""
        assert retained_atoms(core_fam, 80) == ["0", "1"]


class TestStructureReport:
    """Tests for structure_report."""

    def test_atomic(self, atomic_fam):
        """A fixed atom is reported first."""
        report = structure_report(atomic_fam, 80, k_range=5)
        assert report.case is StructureCase.ATOMIC_FIXED_POINT
        assert report.atom == "0"
        assert report.evidence == "window"

    def test_dissipative(self, step_fam):
        """A linear growth witness gives a certified dissipative case."""
        report = structure_report(step_fam, 30, witness=LinearGrowthWitness(STEP_SLOPE))
        assert report.case is StructureCase.DISSIPATIVE
        assert report.evidence == "certified"

    def test_conservative_core(self, core_fam):
        """The greedy core is {0, 1}."""
        report = structure_report(core_fam, 80, k_range=10)
        assert report.case is StructureCase.CONSERVATIVE_CORE
        assert report.core == ("0", "1")
        assert report.evidence == "window"
        assert report.to_json()["core"] == ["0", "1"]

    def test_certified_core(self, core_fam):
        """A core tail bound certifies the core."""
        report = structure_report(core_fam, 40, k_range=5, core_tail_bound=2.0**-40)
        assert report.evidence == "certified"
