"""Shared fixtures for the Flowlab test suite."""

import math
from pathlib import Path

import numpy as np
import pytest

from flowlab.bernoulli.family import (
    bernoulli_family,
    expression_family,
    step_family,
    table_family,
)
from flowlab.measures.discrete import DiscreteMeasure


@pytest.fixture
def fair_coin():
    """{0: 1/2, 1: 1/2}."""
    return DiscreteMeasure.from_dict({0.0: 0.5, 1.0: 0.5})


@pytest.fixture
def biased_coin():
    """{0: 1/4, 1: 3/4}."""
    return DiscreteMeasure.from_dict({0.0: 0.25, 1.0: 0.75})


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_measure(rng, atoms=5, low=-3.0, high=3.0, grid=None):
    """A random probability measure; ``grid`` snaps positions to multiples of it."""
    positions = rng.uniform(low, high, size=atoms)
    if grid is not None:
        positions = np.round(positions / grid) * grid
    masses = rng.uniform(0.05, 1.0, size=atoms)
    return DiscreteMeasure(positions, masses / masses.sum())


@pytest.fixture
def write_file(tmp_path):
    """Write text into tmp_path and return the path."""

    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture
def step_fam():
    """Bern(1/4) before the origin, Bern(3/4) from the origin on."""
    return step_family(0.25, 0.75)


# ‖c_k‖² ≥ STEP_SLOPE·|k| for the step family (twice its one jump in H²).
STEP_SLOPE = 2.0 * (1.0 - math.sqrt(3.0) / 2.0)


@pytest.fixture
def epsilon_fam():
    """Bern(1/2 + 1/(4|n|)) for n != 0, Bern(1/2) at 0."""

    def p(n: int) -> float:
        return 0.5 if n == 0 else 0.5 + 1.0 / (4.0 * abs(n))

    return bernoulli_family(p)


@pytest.fixture
def atomic_fam():
    """μ_n(0) = 1 − 2^{−|n|−2}: the atom 0 has summable complements (sum 0.75)."""
    return expression_family(["0", "1"], ["1 - 2^(-Abs(n)-2)", "2^(-Abs(n)-2)"])


@pytest.fixture
def core_fam():
    """Three atoms; atom 2 carries 2^{−|n|−1}, so {0, 1} is a conservative core."""
    return expression_family(
        ["0", "1", "2"],
        ["(1 - 2^(-Abs(n)-1))/2", "(1 - 2^(-Abs(n)-1))/2", "2^(-Abs(n)-1)"],
    )


@pytest.fixture
def tabulated_fam():
    return table_family(["a", "b"], {0: [0.5, 0.5], 1: [0.25, 0.75]}, default=[0.5, 0.5])
