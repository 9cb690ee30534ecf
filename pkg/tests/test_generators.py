"""Tests for the seeded random instance generators."""
from __future__ import annotations

import os
import sys

ROOT = os.path.dirname(os.path.dirname(__file__))
SRC_PATH = os.path.join(ROOT, "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import numpy as np
import pytest

from cli.generators import (  # noqa: E402
    MARGIN,
    gen_commuting_pair,
    gen_commuting_unitaries,
    gen_doubly_commuting,
    gen_family,
    gen_generator_pair,
    random_contraction,
    random_unitary,
)
from matcore import adjoint, commutator_norm, identity, spectral_norm, unitarity_defect  # noqa: E402


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_random_contraction_has_the_requested_norm(dim):
    matrix = random_contraction(dim, 0)
    assert spectral_norm(matrix) == pytest.approx(1.0 - MARGIN)
    assert np.array_equal(matrix, random_contraction(dim, 0))


@pytest.mark.parametrize("dim", [1, 3])
def test_random_unitary(dim):
    assert unitarity_defect(random_unitary(dim, 7)) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_commuting_pairs_commute(seed):
    first, second = gen_commuting_pair(3, seed)
    assert commutator_norm(first, second) <= 1e-12
    assert spectral_norm(first) == pytest.approx(1.0 - MARGIN)
    assert spectral_norm(second) == pytest.approx(1.0 - MARGIN)


def test_doubly_commuting_pairs():
    first, second = gen_doubly_commuting(2, 3, 1)
    assert first.shape == (6, 6)
    assert spectral_norm(second @ adjoint(first) - adjoint(first) @ second) <= 1e-12
    unitary_first, _ = gen_doubly_commuting(2, 2, 1, unitary_a=True)
    assert unitarity_defect(unitary_first) <= 1e-12


def test_commuting_unitaries():
    first, second = gen_commuting_unitaries(4, 3)
    assert max(unitarity_defect(first), unitarity_defect(second)) <= 1e-12
    assert commutator_norm(first, second) <= 1e-12


def test_generator_pairs_are_dissipative_and_commuting():
    pair = gen_generator_pair(3, 5)
    for generator in (pair.A1, pair.A2):
        hermitian = generator + adjoint(generator)
        assert np.max(np.linalg.eigvalsh(hermitian)) <= -0.2 + 1e-12
    assert commutator_norm(pair.A1, pair.A2) <= 1e-12


@pytest.mark.parametrize("kind", ["commuting", "doubly_commuting", "unitary"])
def test_gen_family_kinds(kind):
    family = gen_family(kind, 4, 11)
    assert family.dim == 4
    assert family.omega_size == 2
    assert len(family.operators) == 2


def test_gen_family_splits_prime_dimensions():
    family = gen_family("doubly_commuting", 3, 0)
    first, _ = family.operators
    # A 1 x 3 split puts a scalar on the first factor.
    assert spectral_norm(first - first[0, 0] * identity(3)) <= 1e-15


def test_gen_family_rejects_unknown_kind():
    with pytest.raises(ValueError):
        gen_family("nilpotent", 2, 0)
