"""Tests for cogenerators and the semigroup functional calculus."""
from __future__ import annotations

import math
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
import scipy.linalg

from cogen import (  # noqa: E402
    Cogenerator,
    GeneratorPair,
    cogenerator_commutation_check,
    cogenerator_from_generator,
    cogenerator_limit_check,
    e_s_apply,
    e_sr_apply,
    eigenvalue_one_check,
    phi_s_apply,
    radial_limit_check,
)
from matcore import adjoint, as_matrix, identity, spectral_norm  # noqa: E402
from matcore.errors import (  # noqa: E402
    EigenvalueOneError,
    NotCommutingError,
    NotDissipativeError,
    PreconditionError,
)


def _dissipative(rng: np.random.Generator, dim: int) -> np.ndarray:
    gaussian = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2 * dim)
    skew = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2 * dim)
    return 0.5 * (-(gaussian @ adjoint(gaussian) + 0.1 * identity(dim)) + (skew - adjoint(skew)) / 2)


def test_scalar_limit_errors_match_hand_evaluation():
    report = cogenerator_limit_check(as_matrix([[-1.0]]))
    assert report.passed
    errors = report.data["errors"]
    for value, expected in zip(errors, (0.0248, 0.0025, 0.00025)):
        assert value == pytest.approx(expected, rel=0.1)


def test_scalar_cogenerators():
    assert spectral_norm(cogenerator_from_generator(as_matrix([[-1.0]])).T) == pytest.approx(0.0, abs=1e-15)
    assert cogenerator_from_generator(as_matrix([[-2.0]])).T[0, 0].real == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("trial", range(30))
def test_cayley_round_trip_and_semigroup_reconstruction(trial):
    rng = np.random.default_rng(100 + trial)
    generator = _dissipative(rng, 1 + trial % 5)
    cogenerator = cogenerator_from_generator(generator)
    scale = 1.0 + spectral_norm(generator)
    assert cogenerator.provenance == "generator"
    assert spectral_norm(cogenerator.to_generator() - generator) <= 1e-10 * scale**2
    for s in (0.25, 1.0, 4.0):
        target = scipy.linalg.expm(s * generator)
        assert spectral_norm(e_s_apply(cogenerator, s) - target) <= 1e-10 * scale**2
    assert cogenerator_limit_check(generator).passed


def test_e_s_at_zero_is_identity():
    cogenerator = cogenerator_from_generator(as_matrix([[-1.0, 0.0], [0.0, -3.0]]))
    assert np.array_equal(e_s_apply(cogenerator, 0.0), identity(2))
    assert np.array_equal(e_sr_apply(cogenerator.T, 0.0, 0.5), identity(2))


def test_eigenvalue_one_is_rejected():
    gap = eigenvalue_one_check(identity(2))
    assert not gap.passed
    assert gap.distance == pytest.approx(0.0, abs=1e-12)
    assert eigenvalue_one_check(np.zeros((0, 0), dtype=np.complex128)).distance == math.inf
    with pytest.raises(EigenvalueOneError):
        Cogenerator(identity(2))
    with pytest.raises(EigenvalueOneError):
        e_s_apply(as_matrix([[1.0]]), 1.0)


def test_generator_must_be_dissipative():
    with pytest.raises(NotDissipativeError):
        cogenerator_from_generator(as_matrix([[1.0]]))


def test_generator_pair_requires_commuting_generators():
    with pytest.raises(NotCommutingError):
        GeneratorPair(as_matrix([[-1.0, 1.0], [0.0, -1.0]]), as_matrix([[-1.0, 0.0], [1.0, -1.0]]))
    pair = GeneratorPair(as_matrix([[-1.0]]), as_matrix([[-2.0]]))
    first, second = pair.semigroups(0.5, 0.5)
    assert first[0, 0].real == pytest.approx(math.exp(-0.5))
    assert second[0, 0].real == pytest.approx(math.exp(-1.0))


def test_phi_s_needs_positive_parameter():
    with pytest.raises(PreconditionError):
        phi_s_apply(identity(1), 0.0)


def test_commuting_generators_give_commuting_cogenerators():
    rng = np.random.default_rng(4)
    basis = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    first = basis @ np.diag([-1.0 + 1j, -0.5, -2.0]) @ adjoint(basis)
    second = basis @ np.diag([-0.3, -1.0 - 2j, -0.7]) @ adjoint(basis)
    report = cogenerator_commutation_check(first, second)
    assert report.passed
    assert len(report.checks) == 4


def test_radial_limit_approaches_semigroup_value():
    report = radial_limit_check(as_matrix([[1.0 / 3.0]]), 1.0)
    assert report.passed
    assert report.data["errors"][-1] < report.data["errors"][0]
    assert max(report.data["norms"]) <= 1.0 + 1e-9
