"""Tests for the dense linear algebra primitives."""
from __future__ import annotations

import json
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
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matcore import (  # noqa: E402
    Check,
    CheckReport,
    SpaceDecomposition,
    adjoint,
    as_matrix,
    defect,
    dump_matrix,
    extend_isometry_to_unitary,
    identity,
    load_matrix,
    matrix_from_json,
    matrix_to_json,
    numerical_kernel,
    psd_check,
    span_orthonormalize,
    spectral_norm,
    unitarity_defect,
)
from matcore.errors import (  # noqa: E402
    GramMismatchError,
    NotAContractionError,
    NotHermitianError,
    NotSquareError,
    PreconditionError,
)

NILPOTENT = [[0.0, 0.9], [0.0, 0.0]]


def _random_contraction(rng: np.random.Generator, dim: int) -> np.ndarray:
    matrix = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return matrix * (0.97 / spectral_norm(matrix))


def test_psd_check_reference_matrices():
    verdict = psd_check(as_matrix(np.diag([1.0, 0.75])))
    assert verdict.passed
    assert verdict.min_eigenvalue == pytest.approx(0.75)

    verdict = psd_check(as_matrix([[1.0, 2.0], [2.0, 1.0]]))
    assert not verdict.passed
    assert verdict.min_eigenvalue == pytest.approx(-1.0)

    verdict = psd_check(np.zeros((3, 3), dtype=np.complex128))
    assert verdict.passed
    assert verdict.min_eigenvalue == 0.0


def test_psd_check_rejects_bad_input():
    with pytest.raises(NotSquareError):
        psd_check(np.zeros((2, 3), dtype=np.complex128))
    with pytest.raises(NotHermitianError) as info:
        psd_check(as_matrix([[1.0, 1.0], [0.0, 1.0]]))
    assert info.value.precondition == "hermitian"


def test_psd_check_verdict_scales_with_tolerance():
    matrix = as_matrix([[1.0, 0.0], [0.0, -5e-10]])
    assert psd_check(matrix, 1e-9).passed
    assert psd_check(4.0 * matrix, 4e-9).passed
    assert not psd_check(matrix, 1e-10).passed


def test_defect_reference_values():
    assert defect(as_matrix([[0.5]]))[0, 0].real == pytest.approx(math.sqrt(0.75))
    assert spectral_norm(defect(identity(3))) == pytest.approx(0.0, abs=1e-12)
    expected = np.diag([1.0, math.sqrt(0.19)])
    assert np.allclose(defect(as_matrix(NILPOTENT)), expected, atol=1e-12)


def test_defect_rejects_non_contraction():
    with pytest.raises(NotAContractionError) as info:
        defect(as_matrix([[2.0]]))
    assert info.value.norm == pytest.approx(2.0)
    assert info.value.to_dict()["detail"]["norm"] == pytest.approx(2.0)


@seed(7)
@settings(max_examples=40, deadline=None)
@given(
    real=arrays(np.float64, (3, 3), elements=st.floats(-1.0, 1.0)),
    imag=arrays(np.float64, (3, 3), elements=st.floats(-1.0, 1.0)),
)
def test_defect_squares_to_identity_minus_gram(real, imag):
    matrix = real + 1j * imag
    norm = spectral_norm(matrix)
    if norm > 1.0:
        matrix = matrix / norm
    operator = as_matrix(matrix)
    root = defect(operator)
    assert spectral_norm(root - adjoint(root)) <= 1e-12
    assert spectral_norm(root @ root + adjoint(operator) @ operator - identity(3)) <= 1e-10


def test_numerical_kernel_reference_cases():
    assert numerical_kernel(np.zeros((2, 2), dtype=np.complex128)).shape == (2, 2)
    rotation = as_matrix([[0.0, -1.0], [1.0, 0.0]])
    assert numerical_kernel(rotation - identity(2)).shape == (2, 0)
    kernel = numerical_kernel(as_matrix(np.diag([0.0, 3.0])))
    assert kernel.shape == (2, 1)
    assert abs(kernel[0, 0]) == pytest.approx(1.0)


def test_numerical_kernel_of_orthonormalized_span_is_stable():
    rng = np.random.default_rng(3)
    vectors = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    basis = span_orthonormalize(vectors)
    first = numerical_kernel(identity(5) - basis @ adjoint(basis))
    assert first.shape == (5, 2)
    second = numerical_kernel(identity(5) - first @ adjoint(first))
    assert spectral_norm(first @ adjoint(first) - second @ adjoint(second)) <= 1e-7


def test_span_orthonormalize_reference_cases():
    e1, e2 = np.eye(2, dtype=np.complex128)
    assert span_orthonormalize(np.stack([e1, 2 * e1], axis=1)).shape == (2, 1)
    basis = span_orthonormalize(np.stack([e1, e1 + e2], axis=1))
    assert basis.shape == (2, 2)
    assert spectral_norm(adjoint(basis) @ basis - identity(2)) <= 1e-12
    assert span_orthonormalize(np.zeros((3, 0), dtype=np.complex128)).shape == (3, 0)


def test_span_orthonormalize_keeps_leading_coordinate_columns():
    rng = np.random.default_rng(11)
    extra = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    columns = np.hstack([np.eye(4, 2, dtype=np.complex128), extra])
    basis = span_orthonormalize(columns)
    assert np.array_equal(basis[:, :2], np.eye(4, 2))


def test_extend_isometry_reference_cases():
    e = np.eye(3, dtype=np.complex128)
    unitary = extend_isometry_to_unitary(e[:2, :1], e[:2, 1:2])
    assert spectral_norm(unitary @ e[:2, :1] - e[:2, 1:2]) <= 1e-10
    assert unitarity_defect(unitary) <= 1e-10

    unitary = extend_isometry_to_unitary(e[:2, :1], e[:2, :1])
    assert spectral_norm(unitary @ e[:2, :1] - e[:2, :1]) <= 1e-10

    domain = np.array([[math.sqrt(0.5)], [math.sqrt(0.5)], [0.0]], dtype=np.complex128)
    unitary = extend_isometry_to_unitary(domain, e[:, 2:3])
    assert spectral_norm(unitary @ domain - e[:, 2:3]) <= 1e-10
    assert unitarity_defect(unitary) <= 1e-10


def test_extend_isometry_seeded_completions_agree_on_the_domain():
    rng = np.random.default_rng(5)
    first = np.linalg.qr(rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))[0]
    second = np.linalg.qr(rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))[0]
    plain = extend_isometry_to_unitary(first, second)
    seeded = extend_isometry_to_unitary(first, second, seed=9)
    for unitary in (plain, seeded):
        assert unitarity_defect(unitary) <= 1e-10
        assert spectral_norm(unitary @ first - second) <= 1e-10
    assert spectral_norm(plain - seeded) > 1e-6
    assert np.array_equal(seeded, extend_isometry_to_unitary(first, second, seed=9))


def test_extend_isometry_rejects_gram_mismatch():
    e = np.eye(2, dtype=np.complex128)
    with pytest.raises(GramMismatchError):
        extend_isometry_to_unitary(e[:, :1], 2 * e[:, 1:])


def test_as_matrix_rejects_non_finite_entries():
    with pytest.raises(PreconditionError):
        as_matrix([[float("nan")]])
    assert as_matrix(0.5).shape == (1, 1)


def test_matrix_codec_uses_exact_field_names(tmp_path):
    matrix = as_matrix([[1.0, 2j], [0.5, -1.0]])
    payload = matrix_to_json(matrix)
    assert payload["rows"] == 2 and payload["cols"] == 2
    assert payload["data"][1] == [0.0, 2.0]
    with pytest.raises(PreconditionError):
        matrix_from_json({**payload, "extra": 1})
    with pytest.raises(PreconditionError):
        matrix_from_json({"rows": 1, "cols": 2, "data": [[1.0, 0.0]]})

    path = tmp_path / "m.json"
    dump_matrix(matrix, path)
    assert json.loads(path.read_text())["data"] == payload["data"]
    assert np.array_equal(load_matrix(path), matrix)


def test_space_decomposition_blocks():
    decomposition = SpaceDecomposition(("H", "M", "L1"), (2, 3, 0))
    assert decomposition.total_dim == 5
    assert decomposition.slice("M") == slice(2, 5)
    assert decomposition.indices("L1").size == 0
    assert np.array_equal(decomposition.embedding("H"), np.eye(5, 2))
    with pytest.raises(PreconditionError):
        SpaceDecomposition(("M", "H"), (1, 1))


def test_check_report_verdicts():
    report = CheckReport("sample")
    report.record("small", 1e-12, 1e-9)
    assert report.passed
    report.add(Check.at_most("nan", float("nan"), 1.0))
    assert not report.passed
    assert [check.name for check in report.failures] == ["nan"]
    assert report.residual("small") == pytest.approx(1e-12)
    assert report.to_dict()["subject"] == "sample"
