"""Tests for semigroup families, the Brehmer condition and regular dilations."""
from __future__ import annotations

import json
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

from cli.generators import gen_commuting_pair, gen_family, random_contraction  # noqa: E402
from index import IndexElement, SubsetMask, group_box  # noqa: E402
from matcore import as_matrix, identity, spectral_norm  # noqa: E402
from matcore.errors import LatticeError, NotIsometricError, PreconditionError  # noqa: E402
from regular import (  # noqa: E402
    MAX_SUBSET,
    SemigroupFamily,
    brehmer_check,
    brehmer_scan,
    brehmer_sum,
    coisometric_dilation,
    doubly_commuting_check,
    doubly_commuting_dilation_check,
    extension_check,
    isometric_from_unitary,
    kernel_gram,
    naimark_truncated,
    regular_identity_report,
    semigroup_law_check,
    t_hat,
    unitary_from_isometric,
)

NILPOTENT = as_matrix([[0.0, 0.9], [0.0, 0.0]])


@pytest.fixture
def nilpotent_family() -> SemigroupFamily:
    return SemigroupFamily.from_operators([NILPOTENT, NILPOTENT])


@pytest.fixture
def zero_family() -> SemigroupFamily:
    return SemigroupFamily.from_operators([as_matrix([[0.0]]), as_matrix([[0.0]])])


def test_brehmer_fails_for_the_nilpotent_pair(nilpotent_family):
    s = IndexElement.of(1, 1)
    report = brehmer_check(nilpotent_family, s, SubsetMask(2, (0, 1)))
    assert not report.passed
    assert report.data["min_eigenvalue"] == pytest.approx(-0.62, abs=1e-9)
    total = brehmer_sum(nilpotent_family, s, SubsetMask(2, (0, 1)))
    assert np.allclose(total, np.diag([1.0, -0.62]), atol=1e-12)


def test_brehmer_passes_for_a_single_contraction():
    family = SemigroupFamily.from_operators([random_contraction(3, 1)])
    scan = brehmer_scan(family, group_box(family.generators, 3))
    assert scan.passed
    assert len(scan.data["tested"]) == 3


def test_brehmer_sum_guards_subset_size(nilpotent_family):
    big = SubsetMask(MAX_SUBSET + 1, tuple(range(MAX_SUBSET + 1)))
    with pytest.raises(PreconditionError):
        brehmer_sum(nilpotent_family, IndexElement.zero(MAX_SUBSET + 1), big)
    with pytest.raises(LatticeError):
        brehmer_sum(nilpotent_family, IndexElement.of(-1, 1), SubsetMask(2, (0,)))


def test_kernel_fails_on_unit_box_for_the_nilpotent_pair(nilpotent_family):
    gram, verdict = kernel_gram(nilpotent_family, group_box(nilpotent_family.generators, 1))
    assert gram.shape == (8, 8)
    assert not verdict.passed
    with pytest.raises(PreconditionError) as info:
        naimark_truncated(nilpotent_family, group_box(nilpotent_family.generators, 1))
    assert info.value.precondition == "positive definite kernel"


def test_doubly_commuting_check(nilpotent_family):
    assert not doubly_commuting_check(nilpotent_family).passed
    for seed in range(5):
        assert doubly_commuting_check(gen_family("doubly_commuting", 4, seed)).passed


@pytest.mark.parametrize("seed", range(20))
def test_brehmer_scan_agrees_with_unit_box_kernel(seed):
    family = gen_family("commuting", 2, seed)
    box = group_box(family.generators, 1)
    scan = brehmer_scan(family, box)
    _, verdict = kernel_gram(family, box)
    assert scan.passed == verdict.passed


def test_zero_pair_on_unit_box_has_four_dimensional_gns_space(zero_family):
    bundle = naimark_truncated(zero_family, group_box(zero_family.generators, 1))
    assert np.allclose(bundle.gram, np.eye(4), atol=1e-15)
    assert bundle.dim == 4
    assert bundle.untestable == ()
    assert bundle.residuals["regular_identity"] <= 1e-12


def test_untestable_indices_need_an_in_box_path(zero_family):
    box = [IndexElement.zero(2), IndexElement.of(1, 1)]
    bundle = naimark_truncated(zero_family, box)
    assert IndexElement.of(1, 1) in bundle.untestable
    assert IndexElement.of(-1, -1) in bundle.untestable
    assert bundle.representable == (IndexElement.zero(2),)


@pytest.mark.parametrize("seed", range(5))
def test_doubly_commuting_families_dilate_regularly(seed):
    family = gen_family("doubly_commuting", 4, seed)
    box = group_box(family.generators, 2)
    assert brehmer_scan(family, box).passed

    bundle = naimark_truncated(family, box, seed=seed)
    assert regular_identity_report(bundle).passed
    law = semigroup_law_check(bundle)
    assert law.passed and law.data["tested"] > 0

    other = naimark_truncated(family, box, seed=seed + 1)
    for g in bundle.representable:
        assert spectral_norm(bundle.dilation_value(g) - other.dilation_value(g)) <= 1e-10

    restricted = isometric_from_unitary(bundle)
    assert restricted.kind == "isometric"
    assert restricted.residuals["isometry"] <= 1e-9
    assert restricted.residuals["regular_identity"] <= 1e-9


def test_dilation_values_match_t_hat():
    family = gen_family("doubly_commuting", 4, 9)
    bundle = naimark_truncated(family, group_box(family.generators, 1), seed=3)
    g = IndexElement.of(1, -1)
    assert g in bundle.representable
    assert spectral_norm(bundle.dilation_value(g) - t_hat(family, g)) <= 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_unitary_families_extend_and_dilate_coisometrically(seed):
    family = gen_family("unitary", 3, seed)
    box = group_box(family.generators, 1)
    bundle = naimark_truncated(family, box, seed=seed)
    assert extension_check(bundle).passed

    dilated, report = coisometric_dilation(family, box, seed=seed)
    assert report.passed
    assert dilated.kind == "coisometric"
    assert report.residual("coisometric_identity") <= 1e-10
    assert report.data["span_dim"] == report.data["gns_dim"] == 3
    first = IndexElement.of(1, 0)
    assert spectral_norm(dilated.J0.conj().T @ dilated.dilation(first) @ dilated.J0 - family.operators[0]) <= 1e-9


def test_non_isometric_families_are_rejected():
    family = SemigroupFamily.from_operators([0.5 * identity(2), 0.5 * identity(2)])
    box = group_box(family.generators, 1)
    with pytest.raises(NotIsometricError):
        extension_check(naimark_truncated(family, box))
    with pytest.raises(NotIsometricError):
        coisometric_dilation(family, box)


def test_family_with_rational_bases():
    t1, t2 = as_matrix([[0.5]]), as_matrix([[0.25]])
    family = SemigroupFamily.from_operators([t1, t2], ["1/2", "1/3"])
    value = family.evaluate(IndexElement.of(1, "2/3"))
    assert value[0, 0].real == pytest.approx(0.5**2 * 0.25**2)
    assert family.exponents(IndexElement.of("-3/2", 0)) == (-3, 0)
    with pytest.raises(LatticeError):
        family.evaluate(IndexElement.of("1/4", 0))
    with pytest.raises(LatticeError):
        family.evaluate(IndexElement.of(-1, 0))


def test_family_rejects_shared_coordinates():
    with pytest.raises(LatticeError):
        SemigroupFamily((IndexElement.unit(2, 0), IndexElement.unit(2, 0, 2)), (identity(1), identity(1)))


def test_naimark_bundle_save(tmp_path, zero_family):
    bundle = naimark_truncated(zero_family, group_box(zero_family.generators, 1), seed=4)
    path = tmp_path / "naimark.json"
    bundle.save(path)
    payload = json.loads(path.read_text())
    assert payload["kind"] == "unitary"
    assert payload["seed"] == 4
    assert len(payload["box"]) == 4
    assert len(payload["shifts"]) == 2


@seed(5)
@settings(max_examples=40, deadline=None)
@given(m=st.integers(-3, 3), n=st.integers(-3, 3))
def test_t_hat_of_the_inverse_is_the_adjoint(m, n):
    family = gen_family("commuting", 3, 5)
    g = IndexElement.of(m, n)
    assert spectral_norm(t_hat(family, -g) - t_hat(family, g).conj().T) <= 1e-14


def test_kernel_gram_is_block_toeplitz():
    family = gen_family("commuting", 2, 8)
    box = group_box(family.generators, 2)
    gram, _ = kernel_gram(family, box)
    size = family.dim
    positions = {point: index for index, point in enumerate(box)}

    def block(s, t):
        row, col = positions[s] * size, positions[t] * size
        return gram[row : row + size, col : col + size]

    compared = 0
    for s in box:
        for t in box:
            for a in family.generators:
                if s + a in positions and t + a in positions:
                    assert spectral_norm(block(s + a, t + a) - block(s, t)) <= 1e-14
                    compared += 1
    assert compared > 0


@pytest.mark.parametrize("seed", range(5))
def test_isometric_dilation_of_a_doubly_commuting_family_is_doubly_commuting(seed):
    family = gen_family("doubly_commuting", 4, seed)
    restricted = isometric_from_unitary(naimark_truncated(family, group_box(family.generators, 2), seed=seed))
    report = doubly_commuting_dilation_check(restricted)
    assert report.passed
    assert report.data["tested"] > 0


@pytest.mark.parametrize("seed", range(5))
def test_commuting_pairs_that_are_not_doubly_commuting_are_detected_on_the_dilation(seed):
    family = SemigroupFamily.from_operators(list(gen_commuting_pair(2, seed, margin=0.7)))
    assert not doubly_commuting_check(family).passed
    restricted = isometric_from_unitary(naimark_truncated(family, group_box(family.generators, 1), seed=seed))
    assert restricted.residuals["regular_identity"] <= 1e-9
    assert not doubly_commuting_dilation_check(restricted).passed


@pytest.mark.parametrize("seed", range(3))
def test_isometric_dilation_extends_back_to_a_unitary_one(seed):
    family = gen_family("doubly_commuting", 4, seed)
    bundle = naimark_truncated(family, group_box(family.generators, 2), seed=seed)
    restricted = isometric_from_unitary(bundle)
    extended = unitary_from_isometric(restricted, seed=seed)
    assert extended.kind == "unitary"
    assert extended.dim == restricted.dim
    for name in ("extends_isometric", "unitarity", "regular_identity"):
        assert extended.residuals[name] <= 1e-9
    with pytest.raises(PreconditionError):
        unitary_from_isometric(bundle)


def test_empty_brehmer_scan_has_no_minimum(zero_family):
    scan = brehmer_scan(zero_family, [IndexElement.zero(2)])
    assert scan.passed
    assert scan.data["tested"] == []
    assert scan.data["min_eigenvalue"] is None
