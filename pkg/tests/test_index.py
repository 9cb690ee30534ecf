"""Tests for exact index semigroup arithmetic."""
from __future__ import annotations

import os
import sys
from fractions import Fraction

ROOT = os.path.dirname(os.path.dirname(__file__))
SRC_PATH = os.path.join(ROOT, "src")
if SRC_PATH not in sys.path:
    sys.path.insert(0, SRC_PATH)
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from index import (  # noqa: E402
    IndexElement,
    SubsetMask,
    commensurable_reduce,
    group_box,
    mask,
    pos_neg_parts,
)
from matcore.errors import LatticeError, PreconditionError  # noqa: E402

OMEGA = 4

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elements = st.lists(rationals, min_size=OMEGA, max_size=OMEGA).map(lambda values: IndexElement(OMEGA, tuple(values)))
semigroup_elements = st.lists(rationals.map(abs), min_size=OMEGA, max_size=OMEGA).map(
    lambda values: IndexElement(OMEGA, tuple(values))
)
subsets = st.sets(st.integers(0, OMEGA - 1)).map(lambda members: SubsetMask(OMEGA, tuple(members)))


def test_commensurable_reduce_reference_triple():
    reduction = commensurable_reduce([IndexElement.of("3/4"), IndexElement.of("1/2"), IndexElement.of("5/6")])
    assert reduction.bases == (Fraction(1, 12),)
    assert reduction.coefficients == ((9,), (6,), (10,))
    assert reduction.defaulted == ()


def test_commensurable_reduce_defaults_empty_coordinates():
    reduction = commensurable_reduce([IndexElement.of(2, 0), IndexElement.of(4, 0)])
    assert reduction.bases == (Fraction(2), Fraction(1))
    assert reduction.defaulted == (1,)
    assert reduction.integers(IndexElement.of(-6, 3)) == (-3, 3)


def test_commensurable_reduce_rejects_negative_coordinates():
    with pytest.raises(LatticeError):
        commensurable_reduce([IndexElement.of(-1)])
    with pytest.raises(PreconditionError):
        commensurable_reduce([])


def test_lattice_reduction_rejects_off_lattice_elements():
    reduction = commensurable_reduce([IndexElement.of("1/2")])
    with pytest.raises(LatticeError):
        reduction.integers(IndexElement.of("1/3"))
    assert reduction.element((3,)) == IndexElement.of("3/2")


@seed(20)
@settings(max_examples=1000, deadline=None)
@given(g=elements)
def test_pos_neg_parts_split_any_difference(g):
    plus, minus = pos_neg_parts(g)
    assert plus - minus == g
    assert plus.in_semigroup() and minus.in_semigroup()
    assert all(min(a, b) == 0 for a, b in zip(plus, minus))


@seed(21)
@settings(max_examples=1000, deadline=None)
@given(s=semigroup_elements, u=subsets)
def test_mask_splits_along_a_subset(s, u):
    assert mask(s, u) + mask(s, u.complement()) == s
    assert mask(s, SubsetMask.full(OMEGA)) == s
    assert mask(s, SubsetMask(OMEGA, ())).is_zero()
    assert set(mask(s, u).support()) <= set(u.members)


def test_mask_matches_indicator_product():
    s = IndexElement.of("1/2", 3, 0, "7/5")
    u = SubsetMask(OMEGA, (0, 3))
    assert mask(s, u) == IndexElement.of("1/2", 0, 0, "7/5")
    assert u.indicator() == IndexElement.of(1, 0, 0, 1)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        IndexElement.of(0.5)


def test_mask_requires_semigroup_element():
    with pytest.raises(LatticeError):
        mask(IndexElement.of(-1, 1), SubsetMask(2, (0,)))


def test_subset_mask_enumerates_by_size():
    subsets = list(SubsetMask(3, (2, 0)).subsets())
    assert [s.members for s in subsets] == [(), (0,), (2,), (0, 2)]
    with pytest.raises(LatticeError):
        SubsetMask(2, (0, 0))


def test_group_box_sizes_and_order():
    generators = [IndexElement.unit(2, 0, "1/2"), IndexElement.unit(2, 1)]
    box = group_box(generators, 1)
    assert box == [
        IndexElement.of(0, 0),
        IndexElement.of(0, 1),
        IndexElement.of("1/2", 0),
        IndexElement.of("1/2", 1),
    ]
    assert len(group_box(generators, 1, signed=True)) == 9
    with pytest.raises(LatticeError):
        group_box([IndexElement.of(-1, 0)], 1)


def test_index_json_lists_nonzero_coordinates():
    element = IndexElement.of("3/4", 0, -2)
    payload = element.to_json()
    assert payload == {"omega": 3, "coords": {"0": "3/4", "2": "-2/1"}}
    assert IndexElement.from_json(payload) == element
    assert str(element) == "(3/4, 0, -2)"
