"""Index semigroup arithmetic over a finite Ω."""

from .index import (
    IndexElement,
    LatticeReduction,
    SubsetMask,
    commensurable_reduce,
    group_box,
    mask,
    pos_neg_parts,
)

__all__ = [
    "IndexElement",
    "LatticeReduction",
    "SubsetMask",
    "commensurable_reduce",
    "group_box",
    "mask",
    "pos_neg_parts",
]
