"""Regular dilations of commuting contraction families over commensurable index semigroups."""

from .family import (
    DOUBLY_COMMUTING_TOL,
    MAX_SUBSET,
    SemigroupFamily,
    brehmer_check,
    brehmer_scan,
    brehmer_sum,
    doubly_commuting_check,
    kernel_gram,
    t_hat,
)
from .naimark import (
    IDENTITY_TOL,
    NaimarkBundle,
    coisometric_dilation,
    doubly_commuting_dilation_check,
    extension_check,
    gns_factor,
    isometric_from_unitary,
    naimark_truncated,
    regular_identity_report,
    semigroup_law_check,
    unitary_from_isometric,
)

__all__ = [
    "DOUBLY_COMMUTING_TOL",
    "IDENTITY_TOL",
    "MAX_SUBSET",
    "NaimarkBundle",
    "SemigroupFamily",
    "brehmer_check",
    "brehmer_scan",
    "brehmer_sum",
    "coisometric_dilation",
    "doubly_commuting_check",
    "doubly_commuting_dilation_check",
    "extension_check",
    "gns_factor",
    "isometric_from_unitary",
    "kernel_gram",
    "naimark_truncated",
    "regular_identity_report",
    "semigroup_law_check",
    "t_hat",
    "unitary_from_isometric",
]
