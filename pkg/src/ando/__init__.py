"""Truncated Schäffer/Ando dilations, fixed-vector removal and the continuous pipeline."""

from .ando import (
    COMMUTE_TOL,
    INVARIANCE_TOL,
    ando_truncated,
    append_block,
    interior_commutation,
    interior_isometry_defect,
    max_compression_error,
    monomials,
    polynomial_compression_residual,
    remove_fixed_vectors,
    schaffer_truncated,
    verify_block_structure,
)
from .bundle import BLOCK_TOL, BlockReport, BundleKind, DilationBundle
from .continuous import (
    DEFAULT_GRID,
    continuous_pair_dilation,
    continuous_semigroup_report,
    default_grid,
    dilation_compression_residual,
    minimal_restriction,
)

__all__ = [
    "BLOCK_TOL",
    "BlockReport",
    "BundleKind",
    "COMMUTE_TOL",
    "DEFAULT_GRID",
    "DilationBundle",
    "INVARIANCE_TOL",
    "ando_truncated",
    "append_block",
    "continuous_pair_dilation",
    "continuous_semigroup_report",
    "default_grid",
    "dilation_compression_residual",
    "interior_commutation",
    "interior_isometry_defect",
    "max_compression_error",
    "minimal_restriction",
    "monomials",
    "polynomial_compression_residual",
    "remove_fixed_vectors",
    "schaffer_truncated",
    "verify_block_structure",
]
