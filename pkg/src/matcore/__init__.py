"""Dense complex linear algebra primitives for the dilation workbench."""

from .codec import dump_matrix, load_matrix, matrix_from_json, matrix_to_json
from .errors import PreconditionError, StageError, WorkbenchError
from .matcore import (
    EQUALITY_TOL,
    RANK_TOL,
    ComplexMatrix,
    PsdVerdict,
    TolLike,
    Tolerance,
    adjoint,
    as_matrix,
    commutator_norm,
    compress,
    defect,
    extend_isometry_to_unitary,
    hermitian_part,
    identity,
    isometry_defect,
    numerical_kernel,
    orthonormal_complement,
    principal_sqrt,
    psd_check,
    require_contraction,
    require_square,
    resolve_tol,
    span_orthonormalize,
    spectral_norm,
    unitarity_defect,
)
from .report import Check, CheckReport
from .space import SpaceDecomposition

__all__ = [
    "Check",
    "CheckReport",
    "ComplexMatrix",
    "EQUALITY_TOL",
    "PreconditionError",
    "PsdVerdict",
    "RANK_TOL",
    "SpaceDecomposition",
    "StageError",
    "TolLike",
    "Tolerance",
    "WorkbenchError",
    "adjoint",
    "as_matrix",
    "commutator_norm",
    "compress",
    "defect",
    "dump_matrix",
    "extend_isometry_to_unitary",
    "hermitian_part",
    "identity",
    "isometry_defect",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "numerical_kernel",
    "orthonormal_complement",
    "principal_sqrt",
    "psd_check",
    "require_contraction",
    "require_square",
    "resolve_tol",
    "span_orthonormalize",
    "spectral_norm",
    "unitarity_defect",
]
