"""Truncated Schäffer and Ando dilations and the fixed-vector reduction.

Truncation keeps ``N`` defect blocks after ``H``. The last block is a sink:
the shift drops whatever reaches it, so the operators are isometric exactly
on vectors supported off that block, while compressions of powers to ``H``
stay exact because ``H`` is co-invariant (the ``H`` row of every operator is
``[T, 0, ..., 0]``).
"""
from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from cogen import GAP_TOL, eigenvalue_one_check
from matcore import (
    EQUALITY_TOL,
    ComplexMatrix,
    SpaceDecomposition,
    TolLike,
    adjoint,
    as_matrix,
    commutator_norm,
    defect,
    extend_isometry_to_unitary,
    identity,
    numerical_kernel,
    orthonormal_complement,
    require_contraction,
    require_square,
    resolve_tol,
    span_orthonormalize,
    spectral_norm,
    unitarity_defect,
)
from matcore.errors import (
    EigenvalueOneError,
    InvarianceError,
    NotCommutingError,
    NotIsometricError,
    PreconditionError,
)

from .bundle import BLOCK_TOL, BlockReport, DilationBundle

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

COMMUTE_TOL = 1e-10
INVARIANCE_TOL = 1e-8

# ----------------------------------------------------------------------
# Residual helpers
# ----------------------------------------------------------------------


def interior_isometry_defect(operator: ComplexMatrix, interior: np.ndarray) -> float:
    """``|(V*V - I) P|`` with ``P`` the coordinate projection onto ``interior``."""

    gram = adjoint(operator) @ operator - identity(operator.shape[0])
    return spectral_norm(gram[:, np.asarray(interior, dtype=bool)])


def interior_commutation(first: ComplexMatrix, second: ComplexMatrix, core: np.ndarray) -> float:
    """``|(V1 V2 - V2 V1) P|`` with ``P`` the coordinate projection onto ``core``."""

    difference = first @ second - second @ first
    return spectral_norm(difference[:, np.asarray(core, dtype=bool)])


def max_compression_error(bundle: DilationBundle, depth: Optional[int] = None) -> float:
    """``max |P_H V1^m V2^n|_H - T1^m T2^n|`` over ``m + n <= depth``."""

    depth = bundle.depth if depth is None else depth
    t1 = bundle.inputs["T1"]
    t2 = bundle.inputs.get("T2")
    worst = 0.0
    for m, n in monomials(depth, pair=bundle.pair):
        target = np.linalg.matrix_power(t1, m)
        if n:
            target = target @ np.linalg.matrix_power(t2, n)
        worst = max(worst, spectral_norm(bundle.power_compression(m, n) - target))
    return worst


def monomials(depth: int, *, pair: bool = True) -> List[Tuple[int, int]]:
    """Exponent pairs ``(m, n)`` with ``m + n <= depth`` (``n = 0`` for one operator)."""

    if not pair:
        return [(m, 0) for m in range(depth + 1)]
    return [(m, total - m) for total in range(depth + 1) for m in range(total, -1, -1)]


def _masks(decomposition: SpaceDecomposition) -> Tuple[np.ndarray, np.ndarray]:
    names = decomposition.names
    interior = np.ones(decomposition.total_dim, dtype=bool)
    core = np.ones(decomposition.total_dim, dtype=bool)
    if len(names) > 1:
        interior[decomposition.indices(names[-1])] = False
        core[decomposition.indices(*names[-2:])] = False
    core[~interior] = False
    return interior, core


# ----------------------------------------------------------------------
# Constructions
# ----------------------------------------------------------------------
def schaffer_truncated(operator: ComplexMatrix, depth: int, tol: TolLike = EQUALITY_TOL) -> DilationBundle:
    """Truncated Schäffer isometric dilation of one contraction.

    ``K = H ⊕ H^N`` and ``V(h, x_1, ..., x_N) = (T h, D_T h, x_1, ..., x_{N-1})``.

    Raises:
        NotAContractionError: If ``|T| > 1 + tol``.
        PreconditionError: If ``depth < 1``.
    """

    if depth < 1:
        raise PreconditionError(f"Depth must be at least 1, got {depth}.", precondition="depth >= 1")
    t = as_matrix(operator)
    h = require_square(t)
    require_contraction(t, tol)
    decomposition = SpaceDecomposition.from_pairs([("H", h)] + [(f"X{k}", h) for k in range(1, depth + 1)])
    v = np.zeros((decomposition.total_dim,) * 2, dtype=np.complex128)
    v[decomposition.slice("H"), decomposition.slice("H")] = t
    v[decomposition.slice("X1"), decomposition.slice("H")] = defect(t, tol)
    for k in range(1, depth):
        v[decomposition.slice(f"X{k + 1}"), decomposition.slice(f"X{k}")] = identity(h)

    interior, core = _masks(decomposition)
    bundle = DilationBundle(
        decomposition=decomposition,
        operators={"V1": v},
        depth=depth,
        kind="schaffer",
        inputs={"T1": t},
        interior=interior,
        core=core,
    )
    bundle.residuals["isometry_V1"] = interior_isometry_defect(v, interior)
    bundle.residuals["compression"] = max_compression_error(bundle)
    log.debug("schaffer_truncated: dim K=%d residuals=%s", bundle.dim, bundle.residuals)
    return bundle


def ando_truncated(
    first: ComplexMatrix,
    second: ComplexMatrix,
    depth: int,
    *,
    tol: TolLike = EQUALITY_TOL,
    seed: Optional[int] = None,
) -> DilationBundle:
    """Truncated commuting isometric dilation of a commuting pair of contractions.

    ``K = H ⊕ (H ⊕ H)^N``. With ``W_i(h_0, h_1, ...) = (T_i h_0, D_i h_0, h_1, ...)``
    shifting one ``H`` slot and ``G`` the unitary on ``H ⊕ H`` with
    ``G (D_1 T_2 h, D_2 h) = (D_2 T_1 h, D_1 h)``, the pair is
    ``V_1 = Ĝ W_1`` and ``V_2 = W_2 Ĝ*`` where ``Ĝ = I ⊕ G ⊕ ... ⊕ G``.
    ``Ĝ`` acts on aligned slot pairs, so ``V_1 V_2 = V_2 V_1`` holds on the
    truncated space as well.

    Raises:
        NotCommutingError: If ``|T1 T2 - T2 T1| > 1e-10 max(1, |T1| |T2|)``.
        NotAContractionError: If either input is not a contraction.
        PreconditionError: If ``depth < 2``.
    """

    if depth < 2:
        raise PreconditionError(f"Depth must be at least 2, got {depth}.", precondition="depth >= 2")
    t1, t2 = as_matrix(first), as_matrix(second)
    h = require_square(t1)
    if require_square(t2) != h:
        raise PreconditionError("T1 and T2 must act on the same space.", precondition="same space")
    norm_1, norm_2 = require_contraction(t1, tol), require_contraction(t2, tol)
    bound = COMMUTE_TOL * max(1.0, norm_1 * norm_2)
    residual = commutator_norm(t1, t2)
    if residual > bound:
        raise NotCommutingError(residual, bound)

    d1, d2 = defect(t1, tol), defect(t2, tol)
    g = extend_isometry_to_unitary(np.vstack([d1 @ t2, d2]), np.vstack([d2 @ t1, d1]), tol=tol, seed=seed)

    decomposition = SpaceDecomposition.from_pairs([("H", h)] + [(f"B{k}", 2 * h) for k in range(1, depth + 1)])
    dim = decomposition.total_dim
    slots = [slice(0, h)] + [slice(h + k * h, h + (k + 1) * h) for k in range(2 * depth)]
    w1 = np.zeros((dim, dim), dtype=np.complex128)
    w2 = np.zeros((dim, dim), dtype=np.complex128)
    for w, t, d in ((w1, t1, d1), (w2, t2, d2)):
        w[slots[0], slots[0]] = t
        w[slots[1], slots[0]] = d
        for k in range(1, 2 * depth):
            w[slots[k + 1], slots[k]] = identity(h)
    g_hat = scipy.linalg.block_diag(identity(h), *([g] * depth))
    v1 = g_hat @ w1
    v2 = w2 @ adjoint(g_hat)

    interior, core = _masks(decomposition)
    bundle = DilationBundle(
        decomposition=decomposition,
        operators={"V1": v1, "V2": v2, "G": g},
        depth=depth,
        kind="ando",
        inputs={"T1": t1, "T2": t2},
        interior=interior,
        core=core,
        metadata={"seed": seed},
    )
    _record_pair_residuals(bundle)
    log.debug("ando_truncated: dim K=%d residuals=%s", dim, bundle.residuals)
    return bundle


def _record_pair_residuals(bundle: DilationBundle) -> None:
    bundle.residuals["isometry_V1"] = interior_isometry_defect(bundle.V1, bundle.interior)
    bundle.residuals["isometry_V2"] = interior_isometry_defect(bundle.V2, bundle.interior)
    bundle.residuals["commutation"] = interior_commutation(bundle.V1, bundle.V2, bundle.core)
    bundle.residuals["compression"] = max_compression_error(bundle)


def append_block(
    bundle: DilationBundle,
    name: str,
    first: ComplexMatrix,
    second: ComplexMatrix,
    tol: TolLike = EQUALITY_TOL,
) -> DilationBundle:
    """Direct sum ``V_i ⊕ X_i`` with commuting unitaries ``X_1, X_2`` on a new block.

    The new block is unreachable from ``H`` and is counted as interior. This is
    how fixed subspaces (``X_i = I``) and padding are planted into a bundle.

    Raises:
        NotIsometricError: If either block operator is not unitary.
        NotCommutingError: If the block operators do not commute.
    """

    x1, x2 = as_matrix(first), as_matrix(second)
    size = require_square(x1)
    if require_square(x2) != size:
        raise PreconditionError("Block operators must have equal size.", precondition="same space")
    tol_value = resolve_tol(tol)
    worst = max(unitarity_defect(x1), unitarity_defect(x2))
    if worst > tol_value:
        raise NotIsometricError(worst, kind="unitary")
    residual = commutator_norm(x1, x2)
    if residual > tol_value:
        raise NotCommutingError(residual, tol_value)

    decomposition = SpaceDecomposition(bundle.decomposition.names + (name,), bundle.decomposition.dims + (size,))
    operators = {
        "V1": scipy.linalg.block_diag(bundle.V1, x1),
        "V2": scipy.linalg.block_diag(bundle.V2, x2),
        "J": np.vstack([bundle.J, np.zeros((size, bundle.h_dim), dtype=np.complex128)]),
    }
    extended = DilationBundle(
        decomposition=decomposition,
        operators=operators,
        depth=bundle.depth,
        kind=bundle.kind,
        inputs=dict(bundle.inputs),
        interior=np.concatenate([bundle.interior, np.ones(size, dtype=bool)]),
        core=np.concatenate([bundle.core, np.ones(size, dtype=bool)]),
        metadata={**bundle.metadata, "appended": [*bundle.metadata.get("appended", []), name]},
    )
    _record_pair_residuals(extended)
    return extended


def polynomial_compression_residual(
    bundle: DilationBundle,
    p: Sequence[complex],
    q: Sequence[complex] = (1.0,),
) -> float:
    """``|p(T1) q(T2) - P_H p(V1) q(V2)|_H|`` for coefficient lists (constant term first).

    Raises:
        PreconditionError: If ``deg p + deg q`` exceeds the bundle depth.
    """

    degree = max(len(p) - 1, 0) + max(len(q) - 1, 0)
    if degree > bundle.depth:
        raise PreconditionError(
            f"Total degree {degree} exceeds truncation depth {bundle.depth}.",
            precondition="degree <= depth",
        )
    t1 = bundle.inputs["T1"]
    t2 = bundle.inputs.get("T2", identity(bundle.h_dim))
    v2 = bundle.V2 if bundle.pair else identity(bundle.dim)
    target = _polynomial(p, t1) @ _polynomial(q, t2)
    columns = _polynomial_apply(p, bundle.V1, _polynomial_apply(q, v2, bundle.J))
    return spectral_norm(target - adjoint(bundle.J) @ columns)


def _polynomial(coefficients: Sequence[complex], matrix: ComplexMatrix) -> ComplexMatrix:
    return _polynomial_apply(coefficients, matrix, identity(matrix.shape[0]))


def _polynomial_apply(coefficients: Sequence[complex], matrix: ComplexMatrix, columns: ComplexMatrix) -> ComplexMatrix:
    """Horner evaluation of ``p(X) @ columns``."""

    result = np.zeros_like(columns, dtype=np.complex128)
    for coefficient in reversed(list(coefficients)):
        result = matrix @ result + coefficient * columns
    return result


# ----------------------------------------------------------------------
# Fixed-vector removal
# ----------------------------------------------------------------------
def _require_invariant(operator: ComplexMatrix, basis: ComplexMatrix, subspace: str, bound: float) -> float:
    image = operator @ basis
    residual = spectral_norm(image - basis @ (adjoint(basis) @ image))
    if residual > bound:
        raise InvarianceError(subspace, residual, bound)
    return residual


def verify_block_structure(
    bundle: DilationBundle,
    decomposition: Optional[SpaceDecomposition] = None,
    tol: TolLike = BLOCK_TOL,
) -> BlockReport:
    """Block residuals of ``V1, V2`` against ``(H ⊕ M) ⊕ L1 ⊕ L2``.

    ``V1`` should read ``[[A, 0, 0], [B, I, C], [D, 0, W1]]`` with ``B = C = 0``;
    ``V2`` should read ``[[X, 0, 0], [Y, W2, Z], [R, 0, T]]`` with ``Y = Z = 0``.
    Empty ``L1``/``L2`` give empty blocks whose residuals are zero; a warning
    records that the checks were vacuous.

    Raises:
        PreconditionError: When the decomposition is not ``(H, M, L1, L2)`` or
            does not match the bundle dimension.
    """

    decomposition = bundle.decomposition if decomposition is None else decomposition
    if decomposition.names != ("H", "M", "L1", "L2") or decomposition.total_dim != bundle.dim:
        raise PreconditionError(
            f"Expected blocks (H, M, L1, L2) of total size {bundle.dim}, got {decomposition.to_dict()}.",
            precondition="block decomposition",
        )
    if not bundle.pair:
        raise PreconditionError("Block structure needs two operators.", precondition="two operators")
    hm, l1, l2 = ("H", "M"), ("L1",), ("L2",)
    v1, v2 = bundle.V1, bundle.V2

    def block(matrix: ComplexMatrix, rows: Sequence[str], cols: Sequence[str]) -> ComplexMatrix:
        return decomposition.block(matrix, rows, cols)

    w1 = block(v1, l2, l2)
    z = block(v2, l1, l2)
    structural = max(
        spectral_norm(block(v1, hm, l1)),
        spectral_norm(block(v1, hm, l2)),
        spectral_norm(block(v1, l2, l1)),
        spectral_norm(block(v2, hm, l1)),
        spectral_norm(block(v2, hm, l2)),
        spectral_norm(block(v2, l2, l1)),
    )
    report = BlockReport(
        dim_l1=decomposition.dim("L1"),
        dim_l2=decomposition.dim("L2"),
        dim_m=decomposition.dim("M"),
        b=spectral_norm(block(v1, l1, hm)),
        c=spectral_norm(block(v1, l1, l2)),
        y=spectral_norm(block(v2, l1, hm)),
        z=spectral_norm(z),
        w1_z=spectral_norm((adjoint(w1) - identity(w1.shape[0])) @ adjoint(z)),
        l1_identity=spectral_norm(block(v1, l1, l1) - identity(decomposition.dim("L1"))),
        structural_zeros=structural,
        tol=resolve_tol(tol),
    )
    if report.vacuous:
        log.warning("verify_block_structure: L1 and L2 are empty, block checks pass vacuously")
    log.debug("verify_block_structure: %s", report.to_dict())
    return report


def remove_fixed_vectors(
    bundle: DilationBundle,
    gap_tol: TolLike = GAP_TOL,
    tol: TolLike = INVARIANCE_TOL,
) -> Tuple[DilationBundle, BlockReport]:
    """Strip the fixed vectors of ``V1`` and ``V2`` from an Ando bundle.

    With ``L~_i = ker(V_i - I)``, ``L1 = L~_1``, ``L2 = (L~_1 ∨ L~_2) ⊖ L~_1`` and
    ``M`` the rest of ``K ⊖ H``, the operators are first restricted to
    ``K~ = H ⊕ M ⊕ L2`` and then to ``G = K~ ⊖ L`` with ``L = ker(V~_2 - I)``.
    The result is a ``reduced`` bundle whose ``U_1, U_2`` have no eigenvalue
    within ``gap_tol`` of ``1`` and whose compressions to ``H`` are unchanged.

    Raises:
        EigenvalueOneError: If ``T1`` or ``T2`` has an eigenvalue near ``1``, or
            if the reduction leaves one on ``U1``/``U2``.
        InvarianceError: When a fixed space meets ``H`` or a subspace the
            reduction restricts to is not invariant.
    """

    if bundle.kind != "ando":
        raise PreconditionError(f"remove_fixed_vectors needs an ando bundle, got '{bundle.kind}'.", precondition="ando bundle")
    gap_value, bound = resolve_tol(gap_tol), resolve_tol(tol)
    j = bundle.J
    v1, v2 = bundle.V1, bundle.V2
    for label, operator in (("T1", v1), ("T2", v2)):
        gap = eigenvalue_one_check(bundle.compress_to_h(operator), gap_value)
        if not gap.passed:
            raise EigenvalueOneError(gap.distance, gap_value, operator=label)

    eye = identity(bundle.dim)
    fixed_1 = numerical_kernel(v1 - eye, gap_value)
    fixed_2 = numerical_kernel(v2 - eye, gap_value)
    for label, fixed in (("L~1", fixed_1), ("L~2", fixed_2)):
        overlap = spectral_norm(adjoint(j) @ fixed)
        if overlap > bound:
            raise InvarianceError(f"{label} ⟂ H", overlap, bound)

    l1 = fixed_1
    l2 = span_orthonormalize(np.hstack([l1, fixed_2]))[:, l1.shape[1] :]
    m = orthonormal_complement(np.hstack([j, l1, l2]))
    basis = np.hstack([j, m, l1, l2])
    adapted = DilationBundle(
        decomposition=SpaceDecomposition(("H", "M", "L1", "L2"), (bundle.h_dim, m.shape[1], l1.shape[1], l2.shape[1])),
        operators={"V1": adjoint(basis) @ v1 @ basis, "V2": adjoint(basis) @ v2 @ basis},
        depth=bundle.depth,
        kind="ando",
    )
    report = verify_block_structure(adapted, tol=bound)
    report.dim_l1_tilde, report.dim_l2_tilde = fixed_1.shape[1], fixed_2.shape[1]

    # First reduction: K~ = H ⊕ M ⊕ L2.
    k_tilde = np.hstack([j, m, l2])
    for label, operator in (("V1", v1), ("V2", v2)):
        _require_invariant(operator, k_tilde, f"K~ under {label}", bound)
    v1_tilde = adjoint(k_tilde) @ v1 @ k_tilde
    v2_tilde = adjoint(k_tilde) @ v2 @ k_tilde

    # Second reduction: G = K~ ⊖ L, L = ker(V~2 - I).
    h_tilde = np.eye(k_tilde.shape[1], bundle.h_dim, dtype=np.complex128)
    fixed_l = numerical_kernel(v2_tilde - identity(k_tilde.shape[1]), gap_value)
    overlap = spectral_norm(adjoint(h_tilde) @ fixed_l)
    if overlap > bound:
        raise InvarianceError("L ⟂ H", overlap, bound)
    g_tilde = np.hstack([h_tilde, orthonormal_complement(np.hstack([h_tilde, fixed_l]))])
    offdiag = []
    for label, operator in (("V~1", v1_tilde), ("V~2", v2_tilde)):
        into_l = _require_invariant(operator, g_tilde, f"G under {label}", bound)
        from_l = spectral_norm(adjoint(g_tilde) @ operator @ fixed_l)
        offdiag.append(max(into_l, from_l))
    report.offdiag_v1, report.offdiag_v2 = offdiag
    report.dim_l = fixed_l.shape[1]

    frame = k_tilde @ g_tilde
    u1 = adjoint(frame) @ v1 @ frame
    u2 = adjoint(frame) @ v2 @ frame
    for label, operator in (("U1", u1), ("U2", u2)):
        gap = eigenvalue_one_check(operator, gap_value)
        if not gap.passed:
            raise EigenvalueOneError(gap.distance, gap_value, operator=label)

    sink = ~bundle.interior
    edge = ~bundle.core
    interior = np.linalg.norm(frame[sink], axis=0) ** 2 <= bound if sink.any() else np.ones(frame.shape[1], dtype=bool)
    core = np.linalg.norm(frame[edge], axis=0) ** 2 <= bound if edge.any() else np.ones(frame.shape[1], dtype=bool)
    reduced = DilationBundle(
        decomposition=SpaceDecomposition(("H", "M"), (bundle.h_dim, frame.shape[1] - bundle.h_dim)),
        operators={"V1": u1, "V2": u2},
        depth=bundle.depth,
        kind="reduced",
        inputs=dict(bundle.inputs),
        interior=interior,
        core=core,
        frame=frame,
        metadata={**bundle.metadata, "block_report": report.to_dict()},
    )
    _record_pair_residuals(reduced)
    log.info(
        "remove_fixed_vectors: dim K=%d -> dim G=%d (L1=%d, L2=%d, L=%d)",
        bundle.dim,
        reduced.dim,
        report.dim_l1,
        report.dim_l2,
        report.dim_l,
    )
    return reduced, report


__all__ = [
    "COMMUTE_TOL",
    "INVARIANCE_TOL",
    "ando_truncated",
    "append_block",
    "interior_commutation",
    "interior_isometry_defect",
    "max_compression_error",
    "monomials",
    "polynomial_compression_residual",
    "remove_fixed_vectors",
    "schaffer_truncated",
    "verify_block_structure",
]
