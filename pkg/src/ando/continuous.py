"""Commuting isometric dilations of commuting continuous contraction semigroups.

The pipeline turns the generators ``A1, A2`` into cogenerators, dilates the
cogenerator pair, removes fixed vectors so that ``1`` is not an eigenvalue of
the dilating pair ``U1, U2``, and uses those as cogenerators of the semigroups
``V_i(s) = e_s(U_i)``.
"""
from __future__ import annotations

import itertools
import logging
from contextlib import contextmanager
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from cogen import GAP_TOL, Cogenerator, GeneratorPair, cogenerator_from_generator, eigenvalue_one_check
from matcore import (
    RANK_TOL,
    CheckReport,
    ComplexMatrix,
    SpaceDecomposition,
    TolLike,
    adjoint,
    identity,
    resolve_tol,
    span_orthonormalize,
    spectral_norm,
)
from matcore.errors import EigenvalueOneError, PreconditionError, StageError, WorkbenchError

from .ando import (
    ando_truncated,
    interior_commutation,
    interior_isometry_defect,
    monomials,
    remove_fixed_vectors,
)
from .bundle import DilationBundle

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

DEFAULT_GRID: Tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 2.0)
SEMIGROUP_TOL = 1e-8
COMMUTATION_TOL = 1e-7
COMPRESSION_TOL = 1e-8
RESTRICTION_TOL = 1e-9

Grid = Sequence[Tuple[float, float]]


@contextmanager
def _stage(name: str) -> Iterator[None]:
    log.info("pipeline stage: %s", name)
    try:
        yield
    except WorkbenchError as exc:
        raise StageError(name, exc) from exc


def default_grid(values: Sequence[float] = DEFAULT_GRID) -> List[Tuple[float, float]]:
    return [(float(s), float(t)) for s, t in itertools.product(values, repeat=2)]


def continuous_pair_dilation(
    generators: GeneratorPair,
    depth: int,
    *,
    gap_tol: TolLike = GAP_TOL,
    seed: Optional[int] = None,
) -> DilationBundle:
    """Dilate ``(exp(s A1), exp(t A2))`` to a commuting pair of isometric semigroups.

    Raises:
        StageError: Wrapping the failure of a stage; ``stage`` is one of
            ``cogenerators``, ``eigenvalue_one``, ``ando``,
            ``remove_fixed_vectors`` or ``semigroups``.
    """

    gap_value = resolve_tol(gap_tol)
    with _stage("cogenerators"):
        first = cogenerator_from_generator(generators.A1, gap_value)
        second = cogenerator_from_generator(generators.A2, gap_value)
    with _stage("eigenvalue_one"):
        for label, cogenerator in (("T1", first), ("T2", second)):
            gap = eigenvalue_one_check(cogenerator.T, gap_value)
            if not gap.passed:
                raise EigenvalueOneError(gap.distance, gap_value, operator=label)
    with _stage("ando"):
        discrete = ando_truncated(first.T, second.T, depth, seed=seed)
    with _stage("remove_fixed_vectors"):
        reduced, blocks = remove_fixed_vectors(discrete, gap_value)
    with _stage("semigroups"):
        b1 = Cogenerator(reduced.V1, gap_tol=gap_value).to_generator()
        b2 = Cogenerator(reduced.V2, gap_tol=gap_value).to_generator()

    bundle = DilationBundle(
        decomposition=reduced.decomposition,
        operators={"V1": reduced.V1, "V2": reduced.V2},
        depth=depth,
        kind="continuous",
        inputs={"T1": first.T, "T2": second.T, "A1": generators.A1, "A2": generators.A2},
        interior=reduced.interior,
        core=reduced.core,
        generators={"B1": b1, "B2": b2},
        metadata={"seed": seed, "block_report": blocks.to_dict(), "dim_ando": discrete.dim},
    )
    report = continuous_semigroup_report(bundle)
    bundle.residuals.update({check.name: check.residual for check in report})
    log.info("continuous_pair_dilation: dim=%d residuals=%s", bundle.dim, bundle.residuals)
    return bundle


def _semigroup(generator: ComplexMatrix, s: float) -> ComplexMatrix:
    if s == 0:
        return identity(generator.shape[0])
    return scipy.linalg.expm(s * generator)


def _require_continuous(bundle: DilationBundle) -> None:
    if bundle.kind != "continuous":
        raise PreconditionError(f"Expected a continuous bundle, got '{bundle.kind}'.", precondition="continuous bundle")


def dilation_compression_residual(bundle: DilationBundle, s: float, t: float) -> float:
    """``|T1(s) T2(t) - P_H V1(s) V2(t)|_H|``; exactly ``0`` at ``s = t = 0``."""

    _require_continuous(bundle)
    target = _semigroup(bundle.inputs["A1"], s) @ _semigroup(bundle.inputs["A2"], t)
    v1, v2 = bundle.evaluate(s, t)
    return spectral_norm(target - adjoint(bundle.J) @ v1 @ v2 @ bundle.J)


def continuous_semigroup_report(bundle: DilationBundle, grid: Sequence[float] = DEFAULT_GRID) -> CheckReport:
    """Semigroup law, commutation and compression residuals on a sample grid.

    On a restricted bundle (one with a ``frame``) the semigroup law and the
    commutation are measured on ``J`` columns, where the restriction keeps
    them exact. The interior isometry defect of ``V_i(s)`` is a truncation
    effect and is reported under ``data`` only.
    """

    _require_continuous(bundle)
    values = sorted({float(s) for s in grid})
    scope = bundle.J if bundle.frame is not None else identity(bundle.dim)
    cache = {(which, s): bundle.evaluate_one(which, s) for which in ("B1", "B2") for s in values}

    def value(which: str, s: float) -> ComplexMatrix:
        if (which, s) not in cache:
            cache[(which, s)] = bundle.evaluate_one(which, s)
        return cache[(which, s)]

    report = CheckReport("continuous_semigroup", data={"grid": values, "scope": "J" if bundle.frame is not None else "K"})
    for index, which in enumerate(("B1", "B2"), start=1):
        worst = max(
            spectral_norm((value(which, s) @ value(which, t) - value(which, s + t)) @ scope)
            for s, t in itertools.product(values, repeat=2)
        )
        report.record(f"semigroup_law_V{index}", worst, SEMIGROUP_TOL)

    commutation = 0.0
    for s, t in itertools.product(values, repeat=2):
        v1, v2 = value("B1", s), value("B2", t)
        if bundle.frame is None:
            commutation = max(commutation, interior_commutation(v1, v2, bundle.core))
        else:
            commutation = max(commutation, spectral_norm((v1 @ v2 - v2 @ v1) @ scope))
    report.record("commutation", commutation, COMMUTATION_TOL)

    compression = max(dilation_compression_residual(bundle, s, t) for s, t in itertools.product(values, repeat=2))
    report.record("compression", compression, COMPRESSION_TOL)

    report.data["interior_isometry_defect"] = {
        f"V{index}": [interior_isometry_defect(value(which, s), bundle.interior) for s in values]
        for index, which in enumerate(("B1", "B2"), start=1)
    }
    return report


def minimal_restriction(
    bundle: DilationBundle,
    sample_grid: Optional[Grid] = None,
    tol: TolLike = RANK_TOL,
) -> DilationBundle:
    """Restrict a bundle to the span of its sampled orbit of ``H``.

    Continuous bundles use ``{V1(s) V2(t) h}`` over ``sample_grid`` (default: all
    pairs from ``DEFAULT_GRID``); discrete bundles use ``{V1^m V2^n h}`` with
    integer exponents (default: ``m + n <= depth``). ``H`` always leads the new
    basis, and the grid is recorded in the bundle metadata.
    """

    if bundle.kind == "continuous":
        grid = default_grid() if sample_grid is None else [(float(s), float(t)) for s, t in sample_grid]
        orbit = []
        for s, t in grid:
            v1, v2 = bundle.evaluate(s, t)
            orbit.append(v1 @ (v2 @ bundle.J))
    else:
        grid = monomials(bundle.depth, pair=bundle.pair) if sample_grid is None else list(sample_grid)
        if any(int(m) != m or int(n) != n or m < 0 or n < 0 for m, n in grid):
            raise PreconditionError("Discrete bundles need nonnegative integer exponents.", precondition="integer grid")
        grid = [(int(m), int(n)) for m, n in grid]
        orbit = []
        for m, n in grid:
            columns = bundle.J
            for _ in range(n):
                columns = bundle.V2 @ columns
            for _ in range(m):
                columns = bundle.V1 @ columns
            orbit.append(columns)

    basis = span_orthonormalize(np.hstack([bundle.J, *orbit]), tol)
    basis[:, : bundle.h_dim] = bundle.J
    operators = {name: adjoint(basis) @ bundle.operators[name] @ basis for name in ("V1", "V2") if name in bundle.operators}
    sink, edge = ~bundle.interior, ~bundle.core
    weight = resolve_tol(tol)
    restricted = DilationBundle(
        decomposition=SpaceDecomposition(("H", "M"), (bundle.h_dim, basis.shape[1] - bundle.h_dim)),
        operators=operators,
        depth=bundle.depth,
        kind=bundle.kind,
        inputs=dict(bundle.inputs),
        interior=np.linalg.norm(basis[sink], axis=0) ** 2 <= weight,
        core=np.linalg.norm(basis[edge], axis=0) ** 2 <= weight,
        generators=dict(bundle.generators),
        frame=None if bundle.kind != "continuous" else (basis if bundle.frame is None else bundle.frame @ basis),
        metadata={**bundle.metadata, "grid": [list(point) for point in grid], "dim_before": bundle.dim},
    )

    worst = 0.0
    for a, b in grid:
        if bundle.kind == "continuous":
            before = bundle.evaluate(a, b)
            after = restricted.evaluate(a, b)
            old = adjoint(bundle.J) @ before[0] @ before[1] @ bundle.J
            new = adjoint(restricted.J) @ after[0] @ after[1] @ restricted.J
        else:
            old, new = bundle.power_compression(a, b), restricted.power_compression(a, b)
        worst = max(worst, spectral_norm(old - new))
    restricted.residuals["restriction_compression"] = worst
    if worst > RESTRICTION_TOL:
        log.warning("minimal_restriction: compression drift %.3e on the grid", worst)
    log.info("minimal_restriction: dim %d -> %d", bundle.dim, restricted.dim)
    return restricted


__all__ = [
    "COMMUTATION_TOL",
    "COMPRESSION_TOL",
    "DEFAULT_GRID",
    "SEMIGROUP_TOL",
    "continuous_pair_dilation",
    "continuous_semigroup_report",
    "default_grid",
    "dilation_compression_residual",
    "minimal_restriction",
]
