"""Truncated Naimark (GNS) construction of regular dilations over a lattice box.

The positive definite kernel ``K(s, t) = T^(t - s)`` on a box of lattice points
factors as ``F* F``; the block columns ``J_s`` of ``F`` embed ``H`` into the
GNS space, and each generator ``a`` gets a unitary ``U_a`` extending
``J_s h -> J_{s+a} h`` over the points where both ends lie in the box. Only
indices whose shift paths stay in the box are representable; the rest are
listed, never assumed.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from index import IndexElement, pos_neg_parts
from matcore import (
    EQUALITY_TOL,
    CheckReport,
    ComplexMatrix,
    TolLike,
    adjoint,
    extend_isometry_to_unitary,
    identity,
    isometry_defect,
    matrix_to_json,
    resolve_tol,
    span_orthonormalize,
    spectral_norm,
)
from matcore.errors import NotIsometricError, PreconditionError

from .family import SemigroupFamily, kernel_gram, t_hat

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

IDENTITY_TOL = 1e-9
ISOMETRY_TOL = 1e-10
# Kernel eigenvalues below this fraction of the largest are rounding noise.
FACTOR_CUT = 1e-13
SPAN_TOL = 1e-12

NaimarkKind = Literal["unitary", "isometric", "coisometric"]


@dataclass(eq=False)
class NaimarkBundle:
    """GNS space of a kernel on ``box`` with embeddings ``J_s`` and generator shifts.

    ``shifts[k]`` belongs to ``family.generators[k]``. For a ``coisometric``
    bundle the stored family and shifts are those of the adjoint family ``T*``;
    the dilation of ``T`` itself is ``U_s = W_s*`` (see :meth:`dilation`).
    """

    box: Tuple[IndexElement, ...]
    gram: ComplexMatrix
    factor: ComplexMatrix
    shifts: Tuple[ComplexMatrix, ...]
    family: SemigroupFamily
    kind: NaimarkKind = "unitary"
    seed: Optional[int] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    representable: Tuple[IndexElement, ...] = ()
    untestable: Tuple[IndexElement, ...] = ()

    def __post_init__(self) -> None:
        self.box = tuple(self.box)
        self._positions = {point: position for position, point in enumerate(self.box)}
        if len(self._positions) != len(self.box):
            raise PreconditionError("Box points must be distinct.", precondition="distinct box points")
        if IndexElement.zero(self.family.omega_size) not in self._positions:
            raise PreconditionError("The box must contain the zero index.", precondition="0 in box")

    @property
    def h_dim(self) -> int:
        return self.family.dim

    @property
    def dim(self) -> int:
        return int(self.factor.shape[0])

    def __contains__(self, point: IndexElement) -> bool:
        return point in self._positions

    def embedding(self, point: IndexElement) -> ComplexMatrix:
        """``J_s``: block column of the factor at ``point``."""

        position = self._positions[point]
        return self.factor[:, position * self.h_dim : (position + 1) * self.h_dim]

    @property
    def J0(self) -> ComplexMatrix:
        return self.embedding(IndexElement.zero(self.family.omega_size))

    def path(self, s: IndexElement) -> List[IndexElement]:
        """Points visited by ``U_s J_0``: the last generator is applied first."""

        points = [IndexElement.zero(self.family.omega_size)]
        exponents = self.family.exponents(s)
        for k in reversed(range(len(exponents))):
            for _ in range(exponents[k]):
                points.append(points[-1] + self.family.generators[k])
        return points

    def on_box(self, s: IndexElement) -> bool:
        return s.in_semigroup() and all(point in self for point in self.path(s))

    def apply(self, s: IndexElement, columns: ComplexMatrix) -> ComplexMatrix:
        """``U_s @ columns`` for ``s`` in ``S``, in the order used by :meth:`path`."""

        exponents = self.family.exponents(s)
        for k in reversed(range(len(exponents))):
            for _ in range(exponents[k]):
                columns = self.shifts[k] @ columns
        return columns

    def unitary(self, s: IndexElement) -> ComplexMatrix:
        return self.apply(s, identity(self.dim))

    def dilation(self, s: IndexElement) -> ComplexMatrix:
        """The dilating operator at ``s``: ``U_s``, or ``W_s*`` for coisometric bundles."""

        value = self.unitary(s)
        return adjoint(value) if self.kind == "coisometric" else value

    def dilation_value(self, g: IndexElement) -> ComplexMatrix:
        """``J_0* U_{g-}* U_{g+} J_0`` with the stored shifts."""

        plus, minus = pos_neg_parts(g)
        return adjoint(self.apply(minus, self.J0)) @ self.apply(plus, self.J0)

    def differences(self) -> List[IndexElement]:
        """All ``t - s`` for ``s, t`` in the box, sorted and without duplicates."""

        return sorted({t - s for s in self.box for t in self.box}, key=IndexElement.sort_key)

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "box": [point.to_json() for point in self.box],
            "gram": matrix_to_json(self.gram),
            "factor": matrix_to_json(self.factor),
            "shifts": [matrix_to_json(shift) for shift in self.shifts],
            "family": self.family.to_json(),
            "residuals": {name: float(value) for name, value in sorted(self.residuals.items())},
            "representable": [g.to_json() for g in self.representable],
            "untestable": [g.to_json() for g in self.untestable],
        }

    def save(self, path: Path | str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.to_json(), sort_keys=True))


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------
def gns_factor(gram: ComplexMatrix) -> ComplexMatrix:
    """``F`` with ``F* F = gram`` from the Hermitian eigendecomposition.

    Eigenvalues at or below ``FACTOR_CUT · lambda_max`` are dropped, so the
    GNS space has the numerical rank of the kernel.
    """

    eigenvalues, vectors = scipy.linalg.eigh(gram)
    if eigenvalues.size == 0 or eigenvalues[-1] <= 0:
        return np.zeros((0, gram.shape[0]), dtype=np.complex128)
    keep = eigenvalues > FACTOR_CUT * eigenvalues[-1]
    return np.sqrt(eigenvalues[keep])[:, None] * adjoint(vectors[:, keep])


def _split(bundle: NaimarkBundle) -> None:
    representable: List[IndexElement] = []
    untestable: List[IndexElement] = []
    for g in bundle.differences():
        plus, minus = pos_neg_parts(g)
        (representable if bundle.on_box(plus) and bundle.on_box(minus) else untestable).append(g)
    bundle.representable, bundle.untestable = tuple(representable), tuple(untestable)


def _identity_residual(bundle: NaimarkBundle, family: SemigroupFamily) -> float:
    worst = 0.0
    for g in bundle.representable:
        worst = max(worst, spectral_norm(bundle.dilation_value(g) - t_hat(family, g)))
    return worst


def naimark_truncated(
    family: SemigroupFamily,
    box: Sequence[IndexElement],
    *,
    tol: TolLike = EQUALITY_TOL,
    seed: Optional[int] = None,
) -> NaimarkBundle:
    """Regular unitary dilation of ``family`` truncated to ``box``.

    ``seed`` only changes the unitary completions off the in-box spans; the
    values ``J_0* U_{s-}* U_{s+} J_0`` at representable indices do not depend on it.

    Raises:
        PreconditionError: If the kernel is not positive semidefinite on the
            box, in which case no regular dilation exists.
    """

    box = tuple(box)
    gram, verdict = kernel_gram(family, box, tol)
    if not verdict.passed:
        raise PreconditionError(
            f"Kernel is not positive definite on the box (lambda_min = {verdict.min_eigenvalue:.3e}); "
            "no regular dilation exists.",
            precondition="positive definite kernel",
            min_eigenvalue=verdict.min_eigenvalue,
        )
    factor = gns_factor(gram)
    h = family.dim
    positions = {point: position for position, point in enumerate(box)}

    def block(point: IndexElement) -> ComplexMatrix:
        return factor[:, positions[point] * h : (positions[point] + 1) * h]

    shifts = []
    for k, generator in enumerate(family.generators):
        sources = [s for s in box if s + generator in positions]
        if sources:
            domain = np.hstack([block(s) for s in sources])
            image = np.hstack([block(s + generator) for s in sources])
            completion_seed = None if seed is None else seed + k
            shifts.append(extend_isometry_to_unitary(domain, image, factor.shape[0], tol=tol, seed=completion_seed))
        else:
            shifts.append(identity(factor.shape[0]))

    bundle = NaimarkBundle(box, gram, factor, tuple(shifts), family, seed=seed)
    _split(bundle)
    bundle.residuals["j0_isometry"] = isometry_defect(bundle.J0)
    bundle.residuals["regular_identity"] = _identity_residual(bundle, family)
    log.debug(
        "naimark_truncated: box=%d gns_dim=%d representable=%d residuals=%s",
        len(box),
        bundle.dim,
        len(bundle.representable),
        bundle.residuals,
    )
    return bundle


# ----------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------
def regular_identity_report(
    bundle: NaimarkBundle,
    family: Optional[SemigroupFamily] = None,
    tol: TolLike = IDENTITY_TOL,
) -> CheckReport:
    """In-box residual of ``J_0* U_{g-}* U_{g+} J_0 = T^(g)`` and the untestable indices."""

    family = bundle.family if family is None else family
    report = CheckReport(
        "regular_identity",
        data={
            "representable": [g.to_json() for g in bundle.representable],
            "untestable": [g.to_json() for g in bundle.untestable],
        },
    )
    report.record("regular_identity", _identity_residual(bundle, family), resolve_tol(tol))
    report.record("j0_isometry", isometry_defect(bundle.J0), resolve_tol(tol))
    return report


def semigroup_law_check(bundle: NaimarkBundle, tol: TolLike = IDENTITY_TOL) -> CheckReport:
    """``U_a U_b J_s = U_{a+b} J_s = J_{s+a+b}`` whenever every step stays in the box."""

    generators = bundle.family.generators
    worst = 0.0
    tested = 0
    for i, a in enumerate(generators):
        for j, b in enumerate(generators):
            for s in bundle.box:
                steps = (s + b, s + a, s + a + b)
                if not all(point in bundle for point in steps):
                    continue
                target = bundle.embedding(s + a + b)
                ordered = bundle.shifts[i] @ (bundle.shifts[j] @ bundle.embedding(s))
                combined = bundle.apply(a + b, bundle.embedding(s))
                worst = max(worst, spectral_norm(ordered - target), spectral_norm(combined - target))
                tested += 1
    report = CheckReport("semigroup_law", data={"tested": tested})
    report.record("semigroup_law", worst, resolve_tol(tol))
    return report


def isometric_from_unitary(bundle: NaimarkBundle, tol: TolLike = IDENTITY_TOL) -> NaimarkBundle:
    """Restrict a unitary dilation to ``span{J_s H : s in box ∩ S}``.

    The restricted shifts ``V_a = Q* U_a Q`` are isometric on the span of the
    representable columns ``{J_s : s, s + a in box ∩ S}``.
    """

    points = tuple(s for s in bundle.box if s.in_semigroup())
    columns = np.hstack([bundle.embedding(s) for s in points])
    basis = span_orthonormalize(columns, SPAN_TOL)
    h = bundle.h_dim
    keep = np.concatenate([np.arange(bundle._positions[s] * h, (bundle._positions[s] + 1) * h) for s in points])
    restricted = NaimarkBundle(
        box=points,
        gram=bundle.gram[np.ix_(keep, keep)],
        factor=adjoint(basis) @ columns,
        shifts=tuple(adjoint(basis) @ shift @ basis for shift in bundle.shifts),
        family=bundle.family,
        kind="isometric",
        seed=bundle.seed,
    )
    _split(restricted)

    worst = 0.0
    for k, generator in enumerate(restricted.family.generators):
        sources = [s for s in points if s + generator in restricted]
        if not sources:
            continue
        domain = np.hstack([restricted.embedding(s) for s in sources])
        image = restricted.shifts[k] @ domain
        worst = max(worst, spectral_norm(adjoint(image) @ image - adjoint(domain) @ domain))
    restricted.residuals["isometry"] = worst
    restricted.residuals["regular_identity"] = _identity_residual(restricted, restricted.family)
    if worst > resolve_tol(tol):
        log.warning("isometric_from_unitary: isometry residual %.3e exceeds %.1e", worst, resolve_tol(tol))
    log.debug("isometric_from_unitary: gns_dim=%d -> %d", bundle.dim, restricted.dim)
    return restricted


def unitary_from_isometric(
    bundle: NaimarkBundle,
    tol: TolLike = IDENTITY_TOL,
    seed: Optional[int] = None,
) -> NaimarkBundle:
    """Extend the shifts of an isometric dilation to unitaries on the same space.

    Each ``U_a`` is completed from ``J_s -> V_a J_s`` over the in-box sources,
    so ``U`` extends ``V`` there and inherits the regular-dilation identity.
    """

    if bundle.kind != "isometric":
        raise PreconditionError(f"Expected an isometric bundle, got '{bundle.kind}'.", precondition="isometric bundle")
    shifts = []
    extends = 0.0
    for k, generator in enumerate(bundle.family.generators):
        sources = [s for s in bundle.box if s + generator in bundle]
        if not sources:
            shifts.append(identity(bundle.dim))
            continue
        domain = np.hstack([bundle.embedding(s) for s in sources])
        image = bundle.shifts[k] @ domain
        completion_seed = None if seed is None else seed + k
        unitary = extend_isometry_to_unitary(domain, image, bundle.dim, tol=tol, seed=completion_seed)
        extends = max(extends, spectral_norm(unitary @ domain - image))
        shifts.append(unitary)

    extended = NaimarkBundle(bundle.box, bundle.gram, bundle.factor, tuple(shifts), bundle.family, seed=seed)
    _split(extended)
    extended.residuals["extends_isometric"] = extends
    extended.residuals["unitarity"] = max(isometry_defect(shift) for shift in shifts)
    extended.residuals["regular_identity"] = _identity_residual(extended, extended.family)
    log.debug("unitary_from_isometric: residuals=%s", extended.residuals)
    return extended


def doubly_commuting_dilation_check(bundle: NaimarkBundle, tol: TolLike = IDENTITY_TOL) -> CheckReport:
    """Doubly commuting shifts, tested on in-box vectors.

    For a doubly commuting family ``V_a* J_s = J_s T_a*`` whenever ``s`` has no
    ``a`` component. Pairing with every ``J_t`` whose shift stays in the box,
    the check compares ``(V_a J_t)* J_s`` with ``J_t* J_s T_a*``.
    """

    family = bundle.family
    points = [s for s in bundle.box if s.in_semigroup()]
    worst = 0.0
    tested = 0
    for k, (generator, coordinate, operator) in enumerate(zip(family.generators, family.coordinates, family.operators)):
        for s in points:
            if s[coordinate] != 0:
                continue
            for t in points:
                if t + generator not in bundle:
                    continue
                paired = adjoint(bundle.shifts[k] @ bundle.embedding(t)) @ bundle.embedding(s)
                expected = adjoint(bundle.embedding(t)) @ bundle.embedding(s) @ adjoint(operator)
                worst = max(worst, spectral_norm(paired - expected))
                tested += 1
    report = CheckReport("doubly_commuting_dilation", data={"tested": tested})
    report.record("adjoint_action", worst, resolve_tol(tol))
    return report


def _require_isometric_family(family: SemigroupFamily, kind: str, adjoint_side: bool = False) -> None:
    worst = max(isometry_defect(adjoint(op) if adjoint_side else op) for op in family.operators)
    if worst > ISOMETRY_TOL:
        raise NotIsometricError(worst, kind=kind)


def extension_check(
    bundle: NaimarkBundle,
    family: Optional[SemigroupFamily] = None,
    tol: TolLike = IDENTITY_TOL,
) -> CheckReport:
    """A unitary dilation of an isometric family extends it: ``U_a J_0 = J_0 T_a``.

    Raises:
        NotIsometricError: If some generator operator is not isometric within ``1e-10``.
    """

    family = bundle.family if family is None else family
    _require_isometric_family(family, "isometry")
    j0 = bundle.J0
    worst = 0.0
    skipped = []
    for k, (generator, operator) in enumerate(zip(family.generators, family.operators)):
        if generator not in bundle:
            skipped.append(generator.to_json())
            continue
        worst = max(worst, spectral_norm(bundle.shifts[k] @ j0 - j0 @ operator))
    report = CheckReport("extension", data={"skipped": skipped})
    report.record("extension", worst, resolve_tol(tol))
    return report


def coisometric_dilation(
    family: SemigroupFamily,
    box: Sequence[IndexElement],
    *,
    tol: TolLike = EQUALITY_TOL,
    seed: Optional[int] = None,
) -> Tuple[NaimarkBundle, CheckReport]:
    """Coisometric family dilated through the regular dilation of its adjoints.

    With ``W`` the dilation of ``T* = {T_s*}``, the dilation of ``T`` is
    ``U_s = W_s*`` and satisfies ``J_0* U_{s-} U_{s+}* J_0 = T_{s-} T_{s+}*``.
    In finite dimensions a coisometry is unitary, so this is the same
    construction read through adjoints; the report records that.

    Raises:
        NotIsometricError: If some ``T_a T_a*`` differs from ``I`` by more than ``1e-10``.
    """

    _require_isometric_family(family, "coisometry", adjoint_side=True)
    adjoints = family.adjoint_family()
    bundle = naimark_truncated(adjoints, box, tol=tol, seed=seed)
    bundle.kind = "coisometric"

    report = CheckReport(
        "coisometric_dilation",
        data={"degeneracy": "finite dimensional coisometries are unitary", "gns_dim": bundle.dim},
    )
    report.extend(extension_check(bundle, adjoints))

    worst = 0.0
    for g in bundle.representable:
        plus, minus = pos_neg_parts(g)
        target = family.evaluate(minus) @ adjoint(family.evaluate(plus))
        value = adjoint(bundle.J0) @ bundle.dilation(minus) @ adjoint(bundle.dilation(plus)) @ bundle.J0
        worst = max(worst, spectral_norm(value - target))
    report.record("coisometric_identity", worst, IDENTITY_TOL)

    points = [s for s in bundle.box if s.in_semigroup()]
    # Sanity check: the unitary ends of a unitary family already span the GNS space.
    span = span_orthonormalize(np.hstack([bundle.dilation(s) @ bundle.J0 for s in points]), SPAN_TOL)
    report.data["span_dim"] = int(span.shape[1])
    report.record("span_property", abs(span.shape[1] - bundle.dim), 0.0)
    bundle.residuals["coisometric_identity"] = worst
    return bundle, report


__all__ = [
    "FACTOR_CUT",
    "IDENTITY_TOL",
    "NaimarkBundle",
    "coisometric_dilation",
    "doubly_commuting_dilation_check",
    "extension_check",
    "gns_factor",
    "isometric_from_unitary",
    "naimark_truncated",
    "regular_identity_report",
    "semigroup_law_check",
    "unitary_from_isometric",
]
