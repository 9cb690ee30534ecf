"""Dilation bundles: a space decomposition plus the operators living on it."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Tuple

import numpy as np
import scipy.linalg

from matcore import (
    CheckReport,
    ComplexMatrix,
    SpaceDecomposition,
    adjoint,
    identity,
    matrix_from_json,
    matrix_to_json,
)
from matcore.errors import PreconditionError

log = logging.getLogger(__name__)
log.addHandler(logging.NullHandler())

BundleKind = Literal["schaffer", "ando", "reduced", "continuous"]
KINDS: Tuple[str, ...] = ("schaffer", "ando", "reduced", "continuous")

BLOCK_TOL = 1e-8


@dataclass(eq=False)
class DilationBundle:
    """Operators ``V1`` (and ``V2``) on ``K = H ⊕ ...`` with their bookkeeping.

    ``interior`` marks the coordinates off the last defect block, where the
    truncated operators are isometric; ``core`` marks those off the last two
    blocks. Continuous bundles additionally carry the generators ``B1, B2`` of
    the isometric semigroups ``V_i(s) = exp(s B_i)`` and, after a restriction,
    the ``frame`` whose columns span the current space inside the generators'
    space.
    """

    decomposition: SpaceDecomposition
    operators: Dict[str, ComplexMatrix]
    depth: int
    kind: BundleKind
    residuals: Dict[str, float] = field(default_factory=dict)
    inputs: Dict[str, ComplexMatrix] = field(default_factory=dict)
    interior: Optional[np.ndarray] = None
    core: Optional[np.ndarray] = None
    generators: Dict[str, ComplexMatrix] = field(default_factory=dict)
    frame: Optional[ComplexMatrix] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PreconditionError(f"Unknown bundle kind '{self.kind}'.", precondition="bundle kind")
        dim = self.decomposition.total_dim
        if "V1" not in self.operators:
            raise PreconditionError("A dilation bundle needs at least V1.", precondition="V1 present")
        for name in ("V1", "V2"):
            operator = self.operators.get(name)
            if operator is not None and operator.shape != (dim, dim):
                raise PreconditionError(
                    f"Operator {name} has shape {operator.shape}, expected {(dim, dim)}.",
                    precondition="decomposition dimension",
                )
        self.operators.setdefault("J", self.decomposition.embedding("H"))
        if self.interior is None:
            self.interior = np.ones(dim, dtype=bool)
        if self.core is None:
            self.core = np.array(self.interior, dtype=bool)

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.decomposition.total_dim

    @property
    def h_dim(self) -> int:
        return self.decomposition.h_dim

    @property
    def J(self) -> ComplexMatrix:
        return self.operators["J"]

    @property
    def V1(self) -> ComplexMatrix:
        return self.operators["V1"]

    @property
    def V2(self) -> Optional[ComplexMatrix]:
        return self.operators.get("V2")

    @property
    def pair(self) -> bool:
        return "V2" in self.operators

    def compress_to_h(self, operator: ComplexMatrix) -> ComplexMatrix:
        """``P_H X|_H``."""

        return adjoint(self.J) @ operator @ self.J

    def power_compression(self, m: int, n: int = 0) -> ComplexMatrix:
        """``P_H V1^m V2^n|_H``, computed on ``J`` columns only."""

        if n and not self.pair:
            raise PreconditionError("Bundle has no second operator.", precondition="two operators")
        columns = self.J
        for _ in range(n):
            columns = self.V2 @ columns
        for _ in range(m):
            columns = self.V1 @ columns
        return adjoint(self.J) @ columns

    # ------------------------------------------------------------------
    # Continuous evaluator
    # ------------------------------------------------------------------
    def evaluate_one(self, which: str, s: float) -> ComplexMatrix:
        """``V_i(s)`` on this bundle's space; ``which`` is ``"B1"`` or ``"B2"``."""

        if self.kind != "continuous":
            raise PreconditionError("Only continuous bundles carry an evaluator.", precondition="continuous bundle")
        if s < 0:
            raise PreconditionError(f"Semigroup parameter must be >= 0, got {s!r}.", precondition="nonnegative s")
        if s == 0:
            return identity(self.dim)
        value = scipy.linalg.expm(s * self.generators[which])
        if self.frame is not None:
            value = adjoint(self.frame) @ value @ self.frame
        return value

    def evaluate(self, s: float, t: float) -> Tuple[ComplexMatrix, ComplexMatrix]:
        """``(V_1(s), V_2(t))``."""

        return self.evaluate_one("B1", s), self.evaluate_one("B2", t)

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------
    def to_json(self) -> Dict[str, Any]:
        return {
            "decomposition": self.decomposition.to_dict(),
            "operators": {name: matrix_to_json(op) for name, op in sorted(self.operators.items())},
            "depth": self.depth,
            "kind": self.kind,
            "residuals": {name: float(value) for name, value in sorted(self.residuals.items())},
            "inputs": {name: matrix_to_json(op) for name, op in sorted(self.inputs.items())},
            "interior": [bool(flag) for flag in self.interior],
            "core": [bool(flag) for flag in self.core],
            "generators": {name: matrix_to_json(op) for name, op in sorted(self.generators.items())},
            "frame": None if self.frame is None else matrix_to_json(self.frame),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "DilationBundle":
        frame = payload.get("frame")
        return cls(
            decomposition=SpaceDecomposition.from_dict(payload["decomposition"]),
            operators={name: matrix_from_json(op) for name, op in payload["operators"].items()},
            depth=int(payload["depth"]),
            kind=payload["kind"],
            residuals={name: float(value) for name, value in payload.get("residuals", {}).items()},
            inputs={name: matrix_from_json(op) for name, op in payload.get("inputs", {}).items()},
            interior=np.array(payload["interior"], dtype=bool) if "interior" in payload else None,
            core=np.array(payload["core"], dtype=bool) if "core" in payload else None,
            generators={name: matrix_from_json(op) for name, op in payload.get("generators", {}).items()},
            frame=None if frame is None else matrix_from_json(frame),
            metadata=dict(payload.get("metadata", {})),
        )

    def save(self, path: Path | str) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.to_json(), sort_keys=True))

    @classmethod
    def load(cls, path: Path | str) -> "DilationBundle":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass
class BlockReport:
    """Residuals of the fixed-vector block structure and the subspace dimensions.

    ``b, c`` are the blocks of ``V1`` from ``H ⊕ M`` and ``L2`` into ``L1``;
    ``y, z`` the blocks of ``V2`` from ``H ⊕ M`` and ``L2`` into ``L1``;
    ``w1_z`` is ``|(W1* - I) Z*|`` with ``W1`` the ``L2`` diagonal block of ``V1``.
    ``offdiag_v1, offdiag_v2`` measure how far the restricted operators on
    ``K~ = G ⊕ L`` are from being block diagonal.
    """

    dim_l1_tilde: int = 0
    dim_l2_tilde: int = 0
    dim_l1: int = 0
    dim_l2: int = 0
    dim_m: int = 0
    dim_l: int = 0
    b: float = 0.0
    c: float = 0.0
    y: float = 0.0
    z: float = 0.0
    w1_z: float = 0.0
    l1_identity: float = 0.0
    structural_zeros: float = 0.0
    offdiag_v1: float = 0.0
    offdiag_v2: float = 0.0
    tol: float = BLOCK_TOL

    def __post_init__(self) -> None:
        for name in ("b", "c", "y", "z", "w1_z", "l1_identity", "structural_zeros", "offdiag_v1", "offdiag_v2"):
            if getattr(self, name) < 0:
                raise ValueError(f"Residual {name} must be nonnegative.")

    @property
    def vacuous(self) -> bool:
        """True when ``L1`` and ``L2`` are both empty and every block check is empty."""

        return self.dim_l1 == 0 and self.dim_l2 == 0

    @property
    def passed(self) -> bool:
        return self.to_check_report().passed

    def to_check_report(self, subject: str = "block_structure") -> CheckReport:
        """One check per block residual.

        ``w1_z <= |W1* - I| |Z| <= 2 |Z|``, so it gets twice the block tolerance.
        """

        report = CheckReport(subject, data={"dims": {"L1": self.dim_l1, "L2": self.dim_l2, "M": self.dim_m, "L": self.dim_l}})
        for name in ("b", "c", "y", "z", "l1_identity", "offdiag_v1", "offdiag_v2"):
            report.record(name, getattr(self, name), self.tol)
        report.record("w1_z", self.w1_z, 2.0 * self.tol)
        return report

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["passed"] = self.passed
        payload["vacuous"] = self.vacuous
        return payload


__all__ = ["BLOCK_TOL", "BlockReport", "BundleKind", "DilationBundle"]
