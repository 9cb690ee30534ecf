"""Scenario configuration models for the workbench command line."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ando import DEFAULT_GRID
from cogen import GAP_TOL
from matcore import EQUALITY_TOL, RANK_TOL, ComplexMatrix, WorkbenchError, as_matrix, matrix_from_json
from regular import MAX_SUBSET

MAX_DIM = 16
MAX_DEPTH = 16
MAX_TRIALS = 1000

ScenarioKind = Literal[
    "schaffer", "ando", "reduce", "continuous", "brehmer", "naimark", "coisometric", "hunt", "lemma22", "theorem21"
]
# Alternate names accepted in scenario files; each runs the pipeline it maps to.
KIND_ALIASES: Dict[str, str] = {"lemma22": "reduce", "theorem21": "continuous"}
InstanceGenerator = Literal["commuting", "doubly_commuting", "unitary"]
Verdict = Literal["pass", "fail"]
# Nested rows of real numbers or [re, im] pairs, or the codec object {"rows", "cols", "data"}.
MatrixSpec = Union[List[List[Union[float, List[float]]]], Dict[str, Any]]


def canonical_kind(kind: str) -> str:
    return KIND_ALIASES.get(kind, kind)


def parse_matrix(spec: MatrixSpec) -> ComplexMatrix:
    if isinstance(spec, Mapping):
        return matrix_from_json(spec)
    rows = [[complex(entry[0], entry[1]) if isinstance(entry, list) else entry for entry in row] for row in spec]
    return as_matrix(rows)


class ToleranceConfig(BaseModel):
    """Tolerances shared by every check of a scenario."""

    model_config = ConfigDict(extra="forbid")

    equality: float = Field(EQUALITY_TOL, gt=0)
    rank: float = Field(RANK_TOL, gt=0)
    gap: float = Field(GAP_TOL, gt=0)


class Scenario(BaseModel):
    """One workbench run: which pipeline, on which instance, with which tolerances.

    Explicit operators go in ``matrices`` under the names the pipeline reads
    (``T`` for ``schaffer``; ``T1``/``T2`` for the pair and family kinds;
    ``A1``/``A2`` for ``continuous``). Missing operators are drawn from
    ``generator`` with ``seed``. ``lemma22`` and ``theorem21`` are accepted as
    names for ``reduce`` and ``continuous``.
    """

    model_config = ConfigDict(extra="forbid")

    kind: ScenarioKind
    dim: int = Field(2, ge=1, le=MAX_DIM)
    depth: int = Field(4, ge=1, le=MAX_DEPTH)
    depths: List[int] = Field(default_factory=lambda: [6, 8])
    seed: int = Field(0, ge=0)
    trials: int = Field(1, ge=1, le=MAX_TRIALS)
    generator: InstanceGenerator = "commuting"
    matrices: Dict[str, MatrixSpec] = Field(default_factory=dict)
    bases: Optional[List[str]] = None
    box_depth: int = Field(1, ge=0, le=4)
    subset: Optional[List[int]] = None
    grid: List[float] = Field(default_factory=lambda: list(DEFAULT_GRID))
    evaluation: List[float] = Field(default_factory=lambda: [0.5, 0.5])
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    expected_verdict: Verdict = "pass"

    @field_validator("depths")
    @classmethod
    def _check_depths(cls, value: List[int]) -> List[int]:
        if not value or any(depth < 2 or depth > MAX_DEPTH for depth in value):
            raise ValueError(f"depths must be a nonempty list of values in [2, {MAX_DEPTH}]")
        return value

    @field_validator("grid")
    @classmethod
    def _check_grid(cls, value: List[float]) -> List[float]:
        if not value or any(point < 0 for point in value):
            raise ValueError("grid must be a nonempty list of nonnegative parameters")
        return value

    @field_validator("evaluation")
    @classmethod
    def _check_evaluation(cls, value: List[float]) -> List[float]:
        if len(value) != 2 or any(point < 0 for point in value):
            raise ValueError("evaluation must be a pair (s, t) of nonnegative parameters")
        return value

    @field_validator("bases")
    @classmethod
    def _check_bases(cls, value: Optional[List[str]]) -> Optional[List[str]]:
        try:
            valid = value is None or all(Fraction(base) > 0 for base in value)
        except (ValueError, ZeroDivisionError):
            valid = False
        if not valid:
            raise ValueError("bases must be positive rationals such as '3/4'")
        return value

    @field_validator("subset")
    @classmethod
    def _check_subset(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (len(value) > MAX_SUBSET or len(set(value)) != len(value)):
            raise ValueError(f"subset must hold at most {MAX_SUBSET} distinct coordinates")
        return value

    @model_validator(mode="after")
    def _check_matrices(self) -> "Scenario":
        for name, spec in self.matrices.items():
            try:
                matrix = parse_matrix(spec)
            except (WorkbenchError, TypeError, ValueError) as exc:
                raise ValueError(f"matrix '{name}' is malformed: {exc}") from exc
            if max(matrix.shape) > MAX_DIM:
                raise ValueError(f"matrix '{name}' exceeds the dimension bound {MAX_DIM}")
        return self

    # ------------------------------------------------------------------
    def operator(self, name: str) -> Optional[ComplexMatrix]:
        spec = self.matrices.get(name)
        return None if spec is None else parse_matrix(spec)

    def echo(self) -> Dict[str, Any]:
        """JSON-friendly copy of the scenario, as stored in reports."""

        return self.model_dump(mode="json")

    @classmethod
    def load(
        cls,
        kind: ScenarioKind,
        path: Optional[Path] = None,
        **overrides: Any,
    ) -> "Scenario":
        """Read ``path`` (if given), apply the non-``None`` overrides and validate.

        ``tol`` in ``overrides`` replaces the equality tolerance. A file may name
        ``kind`` by one of its aliases; the alias is kept in the echo.

        Raises:
            ValueError: If the file names a different scenario kind.
            pydantic.ValidationError: If a field is out of bounds or unknown.
        """

        payload: Dict[str, Any] = json.loads(Path(path).read_text()) if path is not None else {}
        if canonical_kind(str(payload.get("kind", kind))) != canonical_kind(kind):
            raise ValueError(f"Config describes a '{payload['kind']}' scenario, not '{kind}'.")
        payload.setdefault("kind", kind)
        tol = overrides.pop("tol", None)
        payload.update({key: value for key, value in overrides.items() if value is not None})
        if tol is not None:
            payload["tolerances"] = {**payload.get("tolerances", {}), "equality": tol}
        return cls.model_validate(payload)


__all__ = [
    "KIND_ALIASES",
    "MAX_DEPTH",
    "MAX_DIM",
    "Scenario",
    "ScenarioKind",
    "ToleranceConfig",
    "canonical_kind",
    "parse_matrix",
]
