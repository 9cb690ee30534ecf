"""JSON codec for matrices: ``{"rows": R, "cols": C, "data": [[re, im], ...]}``."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Mapping

import numpy as np

from .errors import PreconditionError
from .matcore import ComplexMatrix, as_matrix

_FIELDS = ("rows", "cols", "data")


def matrix_to_json(matrix: ComplexMatrix) -> Dict[str, Any]:
    """Encode ``matrix`` row-major as ``[re, im]`` pairs."""

    matrix = np.asarray(matrix, dtype=np.complex128)
    rows, cols = matrix.shape
    data = [[float(value.real), float(value.imag)] for value in matrix.reshape(-1)]
    return {"rows": int(rows), "cols": int(cols), "data": data}


def matrix_from_json(payload: Mapping[str, Any]) -> ComplexMatrix:
    """Decode a matrix payload, insisting on the exact field names."""

    if set(payload) != set(_FIELDS):
        raise PreconditionError(
            f"Matrix JSON must have exactly the fields {list(_FIELDS)}, got {sorted(payload)}.",
            precondition="matrix json fields",
        )
    rows, cols = int(payload["rows"]), int(payload["cols"])
    data = payload["data"]
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise PreconditionError(
            f"Matrix JSON declares {rows}x{cols} but carries {len(data)} entries.",
            precondition="entry count",
        )
    values = np.array([complex(float(re), float(im)) for re, im in data], dtype=np.complex128)
    if rows * cols == 0:
        return np.zeros((rows, cols), dtype=np.complex128)
    return as_matrix(values.reshape(rows, cols))


def load_matrix(path: Path | str) -> ComplexMatrix:
    return matrix_from_json(json.loads(Path(path).read_text()))


def dump_matrix(matrix: ComplexMatrix, path: Path | str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(matrix_to_json(matrix), sort_keys=True))


__all__ = ["dump_matrix", "load_matrix", "matrix_from_json", "matrix_to_json"]
