"""Matrix file format and 17-significant-digit JSON output.

Matrix files are JSON objects::

    {"rows": n, "cols": d, "field": "C" | "R", "entries": [[re, im], ...]}

with entries in row-major order. Real files may store bare numbers instead of
``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .linalg import VectorSystem


class MatrixFormatError(ValueError):
    pass


def matrix_to_dict(m, field: str | None = None) -> dict:
    m = np.atleast_2d(np.asarray(m))
    if field is None:
        field = "C" if np.iscomplexobj(m) and np.any(m.imag != 0) else "R"
    flat = m.reshape(-1)
    entries = [[float(np.real(z)), float(np.imag(z))] for z in flat]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "field": field, "entries": entries}


def matrix_from_dict(obj: dict) -> tuple[np.ndarray, str]:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        field = obj.get("field", "C")
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix object: {exc}") from exc
    if field not in ("R", "C"):
        raise MatrixFormatError(f"unknown field {field!r}")
    if len(entries) != rows * cols:
        raise MatrixFormatError(f"expected {rows * cols} entries, found {len(entries)}")
    vals = []
    for e in entries:
        if isinstance(e, (int, float)):
            vals.append(complex(e, 0.0))
        elif isinstance(e, (list, tuple)) and len(e) == 2:
            vals.append(complex(float(e[0]), float(e[1])))
        else:
            raise MatrixFormatError(f"bad entry {e!r}")
    m = np.array(vals, dtype=complex).reshape(rows, cols)
    if field == "R":
        if np.any(m.imag != 0):
            raise MatrixFormatError("real matrix has nonzero imaginary parts")
        m = m.real.copy()
    return m, field


def read_matrix(path) -> tuple[np.ndarray, str]:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc
    return matrix_from_dict(obj)


def read_vectors(path) -> VectorSystem:
    m, field = read_matrix(path)
    return VectorSystem(m, field)


def write_matrix(path, m, field: str | None = None) -> None:
    Path(path).write_text(dumps(matrix_to_dict(m, field)) + "\n")


def _fmt(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = f"{x:.17g}"
    if "." not in s and "e" not in s and "inf" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits.

    Non-finite floats become the strings ``"inf"``, ``"-inf"``, ``"nan"``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag])
    raise TypeError(f"cannot serialize {type(obj).__name__}")
