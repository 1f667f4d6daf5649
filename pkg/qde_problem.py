"""
qde_problem.py - Quaternion QDE Lab
Problem files and value rendering.

A problem file is a JSON object:

    {
      "matrix": {"rows": [["i", 1], [0, "1+i"]]},
      "x0": ["1", "1"],
      "t0": 0.0,
      "t": 1.0,
      "coeffs": [["0", "j"], ["j", "j"]],
      "tolerance": {"residual": 1e-8}
    }

Only "matrix" is required for the matrix commands; "coeffs" (one polynomial
per row, coefficients low to high) is what diag-solve reads. An optional
"expected" vector is a claimed x(t) that `check` gates against. Entries are
quaternion literals ("1-0.5j+2k") or 4-arrays [w, x, y, z].
"""

import json
import logging
import math
import numbers
import os
from dataclasses import dataclass, field
from typing import Any, Optional, Tuple

from qde_config import DEFAULT_TOLERANCES, Tolerances
from qde_errors import DimensionError, ProblemFileError
from qde_linalg import QMatrix, QVector
from qde_quat import Quaternion, format_quaternion, parse_quaternion
from qde_system import QuatPolynomial

logger = logging.getLogger("qde")

_KNOWN_KEYS = {"name", "matrix", "x0", "t0", "t", "coeffs", "expected", "tolerance", "comment"}


@dataclass(frozen=True)
class ProblemFile:
    matrix: Optional[QMatrix] = None
    x0: Optional[QVector] = None
    t0: float = 0.0
    t: Optional[float] = None
    coeffs: Optional[Tuple[QuatPolynomial, ...]] = None
    expected: Optional[QVector] = None
    tolerance: Tolerances = field(default=DEFAULT_TOLERANCES)
    name: str = ""


# ---------------------------------------------------------------------------
# JSON <-> values
# ---------------------------------------------------------------------------


def quaternion_to_json(q: Quaternion) -> list:
    return q.to_list()


def matrix_from_json(raw: Any) -> QMatrix:
    rows = raw.get("rows") if isinstance(raw, dict) else raw
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ProblemFileError('matrix must be {"rows": [[...], ...]} or a list of rows')
    try:
        return QMatrix.from_rows([[parse_quaternion(q) for q in r] for r in rows])
    except DimensionError as e:
        raise ProblemFileError(f"bad matrix: {e}") from e


def matrix_to_json(m: QMatrix) -> dict:
    return {"rows": [[quaternion_to_json(q) for q in row] for row in m.entries()]}


def vector_from_json(raw: Any) -> QVector:
    entries = raw.get("entries") if isinstance(raw, dict) else raw
    if not isinstance(entries, list) or not entries:
        raise ProblemFileError('vector must be {"entries": [...]} or a non-empty list')
    return QVector.from_entries([parse_quaternion(q) for q in entries])


def vector_to_json(v: QVector) -> dict:
    return {"entries": [quaternion_to_json(q) for q in v.entries()]}


def _polynomial_from_json(raw: Any, index: int) -> QuatPolynomial:
    if isinstance(raw, list) and raw and not _is_quaternion_array(raw):
        return QuatPolynomial([parse_quaternion(c) for c in raw])
    try:
        return QuatPolynomial.constant(parse_quaternion(raw))
    except ProblemFileError as e:
        raise ProblemFileError(f"coeffs[{index}]: {e}") from e


def _is_quaternion_array(raw: list) -> bool:
    return len(raw) == 4 and all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in raw)


def _real(raw: Any, key: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, numbers.Real) or not math.isfinite(raw):
        raise ProblemFileError(f"{key} must be a finite number, got {raw!r}")
    return float(raw)


# ---------------------------------------------------------------------------
# Problem files
# ---------------------------------------------------------------------------


def problem_from_dict(raw: Any, name: str = "") -> ProblemFile:
    if not isinstance(raw, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ProblemFileError(f"unknown keys: {', '.join(unknown)}")

    matrix = matrix_from_json(raw["matrix"]) if "matrix" in raw else None
    x0 = vector_from_json(raw["x0"]) if "x0" in raw else None
    expected = vector_from_json(raw["expected"]) if "expected" in raw else None
    coeffs = None
    if "coeffs" in raw:
        if not isinstance(raw["coeffs"], list) or not raw["coeffs"]:
            raise ProblemFileError("coeffs must be a non-empty list of polynomials")
        coeffs = tuple(_polynomial_from_json(c, i) for i, c in enumerate(raw["coeffs"]))

    size = matrix.rows if matrix is not None else (len(coeffs) if coeffs else None)
    for key, vec in (("x0", x0), ("expected", expected)):
        if vec is not None and size is not None and len(vec) != size:
            raise ProblemFileError(f"{key} has length {len(vec)}, expected {size}")
    if expected is not None and x0 is None:
        raise ProblemFileError("expected needs x0")
    if matrix is not None and coeffs is not None and len(coeffs) != matrix.rows:
        raise ProblemFileError("coeffs and matrix disagree on the dimension")

    return ProblemFile(
        matrix=matrix,
        x0=x0,
        t0=_real(raw["t0"], "t0") if "t0" in raw else 0.0,
        t=_real(raw["t"], "t") if "t" in raw else None,
        coeffs=coeffs,
        expected=expected,
        tolerance=Tolerances.from_mapping(raw.get("tolerance")),
        name=str(raw.get("name", name)),
    )


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
    except OSError as e:
        raise ProblemFileError(f"{path}: {e.strerror or e}") from e


def load_problem(path: str) -> ProblemFile:
    problem = problem_from_dict(_read_json(path), name=os.path.splitext(os.path.basename(path))[0])
    logger.info("loaded problem %s from %s", problem.name, path)
    return problem


def load_vector(path: str) -> QVector:
    """A standalone x0 file: a list of literals, {"entries": [...]} or {"x0": [...]}."""
    raw = _read_json(path)
    if isinstance(raw, dict) and "x0" in raw:
        raw = raw["x0"]
    return vector_from_json(raw)


def problem_to_dict(problem: ProblemFile) -> dict:
    out: dict = {}
    if problem.name:
        out["name"] = problem.name
    if problem.matrix is not None:
        out["matrix"] = matrix_to_json(problem.matrix)
    if problem.x0 is not None:
        out["x0"] = [quaternion_to_json(q) for q in problem.x0.entries()]
    out["t0"] = problem.t0
    if problem.t is not None:
        out["t"] = problem.t
    if problem.coeffs is not None:
        out["coeffs"] = [[quaternion_to_json(c) for c in p.coeffs] for p in problem.coeffs]
    if problem.expected is not None:
        out["expected"] = [quaternion_to_json(q) for q in problem.expected.entries()]
    changed = {
        k: v for k, v in vars(problem.tolerance).items() if v != getattr(DEFAULT_TOLERANCES, k)
    }
    if changed:
        out["tolerance"] = changed
    return out


def save_problem(problem: ProblemFile, path: str):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(problem_to_dict(problem), f, indent=2)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def to_jsonable(value: Any) -> Any:
    """Full-precision JSON form: quaternions become 4-arrays."""
    if isinstance(value, Quaternion):
        return quaternion_to_json(value)
    if isinstance(value, QMatrix):
        return matrix_to_json(value)
    if isinstance(value, QVector):
        return vector_to_json(value)
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def to_text(value: Any, digits: int = 9) -> str:
    """Human form: literals with `digits` significant digits, one matrix row per line."""
    if isinstance(value, Quaternion):
        return format_quaternion(value, digits)
    if isinstance(value, QMatrix):
        cells = [[format_quaternion(q, digits) for q in row] for row in value.entries()]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)
    if isinstance(value, QVector):
        return "(" + ", ".join(format_quaternion(q, digits) for q in value.entries()) + ")"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def render(value: Any, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_jsonable(value))
    return to_text(value)
