"""
qde_workbench.py - Quaternion QDE Lab
Helpers behind the Streamlit page: the (value, error_code) safe wrapper,
table builders and persistence of the last gate report. Nothing here
imports streamlit, so it can be tested on its own.
"""

import json
import logging
import os
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from qde_errors import ProblemFileError, QDEError
from qde_linalg import QMatrix
from qde_quat import format_quaternion
from qde_spectra import Spectrum
from qde_system import SolutionBasis

logger = logging.getLogger("qde")

LAST_CHECK_FILE = "qde_last_check.json"


def safe_run(fn: Callable, *args, **kwargs) -> Tuple[Any, Optional[str]]:
    """
    Returns (value, error_code)
    error_code is None on success, else 'bad_input', 'numerical' or 'unknown'
    """
    try:
        return (fn(*args, **kwargs), None)
    except ProblemFileError as e:
        logger.error("bad input in %s: %s", getattr(fn, "__name__", fn), repr(e))
        return (str(e), "bad_input")
    except (QDEError, np.linalg.LinAlgError) as e:
        logger.error("numerical failure in %s: %s", getattr(fn, "__name__", fn), repr(e))
        return (str(e), "numerical")
    except Exception as e:
        logger.error("unexpected failure in %s: %s", getattr(fn, "__name__", fn), repr(e))
        return (repr(e), "unknown")


# -----------------------------
# Tables
# -----------------------------


def matrix_rows(m: QMatrix, digits: int = 6) -> List[Dict[str, str]]:
    return [
        {f"col {j + 1}": format_quaternion(q, digits) for j, q in enumerate(row)}
        for row in m.entries()
    ]


def spectrum_rows(spectrum: Spectrum, digits: int = 6) -> List[Dict[str, Any]]:
    rows = []
    for e in spectrum.entries:
        for k, chain in enumerate(e.chains, 1):
            rows.append(
                {
                    "eigenvalue": format_quaternion(e.eigenvalue, digits),
                    "multiplicity": e.multiplicity,
                    "chain": k,
                    "vectors": "; ".join(
                        "(" + ", ".join(format_quaternion(q, digits) for q in v.entries()) + ")"
                        for v in chain.vectors
                    ),
                }
            )
    return rows


def basis_rows(basis: SolutionBasis, digits: int = 6) -> List[Dict[str, Any]]:
    rows = []
    for k, col in enumerate(basis.columns, 1):
        for power, vec in col.coeffs:
            rows.append(
                {
                    "column": k,
                    "exponent": format_quaternion(col.exponent, digits),
                    "power": power,
                    "vector": "(" + ", ".join(format_quaternion(q, digits) for q in vec.entries()) + ")",
                }
            )
    return rows


def gate_rows(results) -> List[Dict[str, Any]]:
    return [
        {
            "system": r.system,
            "gate": r.gate,
            "value": f"{r.value:.3e}",
            "limit": f"{r.limit:.0e}",
            "status": r.status,
        }
        for r in results
    ]


# -----------------------------
# Last-check persistence
# -----------------------------


def _last_check_default() -> dict:
    return {"problem": "", "rows": [], "failed": 0}


def load_last_check(path: str = LAST_CHECK_FILE) -> dict:
    d = _last_check_default()
    try:
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                raw = json.load(f)
            if isinstance(raw, dict):
                for k in d.keys():
                    if k in raw:
                        d[k] = raw[k]
    except Exception as e:
        logger.error("Failed to load last check: %s", repr(e))
    return d


def save_last_check(problem: str, rows: List[Dict[str, Any]], path: str = LAST_CHECK_FILE):
    try:
        d = {"problem": problem, "rows": rows, "failed": sum(1 for r in rows if r["status"] == "FAIL")}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(d, f)
    except Exception as e:
        logger.error("Failed to save last check: %s", repr(e))
