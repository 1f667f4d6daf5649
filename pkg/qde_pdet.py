"""
qde_pdet.py - Quaternion QDE Lab
Permutation determinant over cycle normal forms, the double determinant,
the QDE Wronskian and the right-independence test.

Normal form: every cycle starts with its largest letter and the leading
letters strictly decrease, σ = (n₁ i₂ … i_s)(n₂ …)…(n_r …) with
n = n₁ > n₂ > … > n_r. The term for σ is ε(σ)·⟨σ₁⟩⟨σ₂⟩…⟨σ_r⟩ where
⟨(c₁ c₂ … c_s)⟩ = a_{c₁c₂} a_{c₂c₃} … a_{c_s c₁}, multiplied strictly in
that order, and ε(σ) = (−1)^{n−r}.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from qde_config import INDEPENDENCE_TOL, PERMUTATION_CAP
from qde_errors import DimensionError, InternalConsistencyError, SizeCapError
from qde_linalg import QMatrix, QVector, dagger, mat_mul, phi_mat
from qde_quat import Quaternion

logger = logging.getLogger("qde")

# slack allowed on the imaginary residue / negativity of det_p(A⁺A)
_REALITY_TOL = 1e-9


@dataclass(frozen=True)
class CycleNormalForm:
    cycles: Tuple[Tuple[int, ...], ...]
    sign: int


def _cycles0(perm: Sequence[int]) -> list:
    """Normal-form cycles of a 0-based one-line permutation."""
    n = len(perm)
    seen = [False] * n
    cycles = []
    for start in range(n - 1, -1, -1):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        nxt = perm[start]
        while nxt != start:
            cyc.append(nxt)
            seen[nxt] = True
            nxt = perm[nxt]
        cycles.append(cyc)
    return cycles


def cycle_normal_form(perm: Sequence[int]) -> CycleNormalForm:
    """
    `perm` is one-line notation on {1..n}: perm[i-1] = σ(i).
    e.g. [2, 3, 1] is the 3-cycle (3 1 2).
    """
    n = len(perm)
    try:
        values = [int(p) for p in perm]
    except (TypeError, ValueError) as e:
        raise ValueError(f"invalid permutation {perm!r}") from e
    if sorted(values) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {list(perm)!r}")
    cycles = _cycles0([v - 1 for v in values])
    return CycleNormalForm(
        cycles=tuple(tuple(c + 1 for c in cyc) for cyc in cycles),
        sign=-1 if (n - len(cycles)) % 2 else 1,
    )


def _hmul(a: tuple, b: tuple) -> tuple:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def det_p(a: QMatrix, cap: int = PERMUTATION_CAP) -> Quaternion:
    """Σ_σ ε(σ)·⟨σ₁⟩⋯⟨σ_r⟩ over S_n, permutations visited in lexicographic order."""
    if not a.is_square():
        raise DimensionError(f"det_p needs a square matrix, got {a.shape}")
    n = a.rows
    if n > cap:
        raise SizeCapError(f"det_p enumerates {n}! permutations; cap is n <= {cap}")

    entries = [[tuple(q.to_list()) for q in row] for row in a.entries()]
    total = [0.0, 0.0, 0.0, 0.0]
    for perm in itertools.permutations(range(n)):
        cycles = _cycles0(perm)
        prod = (1.0, 0.0, 0.0, 0.0)
        for cyc in cycles:
            s = len(cyc)
            for idx in range(s):
                prod = _hmul(prod, entries[cyc[idx]][cyc[(idx + 1) % s]])
        if (n - len(cycles)) % 2:
            total[0] -= prod[0]
            total[1] -= prod[1]
            total[2] -= prod[2]
            total[3] -= prod[3]
        else:
            total[0] += prod[0]
            total[1] += prod[1]
            total[2] += prod[2]
            total[3] += prod[3]
    return Quaternion(*total)


def ddet_via_adjoint(a: QMatrix) -> float:
    """√det φ(A⁺A); for square A this equals det φ(A)."""
    d = np.linalg.det(phi_mat(mat_mul(dagger(a), a)))
    return math.sqrt(max(float(d.real), 0.0))


def ddet(a: QMatrix, method: str = "auto", cap: int = PERMUTATION_CAP) -> float:
    """
    Double determinant det_p(A⁺A) of an n×m matrix (n ≥ m).

    method: "permutation" (always det_p), "adjoint" (φ route) or "auto"
    (det_p up to the size cap, the φ route beyond it).
    """
    if a.rows < a.cols:
        raise DimensionError(f"ddet needs rows >= cols, got {a.shape}")
    if method not in ("auto", "permutation", "adjoint"):
        raise ValueError(f"unknown ddet method {method!r}")
    if method == "adjoint" or (method == "auto" and a.cols > cap):
        return ddet_via_adjoint(a)

    h = mat_mul(dagger(a), a)
    value = det_p(h, cap)
    # Hadamard bound for a Hermitian PSD matrix sets the magnitude scale
    scale = max(1.0, abs(value.w), float(np.prod([h[i, i].w for i in range(h.rows)])))
    residue = value.imag_norm()
    if residue > _REALITY_TOL * scale:
        raise InternalConsistencyError(
            f"ddet has imaginary residue {residue:.3e} (scale {scale:.3e})"
        )
    if value.w < -_REALITY_TOL * scale:
        raise InternalConsistencyError(f"ddet came out negative: {value.w:.3e}")
    return float(value.w)


def wronskian(m: QMatrix, method: str = "auto") -> float:
    """W = ½·ddet(M)."""
    if not m.is_square():
        raise DimensionError(f"wronskian needs a square matrix, got {m.shape}")
    return 0.5 * ddet(m, method=method)


def right_independent(vectors: Sequence[QVector], tol: float = INDEPENDENCE_TOL) -> bool:
    vectors = list(vectors)
    if not vectors:
        return True
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise DimensionError("vectors differ in length")
    if len(vectors) > n:
        return False
    return ddet(QMatrix.from_columns(vectors)) > tol
