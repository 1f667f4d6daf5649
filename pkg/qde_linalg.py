"""
qde_linalg.py - Quaternion QDE Lab
Dense quaternion matrices and vectors, the complex adjoint embedding φ, and
linear solves/inversion over ℍ routed through φ.

Storage: every quaternion array is kept as its two complex halves,
A = A₁ + A₂·j, so that φ(A) = [[A₁, A₂], [−Ā₂, Ā₁]] is a block copy and the
Hamilton product of matrices becomes

    (A₁ + A₂j)(B₁ + B₂j) = (A₁B₁ − A₂B̄₂) + (A₁B₂ + A₂B̄₁)j

since j·z = z̄·j for complex z.
"""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

from qde_config import ZERO_TOL
from qde_errors import DimensionError, SingularMatrixError
from qde_quat import Quaternion, QuaternionLike, as_quaternion, format_quaternion

logger = logging.getLogger("qde")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


# ---------------------------------------------------------------------------
# QVector
# ---------------------------------------------------------------------------


class QVector:
    """Column vector in ℍⁿ; scalars act from the right."""

    __slots__ = ("_c1", "_c2")

    def __init__(self, c1, c2):
        c1 = np.asarray(c1, dtype=complex).reshape(-1)
        c2 = np.asarray(c2, dtype=complex).reshape(-1)
        if c1.shape != c2.shape:
            raise DimensionError(f"complex halves differ in length: {c1.shape} vs {c2.shape}")
        self._c1 = _frozen(c1)
        self._c2 = _frozen(c2)

    @classmethod
    def from_entries(cls, entries: Iterable[QuaternionLike]) -> "QVector":
        qs = [as_quaternion(e) for e in entries]
        return cls([complex(q.w, q.x) for q in qs], [complex(q.y, q.z) for q in qs])

    @classmethod
    def zeros(cls, n: int) -> "QVector":
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def basis(cls, n: int, i: int) -> "QVector":
        c1 = np.zeros(n, dtype=complex)
        c1[i] = 1.0
        return cls(c1, np.zeros(n))

    def __len__(self) -> int:
        return self._c1.shape[0]

    def __getitem__(self, i: int) -> Quaternion:
        return Quaternion.from_pair(self._c1[i], self._c2[i])

    def entries(self) -> List[Quaternion]:
        return [self[i] for i in range(len(self))]

    def complex_parts(self):
        return self._c1.copy(), self._c2.copy()

    def __add__(self, other: "QVector") -> "QVector":
        _check_same_len(self, other)
        return QVector(self._c1 + other._c1, self._c2 + other._c2)

    def __sub__(self, other: "QVector") -> "QVector":
        _check_same_len(self, other)
        return QVector(self._c1 - other._c1, self._c2 - other._c2)

    def __neg__(self) -> "QVector":
        return QVector(-self._c1, -self._c2)

    def scale_right(self, q: QuaternionLike) -> "QVector":
        """v·q, the module action used everywhere for solutions."""
        q1, q2 = as_quaternion(q).pair()
        v1, v2 = self._c1, self._c2
        return QVector(v1 * q1 - v2 * np.conj(q2), v1 * q2 + v2 * np.conj(q1))

    def scale_left(self, q: QuaternionLike) -> "QVector":
        """q·v; only used to show that left scaling is the wrong action."""
        q1, q2 = as_quaternion(q).pair()
        v1, v2 = self._c1, self._c2
        return QVector(q1 * v1 - q2 * np.conj(v2), q1 * v2 + q2 * np.conj(v1))

    def scale_real(self, s: float) -> "QVector":
        return QVector(self._c1 * s, self._c2 * s)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self._c1) ** 2) + np.sum(np.abs(self._c2) ** 2)))

    def almost_equal(self, other: "QVector", tol: float = ZERO_TOL) -> bool:
        if len(self) != len(other):
            return False
        return (self - other).norm() <= tol

    def as_column(self) -> "QMatrix":
        return QMatrix(self._c1.reshape(-1, 1), self._c2.reshape(-1, 1))

    def __repr__(self) -> str:
        return "QVector([" + ", ".join(format_quaternion(q) for q in self.entries()) + "])"


def _check_same_len(a: QVector, b: QVector):
    if len(a) != len(b):
        raise DimensionError(f"vector lengths differ: {len(a)} vs {len(b)}")


# ---------------------------------------------------------------------------
# QMatrix
# ---------------------------------------------------------------------------


class QMatrix:
    """Dense quaternion matrix; immutable once built."""

    __slots__ = ("_c1", "_c2")

    def __init__(self, c1, c2):
        c1 = np.asarray(c1, dtype=complex)
        c2 = np.asarray(c2, dtype=complex)
        if c1.ndim != 2 or c1.shape != c2.shape:
            raise DimensionError(f"complex halves must be equal 2-D shapes: {c1.shape} vs {c2.shape}")
        self._c1 = _frozen(c1)
        self._c2 = _frozen(c2)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[QuaternionLike]]) -> "QMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise DimensionError("matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged matrix rows")
        qs = [[as_quaternion(e) for e in r] for r in rows]
        c1 = [[complex(q.w, q.x) for q in r] for r in qs]
        c2 = [[complex(q.y, q.z) for q in r] for r in qs]
        return cls(c1, c2)

    @classmethod
    def from_columns(cls, columns: Sequence[QVector]) -> "QMatrix":
        columns = list(columns)
        if not columns:
            raise DimensionError("need at least one column")
        n = len(columns[0])
        if any(len(c) != n for c in columns):
            raise DimensionError("columns differ in length")
        return cls(
            np.column_stack([c._c1 for c in columns]),
            np.column_stack([c._c2 for c in columns]),
        )

    @classmethod
    def from_complex_pair(cls, a1, a2) -> "QMatrix":
        """A = A₁ + A₂·j."""
        return cls(a1, a2)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(np.eye(n), np.zeros((n, n)))

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None) -> "QMatrix":
        cols = rows if cols is None else cols
        return cls(np.zeros((rows, cols)), np.zeros((rows, cols)))

    @classmethod
    def diag(cls, entries: Sequence[QuaternionLike]) -> "QMatrix":
        qs = [as_quaternion(e) for e in entries]
        return cls(np.diag([complex(q.w, q.x) for q in qs]), np.diag([complex(q.y, q.z) for q in qs]))

    # ------------------------------------------------------------------

    @property
    def shape(self):
        return self._c1.shape

    @property
    def rows(self) -> int:
        return self._c1.shape[0]

    @property
    def cols(self) -> int:
        return self._c1.shape[1]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion.from_pair(self._c1[i, j], self._c2[i, j])

    def entries(self) -> List[List[Quaternion]]:
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def column(self, j: int) -> QVector:
        return QVector(self._c1[:, j], self._c2[:, j])

    def columns(self) -> List[QVector]:
        return [self.column(j) for j in range(self.cols)]

    def complex_parts(self):
        return self._c1.copy(), self._c2.copy()

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(self._c1 + other._c1, self._c2 + other._c2)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        _check_same_shape(self, other)
        return QMatrix(self._c1 - other._c1, self._c2 - other._c2)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self._c1, -self._c2)

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            return mat_mul(self, other)
        if isinstance(other, QVector):
            return mat_vec(self, other)
        return NotImplemented

    def scale_right(self, q: QuaternionLike) -> "QMatrix":
        q1, q2 = as_quaternion(q).pair()
        a1, a2 = self._c1, self._c2
        return QMatrix(a1 * q1 - a2 * np.conj(q2), a1 * q2 + a2 * np.conj(q1))

    def scale_real(self, s: float) -> "QMatrix":
        return QMatrix(self._c1 * s, self._c2 * s)

    def dagger(self) -> "QMatrix":
        return dagger(self)

    def trace(self) -> Quaternion:
        if not self.is_square():
            raise DimensionError("trace needs a square matrix")
        return Quaternion.from_pair(np.trace(self._c1), np.trace(self._c2))

    def norm(self) -> float:
        """√Σ|aᵢⱼ|², the one norm used in every tolerance statement."""
        return float(np.sqrt(np.sum(np.abs(self._c1) ** 2) + np.sum(np.abs(self._c2) ** 2)))

    def almost_equal(self, other: "QMatrix", tol: float = ZERO_TOL) -> bool:
        if self.shape != other.shape:
            return False
        return (self - other).norm() <= tol

    def is_diagonal(self, tol: float = ZERO_TOL) -> bool:
        off1 = self._c1 - np.diag(np.diag(self._c1))
        off2 = self._c2 - np.diag(np.diag(self._c2))
        return self.is_square() and float(np.sqrt(np.sum(np.abs(off1) ** 2 + np.abs(off2) ** 2))) <= tol

    def __repr__(self) -> str:
        body = "; ".join(", ".join(format_quaternion(q) for q in row) for row in self.entries())
        return f"QMatrix([{body}])"


def _check_same_shape(a: QMatrix, b: QMatrix):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


def mat_mul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    a1, a2 = a._c1, a._c2
    b1, b2 = b._c1, b._c2
    return QMatrix(a1 @ b1 - a2 @ np.conj(b2), a1 @ b2 + a2 @ np.conj(b1))


def mat_vec(a: QMatrix, x: QVector) -> QVector:
    if a.cols != len(x):
        raise DimensionError(f"cannot apply {a.shape} matrix to length-{len(x)} vector")
    a1, a2 = a._c1, a._c2
    x1, x2 = x._c1, x._c2
    return QVector(a1 @ x1 - a2 @ np.conj(x2), a1 @ x2 + a2 @ np.conj(x1))


def dagger(a: QMatrix) -> QMatrix:
    """Conjugate transpose A⁺; conj(c₁ + c₂j) = c̄₁ − c₂j."""
    return QMatrix(np.conj(a._c1).T, -a._c2.T)


def inner(alpha: QVector, beta: QVector) -> Quaternion:
    """(α, β) = Σ conj(aᵢ)·bᵢ."""
    _check_same_len(alpha, beta)
    a1, a2 = alpha._c1, alpha._c2
    b1, b2 = beta._c1, beta._c2
    c1 = np.sum(np.conj(a1) * b1 + a2 * np.conj(b2))
    c2 = np.sum(np.conj(a1) * b2 - a2 * np.conj(b1))
    return Quaternion.from_pair(c1, c2)


# ---------------------------------------------------------------------------
# Complex adjoint
# ---------------------------------------------------------------------------


def phi_mat(a: QMatrix) -> np.ndarray:
    """[[A₁, A₂], [−Ā₂, Ā₁]], a unital ring homomorphism ℍ^{n×m} → ℂ^{2n×2m}."""
    a1, a2 = a._c1, a._c2
    return np.block([[a1, a2], [-np.conj(a2), np.conj(a1)]])


def unphi_mat(c: np.ndarray) -> QMatrix:
    c = np.asarray(c, dtype=complex)
    r, s = c.shape
    if r % 2 or s % 2:
        raise DimensionError(f"adjoint image must have even dimensions, got {c.shape}")
    n, m = r // 2, s // 2
    return QMatrix(c[:n, :m], c[:n, m:])


def phi_vec(v: QVector) -> np.ndarray:
    """φ(v₁ + v₂j) = (v₁; −v̄₂)."""
    return np.concatenate([v._c1, -np.conj(v._c2)])


def unphi_vec(c: np.ndarray) -> QVector:
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.shape[0] % 2:
        raise DimensionError(f"adjoint vector must have even length, got {c.shape[0]}")
    n = c.shape[0] // 2
    return QVector(c[:n], -np.conj(c[n:]))


def phi_vec_star(v: QVector) -> np.ndarray:
    """φ(v)* = (v₂; v̄₁), the adjoint partner of φ(v)."""
    return np.concatenate([v._c2, np.conj(v._c1)])


def star(c: np.ndarray) -> np.ndarray:
    """The * map on adjoint vectors: (c₁; c₂)* = (−c̄₂; c̄₁)."""
    c = np.asarray(c, dtype=complex).reshape(-1)
    n = c.shape[0] // 2
    return np.concatenate([-np.conj(c[n:]), np.conj(c[:n])])


# ---------------------------------------------------------------------------
# Solves
# ---------------------------------------------------------------------------


def gauss_solve(c: np.ndarray, b: np.ndarray, rank_tol: float = ZERO_TOL) -> np.ndarray:
    """
    Solve C·X = B by Gaussian elimination with partial pivoting.
    A pivot at or below rank_tol·(largest row norm) counts as singular.
    """
    a = np.array(c, dtype=complex, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionError(f"gauss_solve needs a square system, got {a.shape}")
    rhs = np.array(b, dtype=complex, copy=True)
    vector_rhs = rhs.ndim == 1
    x = rhs.reshape(n, -1)

    scale = float(np.max(np.linalg.norm(a, axis=1))) if n else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    cut = rank_tol * scale

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= cut:
            raise SingularMatrixError(f"pivot {abs(a[p, k]):.3e} at column {k} is below {cut:.3e}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(f, a[k, k:])
        x[k + 1 :] -= np.outer(f, x[k])

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]

    return x.reshape(-1) if vector_rhs else x


def q_inverse(m: QMatrix, rank_tol: float = ZERO_TOL) -> QMatrix:
    """M⁻¹ = unφ(φ(M)⁻¹), using φ(M⁻¹) = φ(M)⁻¹."""
    if not m.is_square():
        raise DimensionError(f"only square matrices invert, got {m.shape}")
    pm = phi_mat(m)
    inv = gauss_solve(pm, np.eye(pm.shape[0], dtype=complex), rank_tol)
    return unphi_mat(inv)


def q_solve(a: QMatrix, b: QVector, rank_tol: float = ZERO_TOL) -> QVector:
    if not a.is_square():
        raise DimensionError(f"q_solve needs a square matrix, got {a.shape}")
    if a.rows != len(b):
        raise DimensionError(f"right-hand side has length {len(b)}, expected {a.rows}")
    return unphi_vec(gauss_solve(phi_mat(a), phi_vec(b), rank_tol))
