"""
qde_quat.py - Quaternion QDE Lab
Scalar quaternion arithmetic: Hamilton product, conjugate, modulus, inverse,
exponential, standard form and similarity, plus the literal grammar used by
every problem file ("1-0.5j+2k" or [w, x, y, z]).
"""

import math
import numbers
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from qde_config import ZERO_TOL
from qde_errors import InternalConsistencyError, ProblemFileError, QuaternionDivisionError

# Below this imaginary modulus exp() switches to the series for sin|v|/|v|
_EXP_SERIES_CUTOFF = 1e-8


@dataclass(frozen=True, eq=False)
class Quaternion:
    """q = w + x i + y j + z k with i² = j² = k² = ijk = −1."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_complex(cls, c: complex) -> "Quaternion":
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    @classmethod
    def from_pair(cls, c1: complex, c2: complex) -> "Quaternion":
        """Build c1 + c2·j from the two complex halves."""
        c1, c2 = complex(c1), complex(c2)
        return cls(c1.real, c1.imag, c2.real, c2.imag)

    def to_list(self) -> list:
        return [float(self.w), float(self.x), float(self.y), float(self.z)]

    def pair(self) -> tuple:
        """(c1, c2) with self = c1 + c2·j."""
        return complex(self.w, self.x), complex(self.y, self.z)

    # ------------------------------------------------------------------
    # Parts
    # ------------------------------------------------------------------

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> tuple:
        return (self.x, self.y, self.z)

    def imag_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_real(self, tol: float = ZERO_TOL) -> bool:
        return self.imag_norm() <= tol

    def is_complex(self, tol: float = ZERO_TOL) -> bool:
        return math.hypot(self.y, self.z) <= tol

    def as_complex(self, tol: float = ZERO_TOL) -> complex:
        if not self.is_complex(tol):
            raise ValueError(f"{format_quaternion(self)} has a j/k part")
        return complex(self.w, self.x)

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)
        if isinstance(other, numbers.Real):
            return Quaternion(self.w + other, self.x, self.y, self.z)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)
        if isinstance(other, numbers.Real):
            return Quaternion(self.w - other, self.x, self.y, self.z)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, numbers.Real):
            return Quaternion(other - self.w, -self.x, -self.y, -self.z)
        return NotImplemented

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return q_mul(self, other)
        if isinstance(other, numbers.Real):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        # reals commute with everything
        if isinstance(other, numbers.Real):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            if abs(other) <= 0.0:
                raise QuaternionDivisionError("division of a quaternion by zero")
            return Quaternion(self.w / other, self.x / other, self.y / other, self.z / other)
        # left vs right division is ambiguous for quaternion divisors
        return NotImplemented

    def __abs__(self) -> float:
        return q_norm(self)

    def conj(self) -> "Quaternion":
        return q_conj(self)

    def inv(self, tol: float = ZERO_TOL) -> "Quaternion":
        return q_inv(self, tol)

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def almost_equal(self, other, tol: float = ZERO_TOL) -> bool:
        other = as_quaternion(other)
        return (
            abs(self.w - other.w) <= tol
            and abs(self.x - other.x) <= tol
            and abs(self.y - other.y) <= tol
            and abs(self.z - other.z) <= tol
        )

    def __eq__(self, other):
        if isinstance(other, (Quaternion, numbers.Real)):
            return self.almost_equal(other)
        return NotImplemented

    __hash__ = None

    def __repr__(self) -> str:
        return f"Quaternion({format_quaternion(self)})"

    def __str__(self) -> str:
        return format_quaternion(self)


ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)
ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


QuaternionLike = Union[Quaternion, numbers.Real, complex, str, Sequence[float]]


def as_quaternion(value: QuaternionLike) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, numbers.Real):
        return Quaternion(float(value), 0.0, 0.0, 0.0)
    if isinstance(value, complex):
        return Quaternion.from_complex(value)
    return parse_quaternion(value)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def q_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a·b (order matters)."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def q_conj(q: Quaternion) -> Quaternion:
    return Quaternion(q.w, -q.x, -q.y, -q.z)


def q_norm(q: Quaternion) -> float:
    return math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z)


def q_inv(q: Quaternion, tol: float = ZERO_TOL) -> Quaternion:
    n2 = q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z
    if math.sqrt(n2) <= tol:
        raise QuaternionDivisionError(f"cannot invert {format_quaternion(q)}: |q| <= {tol:g}")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def q_exp(q: Quaternion) -> Quaternion:
    """exp(w + v) = e^w (cos|v| + v/|v| sin|v|)."""
    ew = math.exp(q.w)
    r = q.imag_norm()
    if r < _EXP_SERIES_CUTOFF:
        r2 = r * r
        c = 1.0 - r2 / 2.0 + r2 * r2 / 24.0
        s_over_r = 1.0 - r2 / 6.0 + r2 * r2 / 120.0
    else:
        c = math.cos(r)
        s_over_r = math.sin(r) / r
    k = ew * s_over_r
    return Quaternion(ew * c, k * q.x, k * q.y, k * q.z)


def standardize(lam: Quaternion) -> Quaternion:
    """Similarity-class representative ℜλ + |ℑλ|·i."""
    return Quaternion(lam.w, lam.imag_norm(), 0.0, 0.0)


class Similarity(NamedTuple):
    similar: bool
    witness: Optional[Quaternion]


def _perpendicular_unit(u: tuple) -> tuple:
    # cross u with the axis it is least aligned to
    ax = min(range(3), key=lambda idx: abs(u[idx]))
    e = [0.0, 0.0, 0.0]
    e[ax] = 1.0
    p = (u[1] * e[2] - u[2] * e[1], u[2] * e[0] - u[0] * e[2], u[0] * e[1] - u[1] * e[0])
    n = math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
    return (p[0] / n, p[1] / n, p[2] / n)


def similar(lam: Quaternion, theta: Quaternion, tol: float = ZERO_TOL) -> Similarity:
    """
    Decide whether θ = α⁻¹λα for some nonzero α and, if so, return a witness.

    For non-real λ the witness is α = u + w, where u, w are the unit imaginary
    directions of λ and θ (u·α = α·w); when w = −u any unit α ⟂ u works.
    """
    lam, theta = as_quaternion(lam), as_quaternion(theta)
    if not standardize(lam).almost_equal(standardize(theta), tol):
        return Similarity(False, None)
    if lam.is_real(tol) or lam.almost_equal(theta, tol):
        return Similarity(True, ONE)

    rl, rt = lam.imag_norm(), theta.imag_norm()
    u = (lam.x / rl, lam.y / rl, lam.z / rl)
    w = (theta.x / rt, theta.y / rt, theta.z / rt)
    s = (u[0] + w[0], u[1] + w[1], u[2] + w[2])
    if math.sqrt(s[0] ** 2 + s[1] ** 2 + s[2] ** 2) > 1e-6:
        alpha = Quaternion(0.0, *s)
    else:
        alpha = Quaternion(0.0, *_perpendicular_unit(u))

    check = q_mul(q_mul(q_inv(alpha), lam), alpha)
    if not check.almost_equal(theta, max(tol, 1e-9) * max(1.0, q_norm(lam))):
        raise InternalConsistencyError(
            f"similarity witness failed: {format_quaternion(check)} != {format_quaternion(theta)}"
        )
    return Similarity(True, alpha)


# ---------------------------------------------------------------------------
# Literal grammar
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r"([+-])?"
    r"(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?"
    r"(?:(\*)?([ijk]))?"
)
_SLOT = {"": 0, "i": 1, "j": 2, "k": 3}


def parse_quaternion(value) -> Quaternion:
    """Accepts "1-0.5j+2k", "0.5*j", a bare number, or a 4-array [w, x, y, z]."""
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, bool):
        raise ProblemFileError(f"not a quaternion literal: {value!r}")
    if isinstance(value, numbers.Real):
        return Quaternion(float(value), 0.0, 0.0, 0.0)
    if isinstance(value, (list, tuple)):
        if len(value) != 4 or not all(
            isinstance(v, numbers.Real) and not isinstance(v, bool) for v in value
        ):
            raise ProblemFileError(f"quaternion array must hold 4 numbers: {value!r}")
        return Quaternion(*(float(v) for v in value))
    if not isinstance(value, str):
        raise ProblemFileError(f"not a quaternion literal: {value!r}")

    if re.search(r"[\d.]\s+[\d.]", value):
        raise ProblemFileError(f"malformed quaternion literal: {value!r}")
    text = re.sub(r"\s+", "", value)
    if not text:
        raise ProblemFileError("empty quaternion literal")

    parts = [0.0, 0.0, 0.0, 0.0]
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        sign, num, star, unit = m.groups()
        if m.end() == pos or (num is None and unit is None):
            raise ProblemFileError(f"malformed quaternion literal: {value!r}")
        if pos > 0 and sign is None:
            raise ProblemFileError(f"missing sign between terms in {value!r}")
        if star and num is None:
            raise ProblemFileError(f"'*' without a coefficient in {value!r}")
        coeff = float(num) if num is not None else 1.0
        parts[_SLOT[unit or ""]] += -coeff if sign == "-" else coeff
        pos = m.end()
    return Quaternion(*parts)


def _fmt(v: float, digits: int) -> str:
    s = f"{v:.{digits}g}"
    return "0" if s in ("-0", "0") else s


def format_quaternion(q: Quaternion, digits: int = 9) -> str:
    """Render in the literal grammar with `digits` significant digits."""
    out = []
    for coeff, unit in ((q.w, ""), (q.x, "i"), (q.y, "j"), (q.z, "k")):
        s = _fmt(coeff, digits)
        if s == "0":
            continue
        neg = s.startswith("-")
        mag = s[1:] if neg else s
        if unit and mag == "1":
            mag = ""
        term = mag + unit
        if out:
            out.append(("-" if neg else "+") + term)
        else:
            out.append(("-" if neg else "") + term)
    return "".join(out) if out else "0"
