"""
qde_system.py - Quaternion QDE Lab
Linear homogeneous systems ẋ = A x over ℍⁿ: fundamental matrices built from
Jordan chains, exp(At) by two independent routes, initial value problems,
diagonal time-varying systems and the Liouville measurement.

Solutions form a right ℍ-module: constants always multiply on the RIGHT of a
solution column, and e^{λt} sits to the right of its vector.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from qde_config import (
    CLUSTER_TOL,
    FD_STEP,
    FD_TOL,
    INDEPENDENCE_TOL,
    RANK_TOL,
    SERIES_TOL,
    ZERO_TOL,
)
from qde_errors import (
    CommutativityError,
    DimensionError,
    InternalConsistencyError,
    NilpotencyError,
)
from qde_linalg import QMatrix, QVector, mat_mul, mat_vec, phi_mat, q_inverse, q_solve, unphi_mat
from qde_oracle import fd_residual
from qde_pdet import ddet, wronskian
from qde_quat import Quaternion, QuaternionLike, as_quaternion, format_quaternion, q_exp
from qde_spectra import full_spectrum

logger = logging.getLogger("qde")

# Taylor terms before exp_series gives up refining (the scaled norm is <= 0.5)
_MAX_TERMS = 60


# ---------------------------------------------------------------------------
# Solution bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuasiPolynomialColumn:
    """x(t) = (Σ_p vector_p · t^p / p!) · e^{λt}."""

    exponent: Quaternion
    coeffs: Tuple[Tuple[int, QVector], ...]

    def __len__(self) -> int:
        return len(self.coeffs[0][1])

    def evaluate(self, t: float) -> QVector:
        acc = QVector.zeros(len(self))
        for power, vec in self.coeffs:
            acc = acc + vec.scale_real(t**power / math.factorial(power))
        return acc.scale_right(q_exp(self.exponent * float(t)))

    def describe(self) -> str:
        terms = " + ".join(f"t^{p}/{p}!·{vec!r}" for p, vec in self.coeffs)
        return f"({terms})·exp({format_quaternion(self.exponent)}·t)"


@dataclass(frozen=True)
class SolutionBasis:
    columns: Tuple[QuasiPolynomialColumn, ...]

    def __len__(self) -> int:
        return len(self.columns)

    def column(self, i: int) -> QuasiPolynomialColumn:
        return self.columns[i]

    def evaluate(self, t: float) -> QMatrix:
        return QMatrix.from_columns([c.evaluate(t) for c in self.columns])

    def at_zero(self) -> QMatrix:
        return self.evaluate(0.0)


def _check_square(a: QMatrix):
    if not a.is_square():
        raise DimensionError(f"expected a square coefficient matrix, got {a.shape}")


def fundamental_matrix(
    a: QMatrix,
    cluster_tol: float = CLUSTER_TOL,
    rank_tol: float = RANK_TOL,
    independence_tol: float = INDEPENDENCE_TOL,
) -> SolutionBasis:
    """One column per chain vector v_l: (v_l + t v_{l−1} + ⋯ + t^{l−1}/(l−1)! v₁)·e^{λt}."""
    _check_square(a)
    spectrum = full_spectrum(a, cluster_tol=cluster_tol, rank_tol=rank_tol, independence_tol=independence_tol)
    columns = []
    for chain in spectrum.chains():
        for l in range(1, len(chain) + 1):
            coeffs = tuple((l - m, chain.vectors[m - 1]) for m in range(l, 0, -1))
            columns.append(QuasiPolynomialColumn(chain.eigenvalue, coeffs))
    basis = SolutionBasis(tuple(columns))
    d0 = ddet(basis.at_zero())
    if d0 <= independence_tol:
        raise InternalConsistencyError(f"fundamental matrix is degenerate at t=0 (ddet = {d0:.3e})")
    logger.info("fundamental matrix: %d columns, ddet(M(0)) = %.6g", len(basis), d0)
    return basis


# ---------------------------------------------------------------------------
# exp(At)
# ---------------------------------------------------------------------------


def exp_series(a: QMatrix, t: float, tol: float = SERIES_TOL) -> QMatrix:
    """Taylor series with scaling and squaring, computed on φ(A·t)."""
    _check_square(a)
    x = phi_mat(a) * float(t)
    norm = a.norm() * abs(float(t))
    squarings = 0
    if norm > 0.5:
        squarings = int(math.ceil(math.log2(norm / 0.5)))
        x = x / (2.0**squarings)

    dim = x.shape[0]
    result = np.eye(dim, dtype=complex)
    term = np.eye(dim, dtype=complex)
    for k in range(1, _MAX_TERMS + 1):
        term = term @ x / k
        result = result + term
        if np.linalg.norm(term) < tol * np.linalg.norm(result):
            break
    for _ in range(squarings):
        result = result @ result
    return unphi_mat(result)


def exp_at(
    a: QMatrix,
    t: float,
    method: str = "eigen",
    basis: Optional[SolutionBasis] = None,
) -> QMatrix:
    """
    exp(At). The "eigen" route assembles M(t)·M(0)⁻¹ from the fundamental
    matrix (pass `basis` to reuse one); "series" is the Taylor oracle.
    """
    _check_square(a)
    if method == "series":
        return exp_series(a, t)
    if method != "eigen":
        raise ValueError(f"unknown exp method {method!r} (expected 'eigen' or 'series')")
    if basis is None:
        basis = fundamental_matrix(a)
    m0_inv = q_inverse(basis.at_zero())
    return mat_mul(basis.evaluate(t), m0_inv)


def _mat_power(m: QMatrix, p: int) -> QMatrix:
    out = QMatrix.identity(m.rows)
    for _ in range(p):
        out = mat_mul(out, m)
    return out


def commuting_split_exp(d: QMatrix, n: QMatrix, t: float, tol: float = ZERO_TOL) -> QMatrix:
    """exp((D+N)t) = exp(Dt)·Σ_{s<n}(Nt)^s/s! for diagonal D, nilpotent N with DN = ND."""
    _check_square(d)
    if d.shape != n.shape:
        raise DimensionError(f"D and N differ in shape: {d.shape} vs {n.shape}")
    if not d.is_diagonal(tol):
        raise DimensionError("D must be diagonal")
    comm = (mat_mul(d, n) - mat_mul(n, d)).norm()
    if comm > tol:
        raise CommutativityError(
            f"D·N != N·D (‖DN − ND‖ = {comm:.3e}); exp((D+N)t) does not split into exp(Dt)·exp(Nt)"
        )
    size = d.rows
    if _mat_power(n, size).norm() > tol:
        raise NilpotencyError(f"N is not nilpotent: ‖N^{size}‖ > {tol:g}")

    exp_d = QMatrix.diag([q_exp(d[i, i] * float(t)) for i in range(size)])
    nt = n.scale_real(float(t))
    series = QMatrix.identity(size)
    term = QMatrix.identity(size)
    for s in range(1, size):
        term = mat_mul(term, nt).scale_real(1.0 / s)
        series = series + term
    return mat_mul(exp_d, series)


# ---------------------------------------------------------------------------
# Initial value problems
# ---------------------------------------------------------------------------


def solve_ivp(a: QMatrix, t0: float, x0: QVector, t: float, method: str = "eigen") -> QVector:
    """x(t) = exp(A(t − t0))·x0."""
    _check_square(a)
    if a.rows != len(x0):
        raise DimensionError(f"x0 has length {len(x0)}, expected {a.rows}")
    if t == t0:
        return x0
    return mat_vec(exp_at(a, t - t0, method=method), x0)


def propagate(basis: SolutionBasis, t0: float, x0: QVector, t: float) -> QVector:
    """x(t) = M(t)·M(t0)⁻¹·x0."""
    if len(basis) != len(x0):
        raise DimensionError(f"x0 has length {len(x0)}, expected {len(basis)}")
    constants = q_solve(basis.evaluate(t0), x0)
    return mat_vec(basis.evaluate(t), constants)


def superpose(basis: SolutionBasis, constants: Sequence[QuaternionLike]) -> Callable[[float], QVector]:
    """x(t) = Σ columnᵢ(t)·rᵢ."""
    rs = [as_quaternion(r) for r in constants]
    if len(rs) != len(basis):
        raise DimensionError(f"need {len(basis)} constants, got {len(rs)}")
    n = len(basis)

    def solution(t: float) -> QVector:
        acc = QVector.zeros(n)
        for col, r in zip(basis.columns, rs):
            acc = acc + col.evaluate(t).scale_right(r)
        return acc

    return solution


def is_fundamental(
    matrix_fn: Union[SolutionBasis, Callable[[float], QMatrix]],
    a: QMatrix,
    ts: Sequence[float],
    independence_tol: float = INDEPENDENCE_TOL,
    fd_tol: float = FD_TOL,
    h: float = FD_STEP,
) -> bool:
    """Every sampled M(t) is right-independent and solves Ṁ = AM."""
    evaluate = matrix_fn.evaluate if hasattr(matrix_fn, "evaluate") else matrix_fn
    for t in ts:
        if ddet(evaluate(t)) <= independence_tol:
            logger.info("not fundamental: ddet(M(%g)) vanishes", t)
            return False
    return fd_residual(matrix_fn, a, ts, h=h) <= fd_tol


# ---------------------------------------------------------------------------
# Diagonal time-varying systems
# ---------------------------------------------------------------------------


class QuatPolynomial:
    """p(t) = Σ c_k t^k with quaternion coefficients (low to high) and real t."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[QuaternionLike]):
        cs = [as_quaternion(c) for c in coeffs] or [Quaternion()]
        self.coeffs = tuple(cs)

    @classmethod
    def constant(cls, q: QuaternionLike) -> "QuatPolynomial":
        return cls([q])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, t: float) -> Quaternion:
        acc = Quaternion()
        for c in reversed(self.coeffs):
            acc = acc * float(t) + c
        return acc

    __call__ = evaluate

    def integrate(self, t0: float = 0.0) -> "QuatPolynomial":
        """Antiderivative P with P(t0) = 0."""
        raw = QuatPolynomial([Quaternion()] + [c * (1.0 / (k + 1)) for k, c in enumerate(self.coeffs)])
        shift = raw.evaluate(t0)
        return QuatPolynomial([raw.coeffs[0] - shift] + list(raw.coeffs[1:]))

    def __mul__(self, other: "QuatPolynomial") -> "QuatPolynomial":
        if not isinstance(other, QuatPolynomial):
            return NotImplemented
        out = [Quaternion()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return QuatPolynomial(out)

    def __sub__(self, other: "QuatPolynomial") -> "QuatPolynomial":
        size = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Quaternion()] * (size - len(self.coeffs))
        b = list(other.coeffs) + [Quaternion()] * (size - len(other.coeffs))
        return QuatPolynomial([x - y for x, y in zip(a, b)])

    def almost_equal(self, other: "QuatPolynomial", tol: float = ZERO_TOL) -> bool:
        return all(c.almost_equal(Quaternion(), tol) for c in (self - other).coeffs)

    def __repr__(self) -> str:
        return "QuatPolynomial([" + ", ".join(format_quaternion(c) for c in self.coeffs) + "])"


def _as_polynomial(p) -> QuatPolynomial:
    if isinstance(p, QuatPolynomial):
        return p
    if isinstance(p, (list, tuple)) and not (len(p) == 4 and all(isinstance(v, (int, float)) for v in p)):
        return QuatPolynomial(p)
    return QuatPolynomial.constant(p)


def solve_diagonal(
    coeffs: Sequence[Union[QuatPolynomial, QuaternionLike, Sequence[QuaternionLike]]],
    t0: float,
    x0: QVector,
    t: float,
    tol: float = ZERO_TOL,
) -> QVector:
    """
    ẋᵢ = aᵢ(t)·xᵢ with xᵢ(t) = exp(∫_{t0}^t aᵢ)·x0ᵢ, valid when every aᵢ(t)
    commutes with its own integral (checked coefficientwise).
    """
    polys = [_as_polynomial(p) for p in coeffs]
    if len(polys) != len(x0):
        raise DimensionError(f"{len(polys)} coefficients for a length-{len(x0)} state")
    out = []
    for i, (a, x) in enumerate(zip(polys, x0.entries())):
        integral = a.integrate(t0)
        if not (a * integral).almost_equal(integral * a, tol):
            raise CommutativityError(
                f"coefficient {i} does not commute with its integral: {a!r}",
                index=i,
            )
        out.append(q_exp(integral.evaluate(t)) * x)
    return QVector.from_entries(out)


# ---------------------------------------------------------------------------
# Liouville
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiouvilleReport:
    factor: float
    max_rel_err: float
    trace_real: float
    samples: Tuple[Tuple[float, float], ...]


def liouville_check(
    a: QMatrix,
    t0: float = 0.0,
    t1: float = 1.0,
    points: int = 11,
    independence_tol: float = INDEPENDENCE_TOL,
) -> LiouvilleReport:
    """
    Fit log(W(t)/W(t0)) = factor·(t − t0)·ℜ tr A over a grid, W the QDE
    Wronskian of the fundamental matrix. factor is nan when ℜ tr A·(t1−t0)
    vanishes (W is then expected to stay constant).
    """
    _check_square(a)
    basis = fundamental_matrix(a)
    ts = np.linspace(t0, t1, points)
    ws = [wronskian(basis.evaluate(float(t))) for t in ts]
    if ws[0] <= independence_tol:
        raise InternalConsistencyError(f"W({t0:g}) = {ws[0]:.3e} is degenerate")

    tr = a.trace().w
    x = (ts - t0) * tr
    y = np.log(np.asarray(ws) / ws[0])
    sxx = float(np.dot(x, x))
    if sxx <= ZERO_TOL:
        factor = float("nan")
        fit = np.zeros_like(y)
    else:
        factor = float(np.dot(x, y) / sxx)
        fit = factor * x
    max_rel_err = float(np.max(np.abs(np.expm1(y - fit))))
    logger.info("liouville: factor %.9g, max rel err %.3e (Re tr A = %.6g)", factor, max_rel_err, tr)
    return LiouvilleReport(
        factor=factor,
        max_rel_err=max_rel_err,
        trace_real=float(tr),
        samples=tuple((float(t), float(w)) for t, w in zip(ts, ws)),
    )
