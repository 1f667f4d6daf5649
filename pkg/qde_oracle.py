"""
qde_oracle.py - Quaternion QDE Lab
Independent ground truth for the solvers: fixed-step RK4 over ℍⁿ, the
central-difference ODE residual, a cofactor determinant for matrices whose
entries commute, and seeded random matrices/vectors for the property gates.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from qde_config import FD_STEP, ZERO_TOL
from qde_errors import CommutativityError, DimensionError
from qde_linalg import QMatrix, QVector, mat_mul, phi_mat, phi_vec, unphi_vec
from qde_quat import Quaternion, q_mul

logger = logging.getLogger("qde")

CoefficientLike = Union[QMatrix, Callable[[float], QMatrix]]


@dataclass(frozen=True)
class IntegrationResult:
    state: QVector
    steps: int
    error_estimate: float


def _rk4_constant(m: np.ndarray, y: np.ndarray, h: float, steps: int) -> np.ndarray:
    # k1..k4 of a linear system fold into one step matrix
    # I + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24
    hm = h * m
    eye = np.eye(m.shape[0], dtype=complex)
    step = eye + hm @ (eye + hm @ (eye / 2.0 + hm @ (eye / 6.0 + hm / 24.0)))
    for _ in range(steps):
        y = step @ y
    return y


def _rk4_varying(a: Callable[[float], QMatrix], t0: float, y: np.ndarray, h: float, steps: int) -> np.ndarray:
    def f(t, v):
        return phi_mat(a(t)) @ v

    t = t0
    for k in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h * k1 / 2)
        k3 = f(t + h / 2, y + h * k2 / 2)
        k4 = f(t + h, y + h * k3)
        y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
        t = t0 + (k + 1) * h
    return y


def _run(a: CoefficientLike, t0: float, y0: np.ndarray, t1: float, steps: int) -> np.ndarray:
    if steps == 0:
        return y0
    h = (t1 - t0) / steps
    if isinstance(a, QMatrix):
        return _rk4_constant(phi_mat(a), y0, h, steps)
    return _rk4_varying(a, t0, y0, h, steps)


def rk4_integrate(
    a: CoefficientLike,
    t0: float,
    x0: QVector,
    t1: float,
    h: float,
    estimate_error: bool = True,
) -> IntegrationResult:
    """
    Classical RK4 for ẋ = A(t) x. `a` is a constant QMatrix or a callable
    t -> QMatrix. The state is carried as φ(x) in ℂ^{2n}, which evolves by
    φ(A). The step is adjusted so (t1 − t0)/h is a whole number of steps.
    With estimate_error the run is repeated at 2h and the Richardson
    estimate ‖x_h − x_{2h}‖/15 is reported.
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    n = a.rows if isinstance(a, QMatrix) else a(t0).rows
    if n != len(x0):
        raise DimensionError(f"x0 has length {len(x0)}, expected {n}")

    steps = int(round(abs(t1 - t0) / h))
    if steps == 0 and t1 != t0:
        steps = 1
    y0 = phi_vec(x0)
    y = _run(a, t0, y0, t1, steps)

    error = 0.0
    if estimate_error and steps >= 2 and steps % 2 == 0:
        coarse = _run(a, t0, y0, t1, steps // 2)
        error = float(np.linalg.norm(y - coarse) / 15.0)
    logger.info("rk4: %d steps over [%g, %g], error estimate %.3e", steps, t0, t1, error)
    return IntegrationResult(state=unphi_vec(y), steps=steps, error_estimate=error)


def _as_matrix(value) -> QMatrix:
    return value.as_column() if isinstance(value, QVector) else value


def fd_residual(basis_or_fn, a: QMatrix, ts: Sequence[float], h: float = FD_STEP) -> float:
    """max over ts of ‖(M(t+h) − M(t−h))/(2h) − A·M(t)‖; M may also return vectors."""
    ts = list(ts)
    if not ts:
        raise ValueError("fd_residual needs at least one sample time")
    evaluate = basis_or_fn.evaluate if hasattr(basis_or_fn, "evaluate") else basis_or_fn
    worst = 0.0
    for t in ts:
        m = _as_matrix(evaluate(t))
        deriv = (_as_matrix(evaluate(t + h)) - _as_matrix(evaluate(t - h))).scale_real(1.0 / (2.0 * h))
        worst = max(worst, (deriv - mat_mul(a, m)).norm())
    return worst


def _ball(rng: np.random.Generator, shape, radius: float) -> np.ndarray:
    # uniform in the 4-ball: random direction, radius ~ U^(1/4)
    g = rng.standard_normal(tuple(shape) + (4,))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return g * (radius * rng.random(tuple(shape)) ** 0.25)[..., None]


def random_matrix(rng: np.random.Generator, rows: int, cols: Optional[int] = None, radius: float = 1.0) -> QMatrix:
    """Entries drawn uniformly from |q| <= radius."""
    g = _ball(rng, (rows, rows if cols is None else cols), radius)
    return QMatrix(g[..., 0] + 1j * g[..., 1], g[..., 2] + 1j * g[..., 3])


def random_vector(rng: np.random.Generator, n: int, radius: float = 1.0) -> QVector:
    g = _ball(rng, (n,), radius)
    return QVector(g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3])


def _commute(p: Quaternion, q: Quaternion, tol: float) -> bool:
    return q_mul(p, q).almost_equal(q_mul(q, p), tol)


def _laplace(rows) -> Quaternion:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Quaternion()
    for j in range(n):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _laplace(minor)
        total = total - term if j % 2 else total + term
    return total


def cofactor_det(a: QMatrix, tol: float = ZERO_TOL) -> Quaternion:
    """Classical Laplace expansion; only meaningful when all entries commute."""
    if not a.is_square():
        raise DimensionError(f"cofactor_det needs a square matrix, got {a.shape}")
    flat = [q for row in a.entries() for q in row]
    for i, p in enumerate(flat):
        for q in flat[i + 1 :]:
            if not _commute(p, q, tol):
                raise CommutativityError(f"entries {p} and {q} do not commute")
    return _laplace(a.entries())
