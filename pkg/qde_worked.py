"""
qde_worked.py - Quaternion QDE Lab
The six hand-worked systems, with the closed forms printed for them in the
literature. A printed form is only trusted after the gates (ODE residual and,
for exp(At), exp(0) = I) pass; the ones that fail are kept with status
"discrepancy" and a note saying which gate and which entry.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from qde_linalg import QMatrix, QVector
from qde_quat import ONE, ZERO, I, J, K, Quaternion, QuaternionLike, as_quaternion, q_exp

VERIFIED = "verified"
DISCREPANCY = "discrepancy"


@dataclass(frozen=True)
class PrintedForm:
    kind: str  # "fundamental" or "exp"
    evaluate: Callable[[float], QMatrix]
    status: str = VERIFIED
    note: str = ""


@dataclass(frozen=True)
class ChainFixture:
    """A printed eigenvector v and, when given, the next chain vector u (A u − u λ = v)."""

    eigenvalue: Quaternion
    head: QVector
    next: Optional[QVector] = None


@dataclass(frozen=True)
class WorkedExample:
    name: str
    title: str
    matrix: QMatrix
    eigenvalues: Tuple[Tuple[Quaternion, int], ...]
    printed: Tuple[PrintedForm, ...] = ()
    chains: Tuple[ChainFixture, ...] = ()
    vectors: Optional[QMatrix] = None

    def printed_form(self, kind: str) -> Optional[PrintedForm]:
        return next((p for p in self.printed if p.kind == kind), None)


def _e(q: QuaternionLike, t: float) -> Quaternion:
    return q_exp(as_quaternion(q) * float(t))


def _q(text: str) -> Quaternion:
    return as_quaternion(text)


# ---------------------------------------------------------------------------
# Catalogue
# ---------------------------------------------------------------------------


def _jordan_block(lam: QuaternionLike = "i", size: int = 3) -> WorkedExample:
    lam = as_quaternion(lam)
    rows = [[lam if r == c else (ONE if c == r + 1 else ZERO) for c in range(size)] for r in range(size)]

    def printed(t):
        el = _e(lam, t)
        return QMatrix.from_rows(
            [
                [el * (t ** (c - r) / math.factorial(c - r)) if c >= r else ZERO for c in range(size)]
                for r in range(size)
            ]
        )

    std = Quaternion(lam.w, lam.imag_norm())
    return WorkedExample(
        name="ex51",
        title=f"Jordan block of size {size} at {lam}",
        matrix=QMatrix.from_rows(rows),
        eigenvalues=((std, size),),
        printed=(PrintedForm("exp", printed),),
    )


def _ex52() -> WorkedExample:
    def printed(t):
        return QMatrix.from_rows([[_e(I, t), _e("1+i", t)], [ZERO, _e("1+i", t)]])

    return WorkedExample(
        name="ex52",
        title="triangular system with distinct eigenvalues i and 1+i",
        matrix=QMatrix.from_rows([["i", 1], [0, "1+i"]]),
        eigenvalues=((I, 1), (_q("1+i"), 1)),
        printed=(PrintedForm("fundamental", printed),),
        chains=(
            ChainFixture(I, QVector.from_entries([1, 0])),
            ChainFixture(_q("1+i"), QVector.from_entries([1, 1])),
        ),
    )


def _ex61() -> WorkedExample:
    def printed(t):
        ej = _e(J, t)
        return QMatrix.from_rows([[ej, (K * -0.5) * ej], [ZERO, ej]])

    return WorkedExample(
        name="ex61",
        title="double eigenvalue j with two independent eigenvectors",
        matrix=QMatrix.from_rows([["j", "i"], [0, "j"]]),
        eigenvalues=((I, 2),),
        printed=(PrintedForm("fundamental", printed),),
        chains=(
            ChainFixture(J, QVector.from_entries([1, 0])),
            ChainFixture(J, QVector.from_entries(["-0.5k", 1])),
        ),
        vectors=QMatrix.from_rows([[1, "-0.5k"], [0, 1]]),
    )


def _ex62() -> WorkedExample:
    v = QVector.from_entries([1, 0])
    u = QVector.from_entries(["-0.5j", "1+k"])

    def printed_fundamental(t):
        ei = _e(I, t)
        return QMatrix.from_rows([[ei, (_q("-0.5j") + t) * ei], [ZERO, _q("1+k") * ei]])

    def printed_exp(t):
        ei = _e(I, t)
        quarter = _q("-i+j") * 0.25
        e12 = ei * (_q("1-k") * 0.5) - (_q("0.5j") - t) * ei * quarter
        e22 = _q("1+k") * ei * quarter
        return QMatrix.from_rows([[ei, e12], [ZERO, e22]])

    return WorkedExample(
        name="ex62",
        title="eigenvalues i and j (similar), one chain of length 2",
        matrix=QMatrix.from_rows([["i", 1], [0, "j"]]),
        eigenvalues=((I, 2),),
        printed=(
            PrintedForm("fundamental", printed_fundamental),
            PrintedForm(
                "exp",
                printed_exp,
                DISCREPANCY,
                "exp(A·0) != I: entry (2,2) evaluates to -0.5i at t = 0",
            ),
        ),
        chains=(ChainFixture(I, v, u),),
    )


def _ex63() -> WorkedExample:
    half = _q("0.5+0.5i")

    def printed_fundamental(t):
        a, et = _e("1+i", t), math.exp(t)
        return QMatrix.from_rows(
            [
                [_q("-j"), a, half * et],
                [_q("-i"), _q("-j") * a, (half - J) * et],
                [ZERO, ZERO, -half * et],
            ]
        )

    def printed_exp(t):
        et = math.exp(t)
        alpha = _e("1+i", t)
        beta = alpha * (_q("j-k") * 0.5)
        gamma = _q("1+i+j-k") * 0.5
        delta = alpha * (_q("1-i+j-k") * 0.5)
        return QMatrix.from_rows(
            [
                [_q("0.5-0.5i") + half * alpha, _q("-0.5j+0.5k") + beta, J * gamma + delta - et],
                [
                    _q("0.5j-0.5k") - _q("0.5j-0.5k") * alpha,
                    _q("0.5-0.5i") - J * beta,
                    I * gamma - J * delta - _q("1-j-k") * et,
                ],
                [ZERO, ZERO, Quaternion(et)],
            ]
        )

    return WorkedExample(
        name="ex63",
        title="three distinct standard eigenvalues 0, 1+i and 1",
        matrix=QMatrix.from_rows([["i", "j", "j"], ["k", 1, "k"], [0, 0, 1]]),
        eigenvalues=((ZERO, 1), (ONE, 1), (_q("1+i"), 1)),
        printed=(
            PrintedForm("fundamental", printed_fundamental),
            PrintedForm(
                "exp",
                printed_exp,
                DISCREPANCY,
                "exp(A·0) != I: entry (1,3) evaluates to -1-i+j-k at t = 0",
            ),
        ),
        chains=(
            ChainFixture(ZERO, QVector.from_entries(["-j", "-i", 0])),
            ChainFixture(_q("1+i"), QVector.from_entries([1, "-j", 0])),
            ChainFixture(ONE, QVector.from_entries(["0.5+0.5i", "0.5+0.5i-j", "-0.5-0.5i"])),
        ),
    )


def _ex64() -> WorkedExample:
    v2 = QVector.from_entries(["i", "1-j", 0])
    u = QVector.from_entries(["1-i", "-1-2i", "-i-k"])

    def printed_fundamental(t):
        ei, et = _e(I, t), math.exp(t)
        return QMatrix.from_rows(
            [
                [_q("-i-j") * ei, I * et, (_q("1-i") + I * t) * et],
                [ZERO, _q("1-j") * et, (_q("1-2i") - _q("i+k") * t) * et],
                [ZERO, ZERO, _q("-i-k") * et],
            ]
        )

    def printed_exp(t):
        et = math.exp(t)
        alpha = -(_q("i+j") * _e(I, t))
        return QMatrix.from_rows(
            [
                [
                    alpha * (_q("i+j") * 0.5),
                    alpha * (_q("1-i+j+k") * 0.25) + _q("0.5i+0.5k") * et,
                    alpha * (_q("1+0.5i-0.5j")) + (_q("0.5i+0.5j-0.5k") - (ONE + J) * (0.5 * t)) * et,
                ],
                [ZERO, Quaternion(et), K * (t * et)],
                [ZERO, ZERO, Quaternion(et)],
            ]
        )

    return WorkedExample(
        name="ex64",
        title="eigenvalue i and a 4-fold real eigenvalue 1 with a chain of length 2",
        matrix=QMatrix.from_rows([["j", "k", "i"], [0, 1, "k"], [0, 0, 1]]),
        eigenvalues=((I, 1), (ONE, 2)),
        printed=(
            PrintedForm(
                "fundamental",
                printed_fundamental,
                DISCREPANCY,
                "column 3 fails the ODE: its row 2 reads 1-2i-(i+k)t where u + v·t gives -1-2i+(1-j)t",
            ),
            PrintedForm(
                "exp",
                printed_exp,
                DISCREPANCY,
                "exp(A·0) != I: entry (1,3) evaluates to -0.5i-0.5j+0.5k at t = 0",
            ),
        ),
        chains=(
            ChainFixture(I, QVector.from_entries(["-i-j", 0, 0])),
            ChainFixture(ONE, v2, u),
        ),
    )


_CATALOGUE = {
    "ex51": _jordan_block,
    "ex52": _ex52,
    "ex61": _ex61,
    "ex62": _ex62,
    "ex63": _ex63,
    "ex64": _ex64,
}


def worked_names() -> List[str]:
    return list(_CATALOGUE)


def worked_example(name: str, **params) -> WorkedExample:
    """`params` only applies to ex51 (lam, size)."""
    try:
        build = _CATALOGUE[name]
    except KeyError:
        raise KeyError(f"unknown worked example {name!r}; choose from {', '.join(_CATALOGUE)}") from None
    return build(**params)
