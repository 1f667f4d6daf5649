import math
import time

import numpy as np
import pytest

from qde_errors import DimensionError, SizeCapError
from qde_linalg import QMatrix, QVector, mat_mul, phi_mat
from qde_oracle import cofactor_det, random_matrix, random_vector
from qde_pdet import (
    cycle_normal_form,
    ddet,
    ddet_via_adjoint,
    det_p,
    right_independent,
    wronskian,
)
from qde_quat import Quaternion


def _expansion_2x2(a):
    return a[1, 1] * a[0, 0] - a[1, 0] * a[0, 1]


def _expansion_3x3(a):
    # one term per permutation, cycles led by their largest letter
    return (
        a[2, 2] * a[1, 1] * a[0, 0]
        - a[2, 2] * a[1, 0] * a[0, 1]
        - a[2, 1] * a[1, 2] * a[0, 0]
        + a[2, 1] * a[1, 0] * a[0, 2]
        + a[2, 0] * a[0, 1] * a[1, 2]
        - a[2, 0] * a[0, 2] * a[1, 1]
    )


@pytest.mark.parametrize(
    "perm, cycles, sign",
    [
        ([1, 2, 3], ((3,), (2,), (1,)), 1),
        ([2, 1, 3], ((3,), (2, 1)), -1),
        ([2, 3, 1], ((3, 1, 2),), 1),
        ([3, 1, 2], ((3, 2, 1),), 1),
        ([1, 3, 2], ((3, 2), (1,)), -1),
        ([2, 1, 4, 3], ((4, 3), (2, 1)), 1),
    ],
)
def test_cycle_normal_form(perm, cycles, sign):
    form = cycle_normal_form(perm)
    assert form.cycles == cycles
    assert form.sign == sign


def test_cycle_normal_form_rejects_non_permutations():
    with pytest.raises(ValueError):
        cycle_normal_form([1, 1, 2])
    with pytest.raises(ValueError):
        cycle_normal_form([0, 1])


def test_det_p_matches_hand_expansions(rng):
    start = time.perf_counter()
    for _ in range(100):
        a2, a3 = random_matrix(rng, 2), random_matrix(rng, 3)
        assert det_p(a2).almost_equal(_expansion_2x2(a2), 1e-12)
        assert det_p(a3).almost_equal(_expansion_3x3(a3), 1e-12)
    assert time.perf_counter() - start < 1.0


def test_det_p_keeps_factor_order():
    # a22·a11 and a11·a22 differ for these entries
    a = QMatrix.from_rows([["i", 0], [0, "j"]])
    assert det_p(a) == Quaternion(0, 0, 0, -1)


def test_det_p_agrees_with_cofactors_on_commuting_entries(rng):
    a = QMatrix.from_rows([["1+i", 2, "-i"], ["3i", 1, 0], [0.5, "2-i", 1]])
    assert det_p(a).almost_equal(cofactor_det(a), 1e-12)


def test_det_p_size_cap():
    with pytest.raises(SizeCapError):
        det_p(QMatrix.identity(9))
    with pytest.raises(DimensionError):
        det_p(QMatrix.zeros(2, 3))


def test_ddet_is_multiplicative(rng):
    for _ in range(200):
        a, b = random_matrix(rng, 3), random_matrix(rng, 3)
        da, db, dab = ddet(a), ddet(b), ddet(mat_mul(a, b))
        assert da >= 0.0 and db >= 0.0 and dab >= 0.0
        assert math.isclose(dab, da * db, rel_tol=1e-9, abs_tol=1e-15)


def test_ddet_routes_agree(rng):
    for _ in range(20):
        a = random_matrix(rng, 3)
        assert math.isclose(
            ddet(a, method="permutation"), ddet(a, method="adjoint"), rel_tol=1e-8, abs_tol=1e-14
        )


def test_ddet_beyond_cap_uses_adjoint():
    a = QMatrix.identity(9).scale_real(2.0)
    assert math.isclose(ddet(a), 2.0 ** 18, rel_tol=1e-9)
    with pytest.raises(SizeCapError):
        ddet(a, method="permutation")


def test_ddet_rectangular_and_bad_shapes(rng):
    tall = random_matrix(rng, 3, 2)
    assert ddet(tall) > 0.0
    with pytest.raises(DimensionError):
        ddet(random_matrix(rng, 2, 3))
    with pytest.raises(ValueError):
        ddet(tall, method="guess")


def test_independence_criterion(rng):
    misclassified = 0
    for _ in range(100):
        v1, v2 = random_vector(rng, 3), random_vector(rng, 3)
        alpha, beta = random_vector(rng, 1)[0], random_vector(rng, 1)[0]
        v3 = v1.scale_right(alpha) + v2.scale_right(beta)
        if ddet(QMatrix.from_columns([v1, v2, v3])) > 1e-9:
            misclassified += 1
    for _ in range(100):
        a = random_matrix(rng, 3) + QMatrix.identity(3).scale_real(3.0)
        if ddet(a) <= 1e-6:
            misclassified += 1
    assert misclassified == 0


def test_left_dependent_columns_are_right_independent():
    # (j, -k) = j·(1, i), but no q gives (1, i)·q = (j, -k)
    cols = [QVector.from_entries([1, "i"]), QVector.from_entries(["j", "-k"])]
    assert right_independent(cols)
    assert not right_independent([cols[0], cols[0].scale_right("j")])


def test_right_independent_edge_cases(rng):
    assert right_independent([])
    assert not right_independent([random_vector(rng, 2) for _ in range(3)])
    with pytest.raises(DimensionError):
        right_independent([QVector.zeros(2), QVector.zeros(3)])


def test_wronskian_is_half_ddet(rng):
    m = random_matrix(rng, 3)
    assert math.isclose(wronskian(m), 0.5 * ddet(m), rel_tol=1e-12)
    assert math.isclose(ddet_via_adjoint(QMatrix.identity(4)), 1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_det_p_of_identity(n):
    assert det_p(QMatrix.identity(n)) == Quaternion(1)


@pytest.mark.parametrize("n", [4, 5])
def test_det_p_matches_cofactors_on_complex_matrices(rng, n):
    for _ in range(5):
        c = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = QMatrix.from_complex_pair(c, np.zeros((n, n)))
        d = det_p(a)
        assert d.almost_equal(cofactor_det(a), 1e-9)
        assert d.almost_equal(Quaternion.from_complex(np.linalg.det(c)), 1e-9)


def test_ddet_equals_determinant_of_adjoint(rng):
    worst = 0.0
    for trial in range(1000):
        a = random_matrix(rng, 1 + trial % 4)
        exact = ddet(a, method="permutation")
        via_phi = np.linalg.det(phi_mat(a))
        assert abs(via_phi.imag) <= 1e-12
        worst = max(worst, abs(exact - via_phi.real) / max(exact, 1e-6))
    assert worst <= 1e-8
