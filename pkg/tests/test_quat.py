import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qde_errors import ProblemFileError, QuaternionDivisionError
from qde_quat import (
    ONE,
    ZERO,
    I,
    J,
    K,
    Quaternion,
    format_quaternion,
    parse_quaternion,
    q_conj,
    q_exp,
    q_inv,
    q_mul,
    q_norm,
    similar,
    standardize,
)

coord = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)
quaternions = st.builds(Quaternion, coord, coord, coord, coord)


def test_hamilton_table():
    assert q_mul(I, J) == K
    assert q_mul(J, K) == I
    assert q_mul(K, I) == J
    assert q_mul(J, I) == -K
    for u in (I, J, K):
        assert q_mul(u, u) == -ONE
    assert q_mul(q_mul(I, J), K) == -ONE


@settings(max_examples=200, deadline=None)
@given(quaternions, quaternions, quaternions)
def test_product_is_associative(a, b, c):
    assert q_mul(q_mul(a, b), c).almost_equal(q_mul(a, q_mul(b, c)), 1e-9)


@settings(max_examples=200, deadline=None)
@given(quaternions, quaternions)
def test_norm_is_multiplicative(a, b):
    assert math.isclose(q_norm(q_mul(a, b)), q_norm(a) * q_norm(b), rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=200, deadline=None)
@given(quaternions)
def test_inverse(q):
    if q_norm(q) < 1e-3:
        return
    assert q_mul(q, q_inv(q)).almost_equal(ONE, 1e-9)
    assert q_mul(q_inv(q), q).almost_equal(ONE, 1e-9)


def test_inverse_of_zero_raises():
    with pytest.raises(QuaternionDivisionError):
        q_inv(ZERO)


def test_exp_of_pure_imaginary_unit():
    assert q_exp(J * math.pi).almost_equal(-ONE, 1e-12)
    assert q_exp(Quaternion(1.0)).almost_equal(Quaternion(math.e), 1e-12)
    assert q_exp(ZERO) == ONE


def test_exp_small_imaginary_part_is_continuous():
    q = Quaternion(0.5, 1e-10, 0.0, 0.0)
    assert q_exp(q).almost_equal(Quaternion(math.exp(0.5), math.exp(0.5) * 1e-10), 1e-15)


def test_standard_form():
    assert standardize(Quaternion(1.0, 0.0, 3.0, 4.0)) == Quaternion(1.0, 5.0)
    assert standardize(-I) == I


@pytest.mark.parametrize(
    "lam, theta",
    [(I, J), (I, K), (J, -J), (Quaternion(1, 1, 1, 1), Quaternion(1, 0, 0, math.sqrt(3))), (I, -I)],
)
def test_similarity_witness(lam, theta):
    result = similar(lam, theta)
    assert result.similar
    alpha = result.witness
    assert q_mul(q_mul(q_inv(alpha), lam), alpha).almost_equal(theta, 1e-9)


def test_similarity_rejects_different_classes():
    assert similar(I, Quaternion(0, 2, 0, 0)) == (False, None)
    assert not similar(Quaternion(1, 1), I).similar


def test_one_plus_ijk_maps_i_to_k_not_j():
    # α⁻¹ i α with α = 1+i+j+k cycles i -> k, so it is not a witness for i ~ j
    alpha = Quaternion(1, 1, 1, 1)
    assert q_mul(q_mul(q_inv(alpha), I), alpha) == K
    assert q_mul(q_mul(q_inv(alpha), I), alpha) != J


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1-0.5j+2k", Quaternion(1, 0, -0.5, 2)),
        ("i", I),
        ("-k", -K),
        ("0.5*j", Quaternion(0, 0, 0.5, 0)),
        ("  3 + 4i ", Quaternion(3, 4)),
        ("1e-3i", Quaternion(0, 1e-3)),
        ([1, 2, 3, 4], Quaternion(1, 2, 3, 4)),
        (2, Quaternion(2)),
    ],
)
def test_parse(text, expected):
    assert parse_quaternion(text) == expected


@pytest.mark.parametrize("bad", ["", "1 2", "ij", "2x", "*j", [1, 2, 3], True, None, "1+"])
def test_parse_rejects(bad):
    with pytest.raises(ProblemFileError):
        parse_quaternion(bad)


@settings(max_examples=100, deadline=None)
@given(quaternions)
def test_format_parses_back(q):
    assert parse_quaternion(format_quaternion(q, 17)).almost_equal(q, 1e-12)


def test_format_drops_zero_parts():
    assert format_quaternion(Quaternion(0, 1, 0, -1)) == "i-k"
    assert format_quaternion(ZERO) == "0"
    assert format_quaternion(Quaternion(-0.5, 0, 0, 0)) == "-0.5"


def _taylor_exp(q: Quaternion, terms: int) -> Quaternion:
    total = term = ONE
    for k in range(1, terms):
        term = q_mul(term, q) / k
        total = total + term
    return total


@settings(max_examples=200, deadline=None)
@given(quaternions)
def test_exp_matches_taylor_series(q):
    if q_norm(q) > 3.0:
        q = q * (3.0 / q_norm(q))
    assert q_exp(q).almost_equal(_taylor_exp(q, 40), 1e-12)


def test_exp_of_j_times_t():
    q = J * 0.7
    expected = Quaternion(math.cos(0.7), 0.0, math.sin(0.7), 0.0)
    assert q_exp(q).almost_equal(expected, 1e-14)
    assert q_exp(q).almost_equal(_taylor_exp(q, 30), 1e-14)


@settings(max_examples=200, deadline=None)
@given(quaternions, quaternions)
def test_real_part_of_product_is_symmetric(a, b):
    assert math.isclose(q_mul(a, b).real, q_mul(b, a).real, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=200, deadline=None)
@given(quaternions, quaternions)
def test_conjugate_reverses_products(p, q):
    assert q_conj(q_mul(p, q)).almost_equal(q_mul(q_conj(q), q_conj(p)), 1e-12)
    assert q_conj(q_conj(q)) == q


@settings(max_examples=200, deadline=None)
@given(quaternions)
def test_norm_squared_is_product_with_conjugate(q):
    n2 = Quaternion(q_norm(q) ** 2)
    assert q_mul(q, q_conj(q)).almost_equal(n2, 1e-12)
    assert q_mul(q_conj(q), q).almost_equal(n2, 1e-12)


@settings(max_examples=200, deadline=None)
@given(quaternions, quaternions)
def test_standard_form_is_a_class_invariant(lam, alpha):
    s = standardize(lam)
    assert standardize(s) == s
    if q_norm(alpha) < 1e-3:
        return
    conjugated = q_mul(q_mul(q_inv(alpha), lam), alpha)
    assert standardize(conjugated).almost_equal(s, 1e-9)


@pytest.mark.parametrize("lam, expected", [(J, I), (Quaternion(3), Quaternion(3)), (Quaternion(1, -2), Quaternion(1, 2))])
def test_standard_form_examples(lam, expected):
    assert standardize(lam) == expected
