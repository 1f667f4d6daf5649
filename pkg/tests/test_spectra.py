import numpy as np
import pytest

from qde_errors import ConvergenceError, DimensionError, InternalConsistencyError, SizeCapError
from qde_linalg import QMatrix, QVector, mat_mul, mat_vec, phi_mat, q_inverse
from qde_oracle import random_matrix, random_vector
from qde_pdet import ddet
from qde_quat import ONE, ZERO, I, J, Quaternion, q_inv, q_mul
from qde_spectra import (
    Chain,
    chain_extend,
    complex_eig,
    eigenvectors,
    full_spectrum,
    right_eigenvalues,
)
from qde_system import exp_at, exp_series, fundamental_matrix
from qde_worked import worked_example


def _same_spectrum(got, expected, tol=1e-8):
    assert len(got) == len(expected)
    for (lam, k), (mu, m) in zip(got, expected):
        assert lam.almost_equal(mu, tol), (lam, mu)
        assert k == m


def _eigen_residual(a, v, lam):
    return (mat_vec(a, v) - v.scale_right(lam)).norm()


@pytest.mark.parametrize("name", ["ex52", "ex61", "ex62", "ex63", "ex64"])
def test_worked_spectra(name):
    example = worked_example(name)
    _same_spectrum(right_eigenvalues(example.matrix), example.eigenvalues)


@pytest.mark.parametrize("name", ["ex51", "ex52", "ex61", "ex62", "ex63", "ex64"])
def test_worked_chain_residuals(name):
    a = worked_example(name).matrix
    for chain in full_spectrum(a).chains():
        assert max(chain.residuals(a)) <= 1e-8


def test_complex_eig_diagonal_and_jordan():
    got = complex_eig(np.diag([2.0, 1j, -1.0, 1j]))
    assert [k for _, k in got] == [1, 2, 1]
    assert np.allclose([mu for mu, _ in got], [-1.0, 1j, 2.0])

    jordan = np.array([[1j, 1, 0], [0, 1j, 1], [0, 0, 1j]])
    (mu, k), = complex_eig(jordan)
    assert k == 3
    assert abs(mu - 1j) < 1e-8


def test_complex_eig_matches_numpy(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    got = [mu for mu, _ in complex_eig(m)]
    want = sorted(np.linalg.eigvals(m), key=lambda z: (z.real, z.imag))
    assert np.allclose(got, want, atol=1e-9)


def test_complex_eig_guards(rng):
    with pytest.raises(DimensionError):
        complex_eig(np.zeros((2, 3)))
    with pytest.raises(SizeCapError):
        complex_eig(np.eye(17))
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    with pytest.raises(ConvergenceError) as info:
        complex_eig(m, max_sweeps=1)
    assert len(info.value.partial) < 8


def test_right_eigenvalue_guards():
    with pytest.raises(DimensionError):
        right_eigenvalues(QMatrix.zeros(2, 3))
    with pytest.raises(SizeCapError):
        right_eigenvalues(QMatrix.identity(9))


def test_adjoint_spectrum_comes_in_conjugate_pairs(rng):
    a = random_matrix(rng, 3)
    values = np.linalg.eigvals(phi_mat(a))
    for mu in values:
        assert np.min(np.abs(values - np.conj(mu))) < 1e-8


def test_similarity_invariance(rng):
    a = random_matrix(rng, 3)
    p = random_matrix(rng, 3) + QMatrix.identity(3).scale_real(3.0)
    b = mat_mul(mat_mul(p, a), q_inverse(p))
    _same_spectrum(right_eigenvalues(b), right_eigenvalues(a), tol=1e-7)


def test_diagonal_entries_collapse_to_standard_forms():
    a = QMatrix.diag(["i", "j", 2])
    _same_spectrum(right_eigenvalues(a), [(I, 2), (Quaternion(2), 1)])


def test_eigenvectors_of_triangular_system():
    a = worked_example("ex52").matrix
    (v,) = eigenvectors(a, I)
    assert v.almost_equal(QVector.from_entries([1, 0]), 1e-9)
    (w,) = eigenvectors(a, "1+i")
    assert w.almost_equal(QVector.from_entries([1, 1]), 1e-9)


def test_eigenvectors_for_a_similar_eigenvalue():
    a = worked_example("ex52").matrix
    (v,) = eigenvectors(a, J)
    assert _eigen_residual(a, v, J) <= 1e-9


def test_eigenvectors_of_non_eigenvalue():
    assert eigenvectors(worked_example("ex52").matrix, Quaternion(5)) == []


def test_eigenline_is_closed_under_right_scaling(rng):
    a = worked_example("ex63").matrix
    for lam, _ in right_eigenvalues(a):
        (v,) = eigenvectors(a, lam)
        q = random_vector(rng, 1)[0] + ONE
        theta = q_mul(q_mul(q_inv(q), lam), q)
        assert _eigen_residual(a, v.scale_right(q), theta) <= 1e-8


def test_double_eigenvalue_with_two_eigenvectors():
    a = worked_example("ex61").matrix
    vectors = eigenvectors(a, I)
    assert len(vectors) == 2
    assert ddet(QMatrix.from_columns(vectors)) > 1e-6
    for v in vectors:
        assert _eigen_residual(a, v, I) <= 1e-9


def test_chain_extend_defective_complex():
    example = worked_example("ex62")
    fixture = example.chains[0]
    a = example.matrix
    u = chain_extend(a, fixture.eigenvalue, fixture.head)
    assert u is not None
    for candidate in (u, fixture.next):
        r = mat_vec(a, candidate) - candidate.scale_right(fixture.eigenvalue) - fixture.head
        assert r.norm() <= 1e-8


def test_chain_extend_real_eigenvalue():
    example = worked_example("ex64")
    fixture = example.chains[1]
    u = chain_extend(example.matrix, fixture.eigenvalue, fixture.head)
    assert u is not None
    r = mat_vec(example.matrix, u) - u.scale_right(fixture.eigenvalue) - fixture.head
    assert r.norm() <= 1e-8


def test_chain_extend_outside_range():
    a = worked_example("ex52").matrix
    assert chain_extend(a, I, QVector.from_entries([1, 0])) is None
    assert chain_extend(QMatrix.zeros(2), ZERO, QVector.from_entries([1, 0])) is None


def test_chain_extend_needs_complex_eigenvalue():
    with pytest.raises(ValueError):
        chain_extend(worked_example("ex62").matrix, J, QVector.from_entries([1, 0]))


@pytest.mark.parametrize(
    "name, lengths",
    [("ex51", [3]), ("ex52", [1, 1]), ("ex61", [1, 1]), ("ex62", [2]), ("ex63", [1, 1, 1]), ("ex64", [1, 2])],
)
def test_chain_lengths(name, lengths):
    spectrum = full_spectrum(worked_example(name).matrix)
    assert [len(c) for c in spectrum.chains()] == lengths
    for entry in spectrum.entries:
        assert sum(len(c) for c in entry.chains) == entry.multiplicity


def test_zero_matrix_spectrum():
    spectrum = full_spectrum(QMatrix.zeros(2))
    assert spectrum.multiplicities() == [(ZERO, 2)]
    assert [len(c) for c in spectrum.chains()] == [1, 1]
    assert ddet(spectrum.chain_matrix()) > 0.5


def test_random_spectrum_is_complete(rng):
    for n in (2, 3, 4):
        a = random_matrix(rng, n)
        spectrum = full_spectrum(a)
        assert sum(k for _, k in spectrum.multiplicities()) == n
        assert ddet(spectrum.chain_matrix()) > 1e-9
        for chain in spectrum.chains():
            assert max(chain.residuals(a)) <= 1e-8


@pytest.mark.parametrize("gap", [1e-5, 1e-3, 1e-2])
def test_close_real_eigenvalues_stay_distinct(gap):
    a = QMatrix.diag([1.0, 1.0 + gap])
    _same_spectrum(right_eigenvalues(a), [(Quaternion(1.0), 1), (Quaternion(1.0 + gap), 1)], tol=1e-10)
    assert [len(c) for c in full_spectrum(a).chains()] == [1, 1]
    expected = QMatrix.diag([np.e, np.exp(1.0 + gap)])
    assert exp_at(a, 1.0).almost_equal(expected, 1e-9)


def test_three_close_real_eigenvalues():
    a = QMatrix.diag([1.0, 1.03, 1.06])
    _same_spectrum(right_eigenvalues(a), [(Quaternion(1.0), 1), (Quaternion(1.03), 1), (Quaternion(1.06), 1)])
    basis = fundamental_matrix(a)
    assert len(basis) == 3
    assert exp_at(a, 0.5, basis=basis).almost_equal(exp_series(a, 0.5), 1e-9)


def test_close_eigenvalues_after_similarity(rng):
    p = random_matrix(rng, 2) + QMatrix.identity(2).scale_real(3.0)
    a = mat_mul(mat_mul(p, QMatrix.diag([1.0, 1.001])), q_inverse(p))
    _same_spectrum(right_eigenvalues(a), [(Quaternion(1.0), 1), (Quaternion(1.001), 1)], tol=1e-9)
    assert exp_at(a, 1.0).almost_equal(exp_series(a, 1.0), 1e-8)


def test_close_complex_eigenvalues_stay_distinct():
    a = QMatrix.diag(["i", "1.001j"])
    _same_spectrum(right_eigenvalues(a), [(I, 1), (Quaternion(0, 1.001), 1)])


def test_chain_residual_above_tolerance_raises(monkeypatch):
    monkeypatch.setattr(Chain, "residuals", lambda self, a: [1e-3])
    with pytest.raises(InternalConsistencyError):
        full_spectrum(worked_example("ex52").matrix)


def test_identity_has_two_independent_eigenvectors():
    vectors = eigenvectors(QMatrix.identity(2), 1)
    assert len(vectors) == 2
    assert ddet(QMatrix.from_columns(vectors)) > 0.5


def test_complex_eig_of_rotation_companion():
    # companion matrix of z² + 1
    got = complex_eig(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert [k for _, k in got] == [1, 1]
    assert np.allclose([mu for mu, _ in got], [-1j, 1j])


def test_adjoint_spectrum_with_real_defective_eigenvalue():
    got = complex_eig(phi_mat(worked_example("ex64").matrix))
    assert [k for _, k in got] == [1, 1, 4]
    assert np.allclose([mu for mu, _ in got], [-1j, 1j, 1.0], atol=1e-7)
