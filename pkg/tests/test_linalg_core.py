import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_matrix, seeds
from unicellular.exceptions import ConvergenceError, ShapeError
from unicellular.linalg_core import (
    UnitaryWitness,
    adjoint,
    check_matrix,
    eigenvalues,
    kron,
    leading_submatrix,
    mat_mul,
    random_unitary,
    schur,
    spectral_norm,
    spectral_radius,
    trace,
)
from unicellular.similarity import counterexample_pair
from unicellular.toeplitz import UpperToeplitz, ones_nilpotent, shift_matrix


def test_check_matrix_rejects_bad_input():
    with pytest.raises(ShapeError):
        check_matrix(np.zeros((2, 3)))
    with pytest.raises(ShapeError):
        check_matrix(np.zeros((0, 0)))
    with pytest.raises(ValueError):
        check_matrix([[np.nan]])
    assert check_matrix([[1]]).dtype == np.complex128


def test_mat_mul_examples(rng):
    A = random_matrix(rng, 3)
    assert np.array_equal(mat_mul(np.eye(3), A), A)
    E13 = np.zeros((3, 3))
    E13[0, 2] = 1
    assert np.array_equal(mat_mul(shift_matrix(3), shift_matrix(3)), E13)
    assert np.array_equal(mat_mul(ones_nilpotent(3), ones_nilpotent(3)), E13)
    with pytest.raises(ShapeError):
        mat_mul(np.eye(2), np.eye(3))


def test_adjoint_examples(rng):
    D = np.diag([1.0, -2.0, 3.5])
    assert np.array_equal(adjoint(D), D)
    assert np.array_equal(adjoint([[0, 1j], [0, 0]]), np.array([[0, 0], [-1j, 0]]))
    A = random_matrix(rng, 4)
    assert np.array_equal(adjoint(adjoint(A)), A)


def test_kron_examples(rng):
    A = random_matrix(rng, 2)
    blk = np.zeros((4, 4), dtype=complex)
    blk[:2, :2] = blk[2:, 2:] = A
    assert np.array_equal(kron(np.eye(2), A), blk)
    assert np.array_equal(kron(A, np.eye(1)), A)
    E12 = np.array([[0, 1], [0, 0]])
    out = kron(E12, E12)
    assert out[0, 3] == 1 and np.count_nonzero(out) == 1


def test_trace_examples():
    assert trace(np.zeros((3, 3))) == 0
    assert trace(np.eye(5)) == 5
    for n in range(1, 8):
        assert trace(ones_nilpotent(n)) == 0


def test_spectral_norm_examples():
    assert spectral_norm(np.zeros((4, 4))) == 0
    assert spectral_norm([[0, 2.5], [0, 0]]) == pytest.approx(2.5, abs=1e-15)
    A, _ = counterexample_pair(1, 2)
    assert spectral_norm(A) == pytest.approx(2.0, abs=1e-14)
    # golden ratio, from the exact eigenvalues (3 + sqrt 5)/2 of Q*Q
    assert spectral_norm(ones_nilpotent(3)) == pytest.approx(1.6180339887498948, abs=1e-14)


@pytest.mark.parametrize("method", ["svd", "power"])
def test_spectral_norm_methods_agree(rng, method):
    for n in (1, 3, 7, 12):
        A = random_matrix(rng, n)
        ref = np.sqrt(np.linalg.eigvalsh(A.conj().T @ A)[-1])
        assert spectral_norm(A, method=method) == pytest.approx(ref, rel=1e-9)


def test_power_method_reports_non_convergence():
    A = random_matrix(np.random.default_rng(1), 30)
    with pytest.raises(ConvergenceError):
        spectral_norm(A, method="power", max_iter=2)


def test_spectral_radius_examples():
    assert spectral_radius(ones_nilpotent(6)) == pytest.approx(0, abs=1e-6)
    assert spectral_radius(np.diag([1, 2j, -3])) == pytest.approx(3)
    R = UpperToeplitz((2 - 1j, 0.5, 0.3, -0.2)).to_matrix()
    assert spectral_radius(R) == pytest.approx(abs(2 - 1j), abs=1e-10)


def test_eigenvalues_examples(rng):
    T = np.triu(random_matrix(rng, 4))
    assert np.allclose(sorted(eigenvalues(T), key=lambda z: (z.real, z.imag)),
                       sorted(np.diag(T), key=lambda z: (z.real, z.imag)))
    assert np.allclose(eigenvalues(ones_nilpotent(4)), 0, atol=1e-3)
    ev = sorted(eigenvalues([[0, 1], [1, 0]]), key=lambda z: z.real)
    assert np.allclose(ev, [-1, 1])


def test_schur_examples(rng):
    T0 = np.triu(random_matrix(rng, 4))
    np.fill_diagonal(T0, np.sort_complex(np.diag(T0)))
    W, T = schur(T0)
    assert np.allclose(np.abs(W.U), np.eye(4), atol=1e-12)
    H = random_matrix(rng, 5)
    H = H + H.conj().T
    _, T = schur(H)
    assert np.allclose(T, np.diag(np.diag(T)), atol=1e-10)
    assert np.allclose(np.diag(T).imag, 0, atol=1e-12)
    W, T = schur([[0, 0], [1, 0]])
    assert np.allclose(np.abs(T), [[0, 1], [0, 0]], atol=1e-15)
    assert np.allclose(np.abs(W.U), [[0, 1], [1, 0]])


def test_leading_submatrix_examples(rng):
    A = random_matrix(rng, 4)
    assert np.array_equal(leading_submatrix(A, 4), A)
    assert np.array_equal(leading_submatrix(A, 1), A[:1, :1])
    Arh, _ = counterexample_pair(1, 2)
    assert np.array_equal(leading_submatrix(Arh, 2), [[0, 1], [0, 0]])
    with pytest.raises(ShapeError):
        leading_submatrix(A, 5)
    with pytest.raises(ShapeError):
        leading_submatrix(A, 0)


def test_unitary_witness_residual(rng):
    U = random_unitary(6, rng)
    assert UnitaryWitness(U).unitarity_residual < 1e-13
    assert UnitaryWitness.identity(3).unitarity_residual == 0


@given(seeds, st.integers(1, 10))
def test_norm_unitary_and_transpose_invariance(seed, n):
    rng = np.random.default_rng(seed)
    A = random_matrix(rng, n)
    U = random_unitary(n, rng)
    a = spectral_norm(A)
    assert abs(spectral_norm(U.conj().T @ A @ U) - a) <= 1e-10 * (1 + a)
    assert abs(spectral_norm(A.T) - a) <= 1e-10 * (1 + a)


@given(seeds, st.integers(1, 10))
def test_norm_submultiplicative(seed, n):
    rng = np.random.default_rng(seed)
    A, B = random_matrix(rng, n), random_matrix(rng, n)
    assert spectral_norm(A @ B) <= spectral_norm(A) * spectral_norm(B) + 1e-10


@given(seeds, st.integers(1, 12))
def test_norm_matches_hermitian_eigensolver(seed, n):
    A = random_matrix(np.random.default_rng(seed), n)
    top = np.linalg.eigvalsh(A.conj().T @ A)[-1]
    assert spectral_norm(A) ** 2 == pytest.approx(top, rel=1e-9)


@given(seeds, st.integers(1, 12))
def test_schur_round_trip_and_ordering(seed, n):
    A = random_matrix(np.random.default_rng(seed), n)
    W, T = schur(A)
    U = W.U
    assert np.linalg.norm(U @ T @ U.conj().T - A) <= 1e-9 * np.linalg.norm(A)
    assert np.all(np.tril(T, -1) == 0)
    d = np.diag(T)
    keys = list(zip(d.real, d.imag))
    assert keys == sorted(keys)
    assert W.unitarity_residual < 1e-12


def _greedy_match(a, b):
    b = list(b)
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(j)))
    return worst


@given(seeds, st.integers(1, 10))
def test_eigenvalues_similarity_invariant(seed, n):
    rng = np.random.default_rng(seed)
    A = random_matrix(rng, n)
    U = random_unitary(n, rng)
    assert _greedy_match(eigenvalues(A), eigenvalues(U.conj().T @ A @ U)) <= 1e-8
