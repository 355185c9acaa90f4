import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import seeds
from unicellular.exceptions import HypothesisError, ShapeError
from unicellular.invariants import PolynomialFamily, norms_match, specht_test
from unicellular.linalg_core import random_unitary
from unicellular.poly import Polynomial
from unicellular.similarity import (
    canonical_form,
    counterexample_pair,
    decide_unitary_similarity,
    is_unicellular,
    principal_norm_profile,
    random_unicellular,
    separating_query,
    unicellular_triangularize,
)
from unicellular.toeplitz import ones_nilpotent


def test_is_unicellular_examples():
    for n in range(1, 9):
        assert is_unicellular(ones_nilpotent(n))
    assert not is_unicellular(np.zeros((2, 2)))
    assert not is_unicellular(np.diag([1.0, 2.0]))
    A, Ap = counterexample_pair(1, 2)
    assert is_unicellular(A) and is_unicellular(Ap)
    J = np.diag([1.0, 1.0, 0.0], 1)  # blocks of sizes 3 and 1
    assert not is_unicellular(J)


def test_is_unicellular_after_unitary_conjugation(rng):
    for n in range(2, 9):
        A, _ = random_unicellular(n, rng)
        assert is_unicellular(A)


def test_triangularize(rng):
    A, T0 = random_unicellular(6, rng, lam=2 - 1j)
    U, T, dep = unicellular_triangularize(A)
    assert np.allclose(U.conj().T @ U, np.eye(6), atol=1e-13)
    assert np.linalg.norm(U @ T @ U.conj().T - A) <= 1e-12 * np.linalg.norm(A)
    assert np.allclose(np.diag(T), 2 - 1j, atol=1e-10)
    assert dep < 1e-12


def test_canonical_form_examples():
    A = np.array([[0, -1, 5], [0, 0, 1j], [0, 0, 0]])
    W, C = canonical_form(A)
    assert np.array_equal(np.diag(C, 1), [1, 1])
    assert np.allclose(W.U.conj().T @ A @ W.U, C)
    assert W.U[0, 0] == 1
    B = np.array([[1, 2, 3j], [0, 1, 0.5], [0, 0, 1]])
    W, C = canonical_form(B)
    assert np.array_equal(W.U, np.eye(3)) and np.array_equal(C, B)
    _, Ap = counterexample_pair(1, 2)
    W, C = canonical_form(Ap)
    assert np.array_equal(W.U, np.eye(3)) and np.array_equal(C, Ap)


def test_canonical_form_errors():
    with pytest.raises(HypothesisError):
        canonical_form(np.array([[0, 0, 1], [0, 0, 1], [0, 0, 0]]))
    with pytest.raises(HypothesisError):
        canonical_form(np.ones((2, 2)))


@given(seeds, st.integers(2, 8))
def test_canonical_form_idempotent(seed, n):
    A, _ = random_unicellular(n, np.random.default_rng(seed))
    _, C = canonical_form(A, upper_triangular=False)
    W2, C2 = canonical_form(C)
    assert np.array_equal(C2, C)
    assert np.array_equal(W2.U, np.eye(n))


def test_decide_examples(rng):
    A, _ = random_unicellular(5, rng)
    rep = decide_unitary_similarity(A, A)
    assert rep.verdict == "similar"
    assert np.allclose(rep.witness.U, np.eye(5), atol=1e-12)
    Arh, Ap = counterexample_pair(1, 2)
    rep = decide_unitary_similarity(Arh, Ap)
    assert rep.verdict == "not_similar"
    assert rep.obstruction["entry"] == [1, 2]
    with pytest.raises(ShapeError):
        decide_unitary_similarity(np.eye(2), np.eye(3))


def test_decide_outside_class():
    rep = decide_unitary_similarity(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]))
    assert rep.verdict == "inconclusive" and "outside unicellular class" in rep.method
    rep = decide_unitary_similarity(np.diag([1.0, 2.0]), np.diag([1.0, 3.0]))
    assert rep.verdict == "not_similar" and rep.obstruction["invariant"] == "word_trace"


def test_decide_ambiguity_band():
    A = np.diag([1.0, 1.0], 1)
    B = A.copy()
    B[0, 2] = 3e-8  # between tol and 10 tol after scaling by 1 + max|entry| = 2
    assert decide_unitary_similarity(A, B, tol=1e-8).verdict == "inconclusive"


@settings(max_examples=30)
@given(seeds, st.integers(2, 8), st.booleans())
def test_decide_sound(seed, n, similar):
    rng = np.random.default_rng(seed)
    A, _ = random_unicellular(n, rng, scale=rng.uniform(0.5, 10))
    if similar:
        U = random_unitary(n, rng)
        B = U.conj().T @ A @ U
    else:
        B, _ = random_unicellular(n, rng)
    rep = decide_unitary_similarity(A, B)
    assert rep.verdict == ("similar" if similar else "not_similar")
    if rep.verdict == "similar":
        U = rep.witness.U
        assert np.linalg.norm(U.conj().T @ A @ U - B) <= 1e-7 * np.linalg.norm(A)
        assert specht_test(A, B, max_len=6).matched
    else:
        assert rep.obstruction is not None


@settings(max_examples=10)
@given(seeds, st.integers(3, 5))
def test_obstruction_gives_norm_separation(seed, n):
    rng = np.random.default_rng(seed)
    _, TA = random_unicellular(n, rng, lam=0.5)
    _, TB = random_unicellular(n, rng, lam=0.5)
    CA = canonical_form(TA)[1]
    CB = canonical_form(TB)[1]
    hit = separating_query(CA, CB)
    assert hit is not None
    i, f, a, b = hit
    assert abs(a - b) > 1e-8 * (1 + max(a, b))


def test_principal_norm_profile(rng):
    A, _ = random_unicellular(4, rng)
    fam = PolynomialFamily.default(4, size=6)
    P = principal_norm_profile(A, fam)
    assert P.shape == (4, len(fam))
    assert np.allclose(P[0], [abs(f(A[0, 0])) for f in fam])
    w = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    B = np.diag(w.conj()) @ A @ np.diag(w)
    assert np.allclose(principal_norm_profile(B, fam), P, atol=1e-10)
    Arh, Ap = counterexample_pair(1, 2)
    Pa, Pb = principal_norm_profile(Arh, fam), principal_norm_profile(Ap, fam)
    assert np.allclose(Pa[0], Pb[0]) and np.allclose(Pa[2], Pb[2])
    assert not np.allclose(Pa[1], Pb[1])


def test_counterexample_pair():
    A, Ap = counterexample_pair(1, 2)
    assert (A[0, 1], A[1, 2], Ap[0, 1], Ap[1, 2]) == (1, 2, 2, 1)
    F = np.fliplr(np.eye(3))
    assert np.array_equal(F @ A.T @ F, Ap)
    assert norms_match(A, Ap, PolynomialFamily.default(3)).matched
    assert not specht_test(A, Ap).matched
    for bad in [(2, 1), (0, 1), (1, 1), (-1, 2)]:
        with pytest.raises(ValueError):
            counterexample_pair(*bad)


@pytest.mark.parametrize("size,degree", [(16, 2), (64, 4), (256, 6)])
def test_counterexample_norms_agree_for_many_families(size, degree):
    A, Ap = counterexample_pair(1, 2)
    for seed in range(3):
        assert norms_match(A, Ap, PolynomialFamily.random(size, degree, seed)).worst_gap <= 1e-9
    assert decide_unitary_similarity(A, Ap).verdict == "not_similar"
