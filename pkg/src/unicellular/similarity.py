"""Unicellularity, canonical forms and the unitary similarity decision.

A unicellular matrix has a single Jordan block, so its chain of invariant
subspaces is unique and so is its triangular form, up to a diagonal
unitary.  Fixing the phases so that the first superdiagonal is real and
positive gives a canonical representative; two unicellular matrices are
unitarily similar exactly when these representatives agree.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import HypothesisError, ShapeError
from .invariants import specht_test
from .linalg_core import UnitaryWitness, check_matrix, random_unitary, spectral_norm
from .poly import eval_matrix

__all__ = [
    "SimilarityReport",
    "canonical_form",
    "counterexample_pair",
    "decide_unitary_similarity",
    "is_unicellular",
    "principal_norm_profile",
    "random_unicellular",
    "separating_query",
    "unicellular_triangularize",
]

CLUSTER_TOL = 1e-7
SUPERDIAGONAL_TOL = 1e-7


@dataclass
class SimilarityReport:
    """Verdict of :func:`decide_unitary_similarity`.

    ``witness`` (for ``similar``) satisfies ``U* A U ~ B`` with Frobenius
    residual ``residual``; ``obstruction`` (for ``not_similar``) describes
    the invariant that failed.
    """

    verdict: str
    witness: UnitaryWitness = None
    residual: float = None
    obstruction: dict = None
    method: str = ""

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else self.witness.U,
            "residual": self.residual,
            "obstruction": self.obstruction,
            "method": self.method,
        }


def _householder_to(v):
    """Unitary ``H`` with first column ``v`` (``v`` a unit vector)."""
    n = v.shape[0]
    e = np.zeros(n, dtype=np.complex128)
    e[0] = 1.0
    # H e1 = v, built as a reflection times a phase
    phase = v[0] / abs(v[0]) if abs(v[0]) > 0 else 1.0
    u = v / phase - e
    nu = np.linalg.norm(u)
    if nu < 1e-300:
        return phase * np.eye(n, dtype=np.complex128)
    u /= nu
    return phase * (np.eye(n, dtype=np.complex128) - 2 * np.outer(u, u.conj()))


def unicellular_triangularize(A):
    """Unitary ``U`` and upper triangular ``T ~ U* A U`` for a matrix with one eigenvalue.

    ``lambda = trace(A)/n`` is taken as the eigenvalue; each step moves the
    null vector of the trailing block of ``T - lambda I`` to the front.
    Unlike a general Schur solver this does not spread a defective
    eigenvalue into a ring of radius ``eps**(1/n)``.

    Returns ``(U, T, departure)`` where ``T`` is exactly upper triangular and
    ``departure`` is the largest smallest-singular-value met along the way,
    i.e. how far ``A`` is from having the single eigenvalue ``lambda``.
    """
    A = check_matrix(A)
    n = A.shape[0]
    lam = np.trace(A) / n
    U = np.eye(n, dtype=np.complex128)
    M = A.copy()
    departure = 0.0
    for j in range(n - 1):
        B = M[j:, j:] - lam * np.eye(n - j)
        _, s, Vh = np.linalg.svd(B)
        departure = max(departure, float(s[-1]))
        H = _householder_to(Vh[-1].conj())
        M[:, j:] = M[:, j:] @ H
        M[j:, :] = H.conj().T @ M[j:, :]
        U[:, j:] = U[:, j:] @ H
    if n:
        departure = max(departure, float(np.max(np.abs(np.diag(M) - lam))))
    return U, np.triu(M), departure


def is_unicellular(A, tol=CLUSTER_TOL, superdiagonal_tol=SUPERDIAGONAL_TOL):
    """True when ``A`` is a single Jordan block, to working precision.

    Both conditions are measured against ``1 + ||A||``: ``A`` must lie
    within ``tol`` of a matrix with the single eigenvalue ``trace(A)/n``,
    and every first-superdiagonal entry of its triangular form must exceed
    ``superdiagonal_tol``.
    """
    A = check_matrix(A)
    n = A.shape[0]
    if n == 1:
        return True
    _, T, departure = unicellular_triangularize(A)
    scale = 1.0 + spectral_norm(A)
    if departure > tol * scale:
        return False
    return bool(np.min(np.abs(np.diag(T, 1))) > superdiagonal_tol * scale)


def _phase_fix(T):
    n = T.shape[0]
    w = np.ones(n, dtype=np.complex128)
    for i in range(n - 1):
        a = T[i, i + 1]
        r = abs(a)
        # componentwise, so a real positive a gives exactly 1 (complex division does not)
        w[i + 1] = w[i] * complex(a.real / r, -a.imag / r)
    return w


def canonical_form(A, upper_triangular=True, tol=SUPERDIAGONAL_TOL):
    """Return ``(W, W* A W)`` with a real positive first superdiagonal.

    ``W`` is diagonal with ``W[0, 0] = 1``.  With ``upper_triangular=False``
    the matrix is first brought to triangular form by
    :func:`unicellular_triangularize` and the returned witness is the
    product of both unitaries.

    Raises
    ------
    HypothesisError
        If the triangular form has a superdiagonal entry of modulus at most
        ``tol * (1 + ||A||)``, or (with ``upper_triangular=True``) if ``A``
        has entries below the diagonal.
    """
    A = check_matrix(A)
    n = A.shape[0]
    scale = 1.0 + float(np.max(np.abs(A)))
    if upper_triangular:
        if np.max(np.abs(np.tril(A, -1)), initial=0.0) > tol * scale:
            raise HypothesisError("matrix is not upper triangular")
        U, T = np.eye(n, dtype=np.complex128), np.triu(A)
    else:
        U, T, _ = unicellular_triangularize(A)
    if n > 1 and np.min(np.abs(np.diag(T, 1))) <= tol * scale:
        raise HypothesisError("vanishing first-superdiagonal entry")
    w = _phase_fix(T)
    if np.all(w == 1):
        C = T.copy()
    else:
        C = w.conj()[:, None] * T * w[None, :]
    idx = np.arange(n - 1)
    C[idx, idx + 1] = np.abs(C[idx, idx + 1])
    return UnitaryWitness(U * w[None, :]), C


def _entry_order(n):
    # column by column, each from the superdiagonal upward: the order in
    # which norm data pin the entries down
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            yield i, j


def decide_unitary_similarity(A, B, tol=1e-8, specht_len=6):
    """Decide whether ``B = U* A U`` for some unitary ``U``.

    Both matrices are triangularized and canonicalized.  Canonical forms
    agreeing entrywise to ``tol * (1 + max|entry|)`` give ``similar``
    with witness ``U = U_A W_A W_B* U_B*``; disagreement beyond ten times
    that gives ``not_similar`` and the first disagreeing entry as
    obstruction; anything in between is ``inconclusive``.

    Outside the unicellular class the answer is ``inconclusive`` unless a
    word trace test up to length ``specht_len`` separates the pair.
    """
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    n = A.shape[0]
    if not (is_unicellular(A) and is_unicellular(B)):
        rep = specht_test(A, B, max_len=specht_len)
        if not rep.matched:
            return SimilarityReport(
                "not_similar",
                obstruction={"invariant": "word_trace", **rep.witness},
                method="outside unicellular class; word trace falsifier",
            )
        return SimilarityReport(
            "inconclusive",
            method=f"outside unicellular class; {rep.note}",
        )
    WA, CA = canonical_form(A, upper_triangular=False)
    WB, CB = canonical_form(B, upper_triangular=False)
    scale = 1.0 + max(float(np.max(np.abs(CA))), float(np.max(np.abs(CB))))
    diff = np.abs(np.triu(CA - CB)) / scale
    worst = float(diff.max())
    method = "canonical form comparison"
    if worst > 10 * tol:
        cells = [(i, i) for i in range(n)] + list(_entry_order(n))
        i, j = next((i, j) for i, j in cells if diff[i, j] > 10 * tol)
        return SimilarityReport(
            "not_similar",
            obstruction={
                "invariant": "canonical_entry",
                "entry": [i + 1, j + 1],
                "block": j + 1,
                "a": complex(CA[i, j]),
                "b": complex(CB[i, j]),
                "gap": float(diff[i, j]),
            },
            method=method,
        )
    if worst > tol:
        return SimilarityReport("inconclusive", method=f"{method}; gap {worst:.3e} in ambiguity band")
    U = WA.U @ WB.U.conj().T
    residual = float(np.linalg.norm(U.conj().T @ A @ U - B, "fro"))
    if residual > 1e-7 * max(1.0, float(np.linalg.norm(A, "fro"))):
        return SimilarityReport("inconclusive", UnitaryWitness(U), residual, method=f"{method}; witness residual too large")
    return SimilarityReport("similar", UnitaryWitness(U), residual, method=method)


def separating_query(A, B, tol=1e-8):
    """A query ``(i, f)`` with ``||f(A_i)|| != ||f(B_i)||`` for canonical forms ``A, B``.

    The reconstruction of ``A`` from its own norm data is replayed against
    ``B``; since the queries are chosen adaptively, an exact match on every
    answer would reconstruct ``A`` from ``B``'s data, so some answer must
    differ.  Returns ``(i, f, norm_a, norm_b)`` for the first differing
    query, or ``None``.
    """
    from .reconstruct import reconstruct, simulate_oracle

    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    oracle = simulate_oracle(A, tol=1e-7)
    reconstruct(oracle, verify=0)
    for i, f, a in oracle.log:
        b = spectral_norm(eval_matrix(f, B[:i, :i]))
        if abs(a - b) > tol * (1 + max(a, b)):
            return i, f, a, b
    return None


def principal_norm_profile(A, family):
    """Matrix with entry ``(i, j) = ||f_j(A_{i+1})||`` over leading blocks."""
    A = check_matrix(A)
    n = A.shape[0]
    return np.array([[spectral_norm(eval_matrix(f, A[:i, :i])) for f in family] for i in range(1, n + 1)])


def counterexample_pair(alpha, beta):
    """Two 3x3 nilpotent unicellular matrices with equal polynomial norms that are not unitarily similar.

    ``A`` has superdiagonal ``(alpha, beta)`` and ``A'`` has ``(beta, alpha)``;
    both have corner zero.  ``A'`` is the flip-conjugate of the transpose of
    ``A``, so ``||f(A)|| = ||f(A')||`` for every polynomial ``f``, while a
    word trace separates them when ``0 < alpha < beta``.
    """
    alpha, beta = float(alpha), float(beta)
    if not 0 < alpha < beta:
        raise ValueError(f"need 0 < alpha < beta, got alpha={alpha}, beta={beta}")
    A = np.zeros((3, 3), dtype=np.complex128)
    A[0, 1], A[1, 2] = alpha, beta
    Ap = np.zeros((3, 3), dtype=np.complex128)
    Ap[0, 1], Ap[1, 2] = beta, alpha
    return A, Ap


def random_unicellular(n, rng, scale=1.0, lam=None):
    """Random upper triangular unicellular matrix conjugated by a random unitary.

    Entries above the superdiagonal are uniform on ``[-scale, scale]^2``;
    superdiagonal moduli are uniform on ``[0.1, 1] * scale`` with random
    phases; ``lam`` defaults to a standard complex Gaussian.
    Returns ``(A, T)`` with ``A = V T V*``.
    """
    if lam is None:
        lam = complex(rng.standard_normal(), rng.standard_normal())
    T = np.triu(rng.uniform(-scale, scale, (n, n)) + 1j * rng.uniform(-scale, scale, (n, n)), 2)
    T = T + np.diag(scale * rng.uniform(0.1, 1.0, n - 1) * np.exp(2j * np.pi * rng.uniform(size=n - 1)), 1)
    T = T + lam * np.eye(n)
    V = random_unitary(n, rng)
    return V @ T @ V.conj().T, T

