"""Dense complex matrix arithmetic and spectral computations.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every public
function accepts anything :func:`check_matrix` accepts and never mutates
its inputs.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, ShapeError

__all__ = [
    "DEFAULT_TOL",
    "UnitaryWitness",
    "adjoint",
    "check_matrix",
    "eigenvalues",
    "kron",
    "leading_submatrix",
    "mat_mul",
    "random_unitary",
    "schur",
    "spectral_norm",
    "spectral_radius",
    "trace",
]

DEFAULT_TOL = 1e-9


def check_matrix(A, name="A"):
    """Validate ``A`` and return it as a square complex128 array.

    Raises
    ------
    ShapeError
        If ``A`` is not a non-empty square 2-d array.
    ValueError
        If ``A`` contains NaN or infinite entries.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ShapeError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def _check_same_order(A, B):
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")


@dataclass(frozen=True)
class UnitaryWitness:
    """A unitary matrix together with its measured departure from unitarity.

    Attributes
    ----------
    U : ndarray
        The (numerically) unitary matrix.
    unitarity_residual : float
        ``||U* U - I||_F``.
    """

    U: np.ndarray

    @property
    def unitarity_residual(self):
        U = self.U
        return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), "fro"))

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n, dtype=np.complex128))


def mat_mul(A, B):
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    _check_same_order(A, B)
    return A @ B


def adjoint(A):
    """Conjugate transpose."""
    return check_matrix(A).conj().T


def kron(A, B):
    return np.kron(check_matrix(A, "A"), check_matrix(B, "B"))


def trace(A):
    return complex(np.trace(check_matrix(A)))


def spectral_norm(A, method="svd", tol=1e-14, max_iter=10_000, seed=0):
    """Largest singular value of ``A``.

    Parameters
    ----------
    A : array_like
        Square matrix.
    method : {"svd", "power"}
        ``"svd"`` uses LAPACK's singular value decomposition.  ``"power"``
        runs power iteration on ``A* A`` from a seeded random start and stops
        once successive Rayleigh quotients agree to ``tol`` relative.
    tol, max_iter, seed
        Only used by ``method="power"``.

    Raises
    ------
    ConvergenceError
        If power iteration has not converged after ``max_iter`` steps.
    """
    A = check_matrix(A)
    if method == "svd":
        return float(np.linalg.norm(A, 2))
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    if not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    n = A.shape[0]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    lam = 0.0
    for it in range(1, max_iter + 1):
        y = A @ x
        new = float(np.vdot(y, y).real)
        x = A.conj().T @ y
        size = np.linalg.norm(x)
        if size == 0.0:
            # x landed in the kernel; restart from a fresh direction
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x /= np.linalg.norm(x)
            continue
        x /= size
        if abs(new - lam) <= tol * new:
            return float(np.sqrt(new))
        lam = new
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations",
        iterations=max_iter,
        last=float(np.sqrt(lam)),
    )


def eigenvalues(A):
    """Eigenvalues of ``A`` with multiplicity, as a complex array."""
    A = check_matrix(A)
    try:
        return scipy.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def spectral_radius(A):
    return float(np.max(np.abs(eigenvalues(A))))


def _swap_adjacent(T, U, k):
    # Givens rotation exchanging the diagonal entries T[k,k] and T[k+1,k+1]
    a, b, c = T[k, k], T[k, k + 1], T[k + 1, k + 1]
    v = np.array([b, c - a])
    size = np.linalg.norm(v)
    if size == 0.0:
        return
    v1, v2 = v / size
    G = np.array([[v1, -np.conj(v2)], [v2, np.conj(v1)]])
    T[k : k + 2, :] = G.conj().T @ T[k : k + 2, :]
    T[:, k : k + 2] = T[:, k : k + 2] @ G
    U[:, k : k + 2] = U[:, k : k + 2] @ G
    T[k + 1, k] = 0.0
    T[k, k], T[k + 1, k + 1] = c, a


def schur(A):
    """Complex Schur form with a deterministic eigenvalue order.

    Returns ``(W, T)`` where ``W`` is a :class:`UnitaryWitness` holding
    ``U`` with ``U* A U = T``, and ``T`` is upper triangular with its
    diagonal sorted lexicographically by (real part, imaginary part).
    """
    A = check_matrix(A)
    try:
        T, U = scipy.linalg.schur(A, output="complex")
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    T = np.triu(T)
    n = T.shape[0]
    key = lambda z: (z.real, z.imag)  # noqa: E731
    for sweep in range(n):
        swapped = False
        for k in range(n - 1 - sweep):
            if key(T[k, k]) > key(T[k + 1, k + 1]):
                _swap_adjacent(T, U, k)
                swapped = True
        if not swapped:
            break
    return UnitaryWitness(U), T


def leading_submatrix(A, k):
    """The leading ``k`` x ``k`` principal submatrix (``1 <= k <= n``)."""
    A = check_matrix(A)
    if not 1 <= k <= A.shape[0]:
        raise ShapeError(f"k={k} out of range 1..{A.shape[0]}")
    return A[:k, :k].copy()


def random_unitary(n, rng):
    """Haar-distributed unitary from the QR factorization of a Gaussian matrix."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Qf, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Qf * (d / np.abs(d))
