"""Upper triangular Toeplitz matrices, the ones-nilpotent ``Q`` and Volterra discretizations.

``S`` is the shift (ones on the first superdiagonal) and ``Q`` has ones
everywhere strictly above the diagonal.  They satisfy ``(I - S)(I + Q) = I``
and ``sum_k (-1)**(k+1) Q**k = S``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, HypothesisError, ShapeError
from .linalg_core import DEFAULT_TOL, check_matrix, spectral_norm

__all__ = [
    "UpperToeplitz",
    "alternating_sum",
    "is_generator",
    "lemma2_verify",
    "ones_nilpotent",
    "richardson_limit",
    "shift_matrix",
    "volterra_convergence",
    "volterra_discretization",
    "volterra_norm_estimate",
    "VOLTERRA_NORM",
]

VOLTERRA_NORM = 4 / np.pi


@dataclass(frozen=True)
class UpperToeplitz:
    """Upper triangular Toeplitz matrix given by its diagonals ``z[0], ..., z[n-1]``."""

    z: tuple

    def __post_init__(self):
        z = tuple(complex(v) for v in self.z)
        if not z:
            raise ShapeError("need at least one diagonal")
        object.__setattr__(self, "z", z)

    @property
    def n(self):
        return len(self.z)

    def to_matrix(self):
        n = self.n
        out = np.zeros((n, n), dtype=np.complex128)
        for k, v in enumerate(self.z):
            out += v * np.eye(n, k=k)
        return out

    @classmethod
    def from_matrix(cls, A, tol=DEFAULT_TOL):
        A = check_matrix(A)
        n = A.shape[0]
        z = [A[0, k] for k in range(n)]
        if np.max(np.abs(A - cls(z).to_matrix()), initial=0.0) > tol * max(1.0, np.max(np.abs(A))):
            raise HypothesisError("matrix is not upper triangular Toeplitz")
        return cls(z)


def shift_matrix(n):
    if n < 1:
        raise ShapeError("n must be positive")
    return np.eye(n, k=1, dtype=np.complex128)


def ones_nilpotent(n):
    if n < 1:
        raise ShapeError("n must be positive")
    return np.triu(np.ones((n, n), dtype=np.complex128), 1)


def is_generator(R, tol=1e-12):
    """True when the first superdiagonal is nonzero relative to the largest diagonal."""
    if not isinstance(R, UpperToeplitz):
        R = UpperToeplitz.from_matrix(R)
    if R.n == 1:
        return True
    scale = max(abs(v) for v in R.z)
    return abs(R.z[1]) > tol * scale


def _is_integral(A):
    return np.all(A.imag == 0) and np.all(A.real == np.round(A.real)) and np.max(np.abs(A.real)) < 2**20


def alternating_sum(A, tol=DEFAULT_TOL):
    """``sum_{k=1}^{n-1} (-1)**(k+1) A**k`` for nilpotent ``A``.

    Equals ``A (I + A)^{-1}``.  Integer inputs are summed in integer
    arithmetic, so the result is exact.

    Raises
    ------
    HypothesisError
        If ``||A**n|| > tol * max(1, ||A||)**n``.
    """
    A = check_matrix(A)
    n = A.shape[0]
    if _is_integral(A):
        M = A.real.astype(np.int64)
        P = np.eye(n, dtype=np.int64)
        total = np.zeros((n, n), dtype=np.int64)
        for k in range(1, n + 1):
            P = P @ M
            if k < n:
                total += (-1) ** (k + 1) * P
        if np.any(P):
            raise HypothesisError("input is not nilpotent")
        return total.astype(np.complex128)
    P = np.eye(n, dtype=np.complex128)
    total = np.zeros((n, n), dtype=np.complex128)
    for k in range(1, n + 1):
        P = P @ A
        if k < n:
            total += (-1) ** (k + 1) * P
    scale = max(1.0, spectral_norm(A)) ** n
    if spectral_norm(P) > tol * scale:
        raise HypothesisError("input is not nilpotent")
    return total


def lemma2_verify(A, tol=DEFAULT_TOL):
    """Check the norm condition ``||sum (-1)**(k+1) A**k|| <= 1``.

    ``A`` must be strictly upper triangular with ones on the first
    superdiagonal.  Under that shape the condition holds only for ``A = Q``.
    """
    A = check_matrix(A)
    n = A.shape[0]
    if np.max(np.abs(np.tril(A)), initial=0.0) > tol:
        raise HypothesisError("A must be strictly upper triangular")
    if n > 1 and np.max(np.abs(np.diag(A, 1) - 1)) > tol:
        raise HypothesisError("A must have ones on the first superdiagonal")
    return spectral_norm(alternating_sum(A, tol=tol)) <= 1 + tol


def volterra_discretization(m):
    """The ``m`` x ``m`` matrix ``(i/m)(I + 2Q)``."""
    if m < 1:
        raise ShapeError("m must be positive")
    return (1j / m) * (np.eye(m) + 2 * ones_nilpotent(m))


def volterra_norm_estimate(m, method="structured", tol=1e-14, max_iter=10_000, max_m=10_000):
    """Spectral norm of :func:`volterra_discretization` ``(m)``.

    ``method="structured"`` never forms the matrix: ``(I + 2Q) x`` is a
    suffix sum and its transpose a prefix sum, so each power iteration step
    costs O(m).  ``method="dense"`` calls :func:`spectral_norm`.
    """
    if m < 1:
        raise ShapeError("m must be positive")
    if m > max_m:
        raise ValueError(f"m={m} exceeds the cap {max_m}")
    if method == "dense":
        return spectral_norm(volterra_discretization(m))
    if method != "structured":
        raise ValueError(f"unknown method {method!r}")

    def apply(x):
        suffix = np.cumsum(x[::-1])[::-1]
        return 2 * suffix - x

    def apply_t(y):
        return 2 * np.cumsum(y) - y

    # the top singular vector of I + 2Q is positive, so a positive start is safe
    x = np.ones(m) / np.sqrt(m)
    lam = 0.0
    for _ in range(max_iter):
        y = apply(x)
        new = float(y @ y)
        x = apply_t(y)
        x /= np.linalg.norm(x)
        if abs(new - lam) <= tol * new:
            return float(np.sqrt(new)) / m
        lam = new
    raise ConvergenceError("structured power iteration did not converge", max_iter, np.sqrt(lam) / m)


def richardson_limit(ms, values, order=2):
    """Extrapolate ``values[j] ~ L + c1/m**order + c2/m**(2*order) + ...`` to ``L``.

    ``ms`` must be geometric with ratio 2 (e.g. 500, 1000, 2000).  Each
    pass of the Neville-style table removes one more term of the expansion.
    """
    ms = np.asarray(ms, dtype=float)
    if len(ms) < 2 or not np.allclose(ms[1:] / ms[:-1], 2.0):
        raise ValueError("need at least two sizes in ratio 2")
    table = list(map(float, values))
    p = order
    while len(table) > 1:
        f = 2.0**p
        table = [(f * b - a) / (f - 1) for a, b in zip(table[:-1], table[1:])]
        p += order
    return table[0]


def volterra_convergence(m_list, method="structured"):
    """Rows ``(m, estimate, estimate - 4/pi)`` for each ``m``."""
    rows = []
    for m in m_list:
        est = volterra_norm_estimate(m, method=method)
        rows.append((m, est, est - VOLTERRA_NORM))
    return rows
