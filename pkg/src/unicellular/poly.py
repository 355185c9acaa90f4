"""Univariate complex polynomials and their action on matrices."""
import math

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg

from .exceptions import NotInAlgebraError, NumericalRankError
from .linalg_core import DEFAULT_TOL, check_matrix

__all__ = [
    "Polynomial",
    "compose",
    "eval_matrix",
    "generator_polynomial",
    "minimal_polynomial",
]

_TRIM = 1e-300


class Polynomial:
    """Polynomial with complex coefficients, in ascending powers of ``t - center``.

    ``Polynomial([1, 0, 2])`` is ``1 + 2 t**2``; ``Polynomial([0, 1], center=3)``
    is ``t - 3``.  Expanding about a point near the spectrum of the matrix a
    polynomial is applied to keeps coefficients small, which matters for
    generators of high nilpotency index.  Trailing coefficients of modulus
    below 1e-300 are dropped, so the zero polynomial has no stored
    coefficients and degree ``-inf``.

    Instances are immutable and hashable.  Equality compares the stored
    representation; use :meth:`recenter` to compare across centers.
    """

    __slots__ = ("_coeffs", "_center")

    def __init__(self, coeffs=(), center=0.0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).copy()
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)) or not np.isfinite(center):
            raise ValueError("coefficients must be finite")
        nz = np.nonzero(np.abs(c) >= _TRIM)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._coeffs = c
        self._center = complex(center)

    @classmethod
    def monomial(cls, k, scale=1.0, center=0.0):
        c = np.zeros(k + 1, dtype=np.complex128)
        c[k] = scale
        return cls(c, center)

    @classmethod
    def from_roots(cls, roots):
        return cls(npoly.polyfromroots(np.asarray(roots, dtype=np.complex128)))

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def center(self):
        return self._center

    @property
    def degree(self):
        return len(self._coeffs) - 1 if len(self._coeffs) else -math.inf

    def __call__(self, z):
        out = 0j
        w = z - self._center
        for c in self._coeffs[::-1]:
            out = out * w + c
        return out

    def __repr__(self):
        if self._center:
            return f"Polynomial({self._coeffs.tolist()!r}, center={self._center!r})"
        return f"Polynomial({self._coeffs.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._center == other._center and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self):
        return hash((self._center, self._coeffs.tobytes()))

    def recenter(self, center):
        """The same polynomial expanded in powers of ``t - center``."""
        center = complex(center)
        if center == self._center:
            return self
        # p(t) = sum a_k ((t - center) + (center - old))**k
        step = Polynomial([center - self._center, 1])
        out = Polynomial()
        for c in self._coeffs[::-1]:
            out = out * step + c
        return Polynomial(out._coeffs, center)

    def to_monomial(self):
        """Coefficients in powers of ``t`` (center 0)."""
        return self.recenter(0.0)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other.recenter(self._center)
        if np.isscalar(other):
            return Polynomial([other], self._center)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        out = np.zeros(max(len(a), len(b)), dtype=np.complex128)
        out[: len(a)] += a
        out[: len(b)] += b
        return Polynomial(out, self._center)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._coeffs, self._center)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not len(self._coeffs) or not len(other._coeffs):
            return Polynomial((), self._center)
        return Polynomial(npoly.polymul(self._coeffs, other._coeffs), self._center)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial([1], self._center)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, a):
        """Return ``t -> self(t + a)``.  Exact: only the center moves."""
        return Polynomial(self._coeffs, self._center - a)

    def monic(self):
        if not len(self._coeffs):
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return Polynomial(self._coeffs / self._coeffs[-1], self._center)


def compose(f, g):
    """``f(g(t))``, expanded about the center of ``g``."""
    inner = g - f.center
    out = Polynomial((), g.center)
    for c in f.coeffs[::-1]:
        out = out * inner + c
    return out


def eval_matrix(f, A, center=None):
    """Evaluate ``f(A)`` by Horner's scheme in powers of ``A - c I``.

    ``c`` is the polynomial's own center unless ``center`` overrides it.
    Using the eigenvalue of a unicellular ``A`` as the center avoids
    cancellation between large binomial terms.
    """
    A = check_matrix(A)
    n = A.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    if center is not None:
        f = f.recenter(center)
    if f.center != 0:
        A = A - f.center * eye
    out = np.zeros((n, n), dtype=np.complex128)
    for c in f.coeffs[::-1]:
        out = out @ A
        out += c * eye
    return out


def _center(A):
    """Return ``(N, rho, mu)`` with ``N = (A - mu I)/rho``."""
    n = A.shape[0]
    mu = np.trace(A) / n
    N = A - mu * np.eye(n)
    rho = np.linalg.norm(N, 2)
    if rho == 0.0:
        rho = 1.0
    return N / rho, rho, mu


def _unscale(p, rho, mu):
    # p(s) with s = (t - mu)/rho, expanded about mu
    k = np.arange(len(p.coeffs))
    return Polynomial(p.coeffs / rho**k, mu)


def _arnoldi(N, max_dim, breakdown_tol):
    """Arnoldi process for ``X -> N X`` on matrix space, started at ``I``.

    Returns the orthonormal basis matrices, the polynomials ``p_j`` with
    ``basis[j] = p_j(N)``, and the Hessenberg entries.  Stops early when a
    new direction has Frobenius size at most ``breakdown_tol``; ``h_last`` is
    that size (or ``None`` if the process ran to ``max_dim``).
    """
    n = N.shape[0]
    basis = [np.eye(n, dtype=np.complex128) / np.sqrt(n)]
    polys = [Polynomial([1 / np.sqrt(n)])]
    H = np.zeros((max_dim + 1, max_dim), dtype=np.complex128)
    s = Polynomial([0, 1])
    for k in range(max_dim):
        W = N @ basis[k]
        w_poly = s * polys[k]
        for _ in range(2):  # reorthogonalize once
            for j, B in enumerate(basis):
                c = np.vdot(B, W)
                H[j, k] += c
                W = W - c * B
                w_poly = w_poly - c * polys[j]
        h = np.linalg.norm(W)
        H[k + 1, k] = h
        if h <= breakdown_tol or k + 1 == max_dim:
            return basis, polys, H[: k + 2, : k + 1], h
        basis.append(W / h)
        polys.append(w_poly * (1 / h))
    raise AssertionError("unreachable")


def _hessenberg_charpoly(H):
    """Characteristic polynomial of a square upper Hessenberg matrix."""
    k = H.shape[0]
    s = Polynomial([0, 1])
    p = [Polynomial([1])]
    for j in range(1, k + 1):
        nxt = (s - H[j - 1, j - 1]) * p[j - 1]
        prod = 1.0 + 0j
        for i in range(j - 2, -1, -1):
            prod *= H[i + 1, i]
            nxt = nxt - (H[i, j - 1] * prod) * p[i]
        p.append(nxt)
    return p[k]


def minimal_polynomial(A, rank_tol=1e-10, ambiguous_tol=1e-8):
    """Monic polynomial of least degree annihilating ``A``.

    Builds an orthonormal basis of ``span{I, N, N**2, ...}`` (Frobenius
    inner product) by the Arnoldi process, where ``N`` is ``A`` centered at
    its mean eigenvalue and scaled to unit spectral norm.  A new direction of
    size below ``rank_tol`` marks linear dependence; the minimal polynomial
    is then the characteristic polynomial of the Hessenberg matrix.

    Raises
    ------
    NumericalRankError
        If the smallest new direction lies between ``rank_tol`` and
        ``ambiguous_tol``, so the degree cannot be decided reliably.
    """
    A = check_matrix(A)
    n = A.shape[0]
    N, rho, mu = _center(A)
    basis, polys, H, h = _arnoldi(N, n, rank_tol)
    k = H.shape[1]
    sub = np.abs(np.diag(H, -1))[:-1]
    if sub.size and sub.min() < ambiguous_tol:
        raise NumericalRankError(
            f"linear dependence among powers is marginal (Arnoldi breakdown size {sub.min():.3e})"
        )
    if h > rank_tol and not (k == n):
        raise NumericalRankError("no dependence found among I..A^n")
    p = _hessenberg_charpoly(H[:k, :k])
    return _unscale(p, rho, mu).monic()


def generator_polynomial(R, T, tol=DEFAULT_TOL):
    """Find ``g`` of degree at most ``n-1`` with ``g(R) = T``.

    ``T`` is projected onto an orthonormal basis of ``Alg R`` built by the
    Arnoldi process on the centered, scaled ``R``; the resulting coordinates
    solve the Frobenius least-squares problem over ``I, R, ..., R**(n-1)``.

    Raises
    ------
    NotInAlgebraError
        If the relative residual ``||g(R) - T||_F / ||T||_F`` exceeds ``tol``.
    """
    R = check_matrix(R, "R")
    T = check_matrix(T, "T")
    if R.shape != T.shape:
        raise ValueError("R and T must have the same order")
    n = R.shape[0]
    N, rho, mu = _center(R)
    basis, polys, _, _ = _arnoldi(N, n, 1e-13)
    g_s = Polynomial()
    for B, p in zip(basis, polys):
        g_s = g_s + np.vdot(B, T) * p
    g = _unscale(g_s, rho, mu)
    scale = np.linalg.norm(T, "fro")
    resid = np.linalg.norm(eval_matrix(g, R) - T, "fro")
    if resid > tol * max(scale, 1.0):
        raise NotInAlgebraError(f"T is not in Alg R (residual {resid:.3e}, norm {scale:.3e})")
    return g
