"""Recover an upper triangular matrix from norms of polynomials in its leading submatrices.

The hidden matrix ``A`` is upper triangular with a constant diagonal
``lambda`` and a nowhere-zero first superdiagonal.  The only access to it is
a :class:`NormOracle` answering ``(i, f) -> ||f(A_i)||`` where ``A_i`` is
the leading ``i`` x ``i`` block.  Such data determine ``A`` up to conjugation
by a diagonal unitary, and :func:`reconstruct` returns the representative
with a real positive superdiagonal.

Outline, for the nilpotent part ``N = A - lambda I``:

* ``lambda`` from ``|lambda|``, ``|lambda - 1|``, ``|lambda - i|`` (block 1).
* ``a12 = ||N_2||`` and ``a23 = ||N_3**2|| / a12``.  ``a13`` is recovered
  from ``||N_3||``, which depends on ``|a13|`` only, and from two more
  polynomials that move ``a13`` to ``a13 - 1`` and ``a13 - i``.
* For each further order ``k`` the last column is filled bottom-up.  First
  ``a_{k-1,k} = ||N_k**(k-1)|| / (a12 ... a_{k-2,k-1})``.  Then, for each
  power ``p = k-2, ..., 1``, every entry of ``N_k**p`` is known except the
  corner ``(1, k)``.  The polynomials ``t**p + (z / pi) t**(k-1)``, where
  ``pi`` is the corner of ``N_k**(k-1)``, shift that corner by ``z``.  Their
  norms pin the corner down (:func:`recover_power_corner`).  The corner is
  linear in the unknown ``a_{k-p,k}``, so :func:`back_substitute_column`
  finishes the step.
"""
import abc
import json
import subprocess
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    AmbiguityError,
    HypothesisError,
    OracleInconsistencyError,
    ReconstructionError,
    ShapeError,
    UnicellularError,
)
from .linalg_core import DEFAULT_TOL, check_matrix, spectral_norm
from .poly import Polynomial, eval_matrix

__all__ = [
    "CommandOracle",
    "NormOracle",
    "ReconstructionReport",
    "SimulatedOracle",
    "back_substitute_column",
    "corner_samples",
    "recover_base3",
    "recover_lambda",
    "recover_power_corner",
    "reconstruct",
    "simulate_oracle",
    "trilaterate",
]

_T = Polynomial([0, 1])


class NormOracle(abc.ABC):
    """Black box answering ``query(i, f) = ||f(A_i)||`` for a hidden matrix ``A``.

    Subclasses implement :meth:`_norm`; this base class validates the
    index, counts queries and keeps a log of ``(i, f, value)`` triples.
    """

    def __init__(self):
        self.query_count = 0
        self.log = []

    @abc.abstractmethod
    def order(self):
        """Order ``n`` of the hidden matrix."""

    @abc.abstractmethod
    def _norm(self, i, f):
        pass

    def query(self, i, f):
        n = self.order()
        if not 1 <= i <= n:
            raise ShapeError(f"submatrix index {i} out of range 1..{n}")
        value = float(self._norm(i, f))
        self.query_count += 1
        self.log.append((i, f, value))
        return value


class SimulatedOracle(NormOracle):
    """Oracle backed by an explicit matrix; used as the forward simulator.

    Polynomials are evaluated in powers of ``A_i - lambda I``, so translated
    queries do not lose accuracy to binomial cancellation.
    """

    def __init__(self, A, tol=DEFAULT_TOL):
        super().__init__()
        A = check_matrix(A)
        _check_reconstructible(A, tol)
        self.A = A
        self.lam = complex(np.mean(np.diag(A)))

    def order(self):
        return self.A.shape[0]

    def _norm(self, i, f):
        return spectral_norm(eval_matrix(f, self.A[:i, :i], center=self.lam))


def _check_reconstructible(A, tol):
    n = A.shape[0]
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(np.tril(A, -1)), initial=0.0) > tol * scale:
        raise HypothesisError("hidden matrix must be upper triangular")
    d = np.diag(A)
    if np.max(np.abs(d - d[0])) > tol * scale:
        raise HypothesisError("diagonal is not constant")
    if n > 1 and np.min(np.abs(np.diag(A, 1))) <= tol * scale:
        raise HypothesisError("zero on the first superdiagonal")


def simulate_oracle(A_hidden, tol=DEFAULT_TOL):
    return SimulatedOracle(A_hidden, tol=tol)


class CommandOracle(NormOracle):
    """Oracle served by an external program over a JSON-lines protocol.

    Each request is ``{"i": int, "poly": {"coeffs": [[re, im], ...]}}``
    with coefficients in ascending powers of ``t``; each response is
    ``{"norm": float}``.  Use as a context manager to close the process.
    """

    def __init__(self, argv, n):
        super().__init__()
        from .io import polynomial_to_dict

        self._to_dict = polynomial_to_dict
        self.n = int(n)
        self.proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )

    def order(self):
        return self.n

    def _norm(self, i, f):
        from .io import dumps

        self.proc.stdin.write(dumps({"i": i, "poly": self._to_dict(f)}) + "\n")
        self.proc.stdin.flush()
        line = self.proc.stdout.readline()
        if not line:
            raise OracleInconsistencyError("oracle process closed its output")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OracleInconsistencyError(f"oracle sent malformed JSON: {line.strip()!r}") from exc
        if "norm" not in reply:
            raise OracleInconsistencyError(f"oracle reply has no 'norm': {reply.get('error', reply)!r}")
        value = float(reply["norm"])
        if not np.isfinite(value) or value < 0:
            raise OracleInconsistencyError(f"oracle returned invalid norm {value!r}")
        return value

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class _Translated:
    """Queries on ``A - lam I`` answered by an oracle for ``A``."""

    def __init__(self, oracle, lam):
        self.oracle = oracle
        self.lam = lam

    def order(self):
        return self.oracle.order()

    def query(self, i, f):
        return self.oracle.query(i, f.shift(-self.lam))


@dataclass
class ReconstructionReport:
    """Output of :func:`reconstruct`.

    Attributes
    ----------
    recovered : ndarray
        Upper triangular, diagonal ``lambda_``, positive real superdiagonal.
    lambda_ : complex
        The common diagonal entry.
    residuals : dict
        ``(row, col)`` (1-based) -> consistency residual of the solve that
        produced that entry.
    query_count : int
        Oracle queries made, including verification.
    verification_gap : float
        Largest relative norm mismatch over held-out polynomials.
    """

    recovered: np.ndarray
    lambda_: complex
    residuals: dict = field(default_factory=dict)
    query_count: int = 0
    verification_gap: float = 0.0


def trilaterate(r0, r1, ri, tol=DEFAULT_TOL):
    """The complex ``c`` with ``|c| = r0``, ``|c - 1| = r1`` and ``|c - i| = ri``.

    Raises
    ------
    OracleInconsistencyError
        If the three distances do not fit one point to within
        ``tol * (1 + max radius)``.
    """
    c = complex((r0**2 + 1 - r1**2) / 2, (r0**2 + 1 - ri**2) / 2)
    err = max(abs(abs(c) - r0), abs(abs(c - 1) - r1), abs(abs(c - 1j) - ri))
    if err > tol * (1 + max(r0, r1, ri)):
        raise OracleInconsistencyError(f"radii ({r0}, {r1}, {ri}) are inconsistent (misfit {err:.3e})")
    return c


def recover_lambda(oracle, tol=DEFAULT_TOL):
    r0 = oracle.query(1, _T)
    r1 = oracle.query(1, _T - 1)
    ri = oracle.query(1, _T - 1j)
    return trilaterate(r0, r1, ri, tol=tol)


def _corner_modulus(N, p, a12, a23, tol):
    # inverse of ||A_3||^2 = (s + sqrt(s^2 - 4 p^2)) / 2 with s = a12^2 + a23^2 + |a13|^2
    sq = N**2 + (p / N) ** 2 - a12**2 - a23**2
    if sq < -tol * (1 + N**2):
        raise OracleInconsistencyError(f"negative squared modulus {sq:.3e} in the 3x3 norm formula")
    return np.sqrt(max(sq, 0.0))


def recover_base3(oracle, tol=DEFAULT_TOL):
    """Leading 3 x 3 block of the nilpotent part (the oracle must already be translated)."""
    if oracle.order() < 3:
        raise ShapeError("the base case needs order at least 3")
    a12 = oracle.query(2, _T)
    if a12 <= tol:
        raise HypothesisError("zero on the first superdiagonal (a12 = 0)")
    p = oracle.query(3, _T**2)
    a23 = p / a12
    if a23 <= tol * max(1.0, a12):
        raise HypothesisError("zero on the first superdiagonal (a23 = 0)")
    t2 = _T**2
    r0 = _corner_modulus(oracle.query(3, _T), p, a12, a23, tol)
    r1 = _corner_modulus(oracle.query(3, _T - t2 * (1 / p)), p, a12, a23, tol)
    ri = _corner_modulus(oracle.query(3, _T - t2 * (1j / p)), p, a12, a23, tol)
    a13 = trilaterate(r0, r1, ri, tol=max(tol, 1e-7))
    out = np.zeros((3, 3), dtype=np.complex128)
    out[0, 1], out[1, 2], out[0, 2] = a12, a23, a13
    return out


# -- corner solve ---------------------------------------------------------

def _norm_and_grad(M, w):
    """``||M + w E_1n||`` and its gradient in ``(Re w, Im w)``."""
    X = M.copy()
    X[0, -1] += w
    U, s, Vh = np.linalg.svd(X)
    g = np.conj(U[0, 0]) * np.conj(Vh[0, -1])
    return s[0], np.array([g.real, -g.imag])


def _levenberg_marquardt(M, zs, hs, c0, max_iter=200, tol=1e-10):
    """Minimize ``sum_j (||M + (c + z_j) E_1n|| - h_j)**2`` over ``c``."""

    def residuals(c):
        out = np.empty(len(zs))
        J = np.empty((len(zs), 2))
        for j, (z, h) in enumerate(zip(zs, hs)):
            val, grad = _norm_and_grad(M, c + z)
            out[j] = val - h
            J[j] = grad
        return out, J

    x = np.array([c0.real, c0.imag])
    r, J = residuals(complex(*x))
    cost = r @ r
    mu = 1e-3 * max(1.0, np.max(np.diag(J.T @ J)))
    nu = 2.0
    for it in range(max_iter):
        g = J.T @ r
        A = J.T @ J
        try:
            step = np.linalg.solve(A + mu * np.eye(2), -g)
        except np.linalg.LinAlgError:
            mu *= nu
            nu *= 2
            continue
        x_new = x + step
        r_new, J_new = residuals(complex(*x_new))
        cost_new = r_new @ r_new
        predicted = cost - np.sum((r + J @ step) ** 2)
        rho = (cost - cost_new) / predicted if predicted > 0 else -1.0
        if rho > 0:
            x, r, J, cost = x_new, r_new, J_new, cost_new
            mu *= max(1 / 3, 1 - (2 * rho - 1) ** 3)
            nu = 2.0
        else:
            mu *= nu
            nu *= 2
        if np.linalg.norm(step) <= tol * (1 + np.linalg.norm(x)) or np.sqrt(cost) <= 1e-15 * (1 + max(hs)):
            break
    return complex(*x), float(np.max(np.abs(r))), it + 1


def _asymptotic_estimate(zs, hs):
    # for large |w|, ||M + w E||^2 ~ |w|^2 + const, so h_j^2 - |z_j|^2 is affine in c
    zs = np.asarray(zs)
    hs = np.asarray(hs)
    far = np.abs(zs) >= 0.5 * np.max(np.abs(zs))
    if far.sum() < 3:
        return 0j
    lhs = np.column_stack([2 * zs[far].real, 2 * zs[far].imag, np.ones(far.sum())])
    rhs = hs[far] ** 2 - np.abs(zs[far]) ** 2
    sol, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return complex(sol[0], sol[1])


def recover_power_corner(M_known, h_samples, tol=DEFAULT_TOL):
    """Recover the unknown ``(1, n)`` entry ``c`` of a matrix from shifted norms.

    Parameters
    ----------
    M_known : array_like
        The matrix with every entry known except ``(1, n)``, whose stored
        value is ignored.
    h_samples : sequence of (complex, float)
        Pairs ``(z, h)`` where ``h`` is the norm of the true matrix with its
        corner ``c`` replaced by ``c + z``.

    Returns
    -------
    complex
        ``c``.

    Raises
    ------
    OracleInconsistencyError
        No ``c`` reproduces the samples to within ``tol * (1 + max h)``.
    AmbiguityError
        Two well-separated values of ``c`` both reproduce the samples.
    """
    M = check_matrix(M_known).copy()
    M[0, -1] = 0.0
    zs = np.array([complex(z) for z, _ in h_samples])
    hs = np.array([float(h) for _, h in h_samples])
    if len(zs) < 3:
        raise ValueError("need at least three samples")
    limit = tol * (1 + hs.max())
    starts = [0j, _asymptotic_estimate(zs, hs)]
    found = []
    best = None
    for c0 in starts:
        c, res, _ = _levenberg_marquardt(M, zs, hs, c0)
        if best is None or res < best[1]:
            best = (c, res)
        if res <= limit:
            found.append(c)
    if not found:
        raise OracleInconsistencyError(
            f"no corner value reproduces the samples (best misfit {best[1]:.3e}, limit {limit:.3e})"
        )
    spread = max(abs(a - b) for a in found for b in found)
    if spread > 1e-6 * (1 + max(abs(c) for c in found)):
        raise AmbiguityError(f"corner solve has distinct solutions {found}")
    return best[0]


def corner_samples(h0, count=6):
    """Sample shifts ``z``: ``0, s, -s, is, -is, 2s`` with ``s = 2(1 + h0)``, then more on a circle.

    ``h0`` is the norm at ``z = 0``, which bounds the modulus of the unknown
    corner, so every nonzero shift moves the corner well outside the region
    where the norm could be flat.
    """
    s = 2.0 * (1.0 + h0)
    base = [s, -s, 1j * s, -1j * s, 2 * s]
    extra = count - 1 - len(base)
    ring = [3 * s * np.exp(2j * np.pi * (j + 0.5) / max(extra, 1)) for j in range(max(extra, 0))]
    return (base + ring)[: count - 1]


def back_substitute_column(A_partial, i, corner):
    """Solve for ``a_{n-i, n}`` given the corner of ``A**(n-i)``.

    ``A_partial`` holds the leading ``n-1`` block and the entries
    ``a_{k, n}`` for ``k > n - i`` (1-based).  With ``p = n - i``, the row-1
    expansion ``corner = sum_k (A**(p-1))[1, k] a_{k, n}`` over ``k >= p``
    is linear in the single unknown ``a_{p, n}``, whose coefficient is the
    product of superdiagonal entries ``a12 ... a_{p-1, p}``.
    """
    A = check_matrix(A_partial)
    n = A.shape[0]
    p = n - i
    if not 1 <= p <= n - 1:
        raise ShapeError(f"step index {i} out of range 1..{n - 1}")
    lead = A[: n - 1, : n - 1]
    P = np.linalg.matrix_power(lead, p - 1) if p > 1 else np.eye(n - 1, dtype=np.complex128)
    row = P[0]
    known = sum(row[k] * A[k, n - 1] for k in range(p, n - 1))
    coef = row[p - 1]
    if abs(coef) == 0.0:
        raise ReconstructionError("vanishing leading coefficient; upstream entries are corrupt")
    return (corner - known) / coef


def _extend(oracle, lead, n_samples, tol, residuals):
    """Recover the last column of the order-``k`` block given the order ``k-1`` block."""
    k = lead.shape[0] + 1
    A = np.zeros((k, k), dtype=np.complex128)
    A[: k - 1, : k - 1] = lead
    sup = np.diag(lead, 1).real
    prod_prev = float(np.prod(sup))
    where = f"order {k}, step 1"
    top = oracle.query(k, Polynomial.monomial(k - 1))
    A[k - 2, k - 1] = top / prod_prev
    if A[k - 2, k - 1].real <= 1e-8 * max(1.0, np.max(np.abs(lead))):
        raise ReconstructionError("zero on the first superdiagonal", where)
    residuals[(k - 1, k)] = 0.0
    pi = prod_prev * A[k - 2, k - 1].real
    for i in range(2, k):
        where = f"order {k}, step {i}"
        p = k - i
        M = np.linalg.matrix_power(A, p)
        tp = Polynomial.monomial(p)
        h0 = oracle.query(k, tp)
        samples = [(0j, h0)]
        for z in corner_samples(h0, n_samples):
            g = tp + Polynomial.monomial(k - 1, z / pi)
            samples.append((z, oracle.query(k, g)))
        try:
            corner = recover_power_corner(M, samples, tol=tol)
        except UnicellularError as exc:
            raise ReconstructionError(str(exc), where) from exc
        X = M.copy()
        X[0, -1] = corner
        residuals[(p, k)] = max(
            abs(spectral_norm(X + z * _unit(k)) - h) / (1 + h) for z, h in samples
        )
        A[p - 1, k - 1] = back_substitute_column(A, i, corner)
    return A


def _unit(k):
    E = np.zeros((k, k), dtype=np.complex128)
    E[0, -1] = 1.0
    return E


def reconstruct(oracle, n_samples=6, tol=DEFAULT_TOL, verify=2, seed=0, verify_tol=1e-6):
    """Recover the hidden matrix behind ``oracle`` up to diagonal unitary similarity.

    Parameters
    ----------
    oracle : NormOracle
    n_samples : int
        Number of shifts ``z`` (including ``z = 0``) per corner solve.
    tol : float
        Relative tolerance for the consistency checks in each solve.
    verify : int
        Held-out random polynomials replayed per leading block after the
        reconstruction; 0 disables the check.
    seed : int
        Seed for the held-out polynomials.
    verify_tol : float
        Largest acceptable relative mismatch on the held-out queries.

    Raises
    ------
    ReconstructionError
        With ``step`` naming the stage where a solve failed or the
        verification mismatch exceeded ``verify_tol``.
    """
    n = oracle.order()
    residuals = {}
    try:
        lam = recover_lambda(oracle, tol=max(tol, 1e-7))
    except UnicellularError as exc:
        raise ReconstructionError(str(exc), "diagonal") from exc
    work = _Translated(oracle, lam)
    residuals[(1, 1)] = 0.0
    if n == 1:
        N = np.zeros((1, 1), dtype=np.complex128)
    elif n == 2:
        N = np.zeros((2, 2), dtype=np.complex128)
        N[0, 1] = work.query(2, _T)
        if N[0, 1].real <= tol:
            raise ReconstructionError("zero on the first superdiagonal (a12 = 0)", "order 2")
        residuals[(1, 2)] = 0.0
    else:
        try:
            N = recover_base3(work, tol=tol)
        except UnicellularError as exc:
            raise ReconstructionError(str(exc), "order 3") from exc
        residuals.update({(1, 2): 0.0, (2, 3): 0.0, (1, 3): 0.0})
        for k in range(4, n + 1):
            N = _extend(work, N, n_samples, tol, residuals)
    recovered = N + lam * np.eye(n)
    gap = 0.0
    if verify:
        rng = np.random.default_rng(seed)
        for i in range(1, n + 1):
            for _ in range(verify):
                r = np.sqrt(rng.uniform(size=i + 1))
                f = Polynomial(r * np.exp(2j * np.pi * rng.uniform(size=i + 1)), center=lam)
                a = oracle.query(i, f)
                b = spectral_norm(eval_matrix(f, recovered[:i, :i]))
                gap = max(gap, abs(a - b) / (1 + max(a, b)))
        if gap > verify_tol:
            raise ReconstructionError(f"held-out norms disagree (gap {gap:.3e})", "verification")
    return ReconstructionReport(
        recovered=recovered,
        lambda_=lam,
        residuals=residuals,
        query_count=oracle.query_count,
        verification_gap=gap,
    )
