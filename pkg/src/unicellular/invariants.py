"""Unitary similarity invariants evaluated as finite tests.

Each test compares two matrices through some family of quantities that
unitary similarity preserves (norms of polynomials, traces of words in
``A`` and ``A*``, norms of Kronecker pencils) and returns an
:class:`InvariantReport`.  A ``matched`` report only says that no
obstruction was found in the finite family that was tried.
"""
import re
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BudgetError, ShapeError
from .linalg_core import DEFAULT_TOL, check_matrix, spectral_norm
from .poly import Polynomial, eval_matrix

__all__ = [
    "InvariantReport",
    "PolynomialFamily",
    "arveson_test",
    "compression_2x2",
    "enumerate_words",
    "format_word",
    "norm_profile",
    "norms_match",
    "numerical_range_support",
    "parse_word",
    "specht_test",
    "word_trace",
]


def _relgap(a, b):
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


def _random_disc(rng, size):
    r = np.sqrt(rng.uniform(size=size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


@dataclass(frozen=True)
class PolynomialFamily:
    """A finite, ordered list of polynomials standing in for all of C[t]."""

    polys: tuple
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if not self.polys:
            raise ValueError("a polynomial family must be nonempty")

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __add__(self, other):
        return PolynomialFamily(self.polys + other.polys, f"{self.description} + {other.description}")

    @classmethod
    def monomials(cls, max_degree, min_degree=0):
        polys = [Polynomial.monomial(k) for k in range(min_degree, max_degree + 1)]
        return cls(polys, f"monomials t^{min_degree}..t^{max_degree}")

    @classmethod
    def random(cls, size, max_degree, seed=0):
        """``size`` polynomials of degree ``max_degree``, coefficients uniform on the unit disc."""
        rng = np.random.default_rng(seed)
        polys = [Polynomial(_random_disc(rng, max_degree + 1)) for _ in range(size)]
        return cls(polys, f"seeded random degree <= {max_degree} (size {size}, seed {seed})")

    @classmethod
    def default(cls, n, size=64, max_degree=None, seed=0):
        """Monomials up to ``t**n`` followed by ``size`` seeded random polynomials."""
        d = n if max_degree is None else max_degree
        return cls.monomials(d) + cls.random(size, d, seed)


@dataclass
class InvariantReport:
    matched: bool
    worst_gap: float
    witness: object = None
    queries: int = 0
    note: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self):
        w = self.witness
        if isinstance(w, Polynomial):
            w = {"poly": w}
        return {
            "matched": bool(self.matched),
            "worst_gap": float(self.worst_gap),
            "witness": w,
            "queries": int(self.queries),
            "note": self.note,
            **self.details,
        }


def _check_pair(A, B):
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    return A, B


def norm_profile(A, family):
    """``[||f(A)|| for f in family]``."""
    A = check_matrix(A)
    return [spectral_norm(eval_matrix(f, A)) for f in family]


def norms_match(A, B, family, tol=DEFAULT_TOL):
    """Compare ``||f(A)||`` and ``||f(B)||`` over a polynomial family.

    The gap for one polynomial is ``|a - b| / (1 + max(a, b))``; the
    witness is the polynomial with the largest gap.
    """
    A, B = _check_pair(A, B)
    pa = norm_profile(A, family)
    pb = norm_profile(B, family)
    gaps = [_relgap(a, b) for a, b in zip(pa, pb)]
    j = int(np.argmax(gaps))
    return InvariantReport(
        matched=gaps[j] <= tol,
        worst_gap=float(gaps[j]),
        witness=family.polys[j],
        queries=2 * len(family),
        note=f"family: {family.description}",
        details={"norm_a": pa[j], "norm_b": pb[j]},
    )


# -- words in x, y ---------------------------------------------------------

_WORD_TOKEN = re.compile(r"([xy])(?:\^(\d+))?")


def parse_word(text):
    """Accept ``"xyyxxy"`` or ``"xy^2x^2y"``; return the expanded letter string."""
    text = text.replace(" ", "")
    out = []
    pos = 0
    for m in _WORD_TOKEN.finditer(text):
        if m.start() != pos:
            break
        out.append(m.group(1) * int(m.group(2) or 1))
        pos = m.end()
    if pos != len(text) or not out:
        raise ValueError(f"not a word in x, y: {text!r}")
    return "".join(out)


def format_word(word):
    """Run-length form, e.g. ``"xyyxxy"`` -> ``"xy^2x^2y"``."""
    return "".join(
        c + (f"^{len(run)}" if len(run) > 1 else "")
        for run, c in ((m.group(0), m.group(0)[0]) for m in re.finditer(r"x+|y+", word))
    )


def _min_rotation(word):
    return min(word[k:] + word[:k] for k in range(len(word)))


def word_trace(word, A):
    """``Trace w(A, A*)`` with ``x -> A`` and ``y -> A*``, by direct multiplication."""
    A = check_matrix(A)
    P = np.eye(A.shape[0], dtype=np.complex128)
    for c in parse_word(word):
        P = P @ (A if c == "x" else A.conj().T)
    return complex(np.trace(P))


def enumerate_words(max_len):
    """All words of length 1..max_len, by length then lexicographically (x < y)."""
    level = [""]
    for _ in range(max_len):
        level = [w + c for w in level for c in "xy"]
        yield from level


def _trace_levels(A, max_len):
    # prefix products of the previous level; level L is in lexicographic order
    Astar = A.conj().T
    prods = [np.eye(A.shape[0], dtype=np.complex128)]
    for _ in range(max_len):
        prods = [M for P in prods for M in (P @ A, P @ Astar)]
        yield np.einsum("kii->k", np.asarray(prods))


def specht_test(A, B, max_len=None, tol=DEFAULT_TOL, words=None, max_words=1 << 20, certified_bound=None):
    """Compare ``Trace w(A, A*)`` and ``Trace w(B, B*)`` over words ``w``.

    Without ``words``, every word of length ``1..max_len`` (default ``2n``)
    is tried in :func:`enumerate_words` order; the witness is the first word
    whose relative trace gap exceeds ``tol``.  Traces are invariant under
    cyclic rotation of the word, so the witness is also reported by its
    lexicographically least rotation under ``"cyclic_class"``.

    A match certifies unitary similarity only when ``certified_bound`` is
    given and ``max_len >= certified_bound``; otherwise the report says no
    obstruction was found up to the length tried.

    Raises
    ------
    BudgetError
        If the enumeration would exceed ``max_words`` words.
    """
    A, B = _check_pair(A, B)
    n = A.shape[0]
    if words is not None:
        words = [parse_word(w) for w in words]
        ta = [word_trace(w, A) for w in words]
        tb = [word_trace(w, B) for w in words]
        max_len = max(len(w) for w in words)
    else:
        L = 2 * n if max_len is None else int(max_len)
        if L < 1:
            raise ValueError("max_len must be positive")
        total = 2 ** (L + 1) - 2
        if total > max_words:
            raise BudgetError(f"{total} words up to length {L} exceeds budget {max_words}")
        words = list(enumerate_words(L))
        ta = np.concatenate(list(_trace_levels(A, L)))
        tb = np.concatenate(list(_trace_levels(B, L)))
        max_len = L
    gaps = np.array([_relgap(a, b) for a, b in zip(ta, tb)])
    failing = np.nonzero(gaps > tol)[0]
    witness = None
    if failing.size:
        j = int(failing[0])
        witness = {
            "word": format_word(words[j]),
            "letters": words[j],
            "cyclic_class": format_word(_min_rotation(words[j])),
            "trace_a": complex(ta[j]),
            "trace_b": complex(tb[j]),
        }
    certified = certified_bound is not None and max_len >= certified_bound
    if failing.size:
        note = "trace obstruction found"
    elif certified:
        note = f"all words up to the certified bound {certified_bound} agree"
    else:
        note = f"no obstruction found up to length {max_len}"
    return InvariantReport(
        matched=not failing.size,
        worst_gap=float(gaps.max()),
        witness=witness,
        queries=2 * len(words),
        note=note,
        details={"words_checked": len(words), "certified": bool(certified and not failing.size)},
    )


def arveson_test(A, B, samples=32, seed=0, tol=DEFAULT_TOL):
    """Compare ``||A (x) C + I (x) D||`` with the same for ``B`` over random ``C, D``.

    ``C`` and ``D`` have independent standard complex Gaussian entries.
    Separation is only guaranteed for irreducible ``A`` and ``B``; that
    is not checked here.
    """
    A, B = _check_pair(A, B)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    eye = np.eye(n)
    gaps = []
    for _ in range(samples):
        C = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        D = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = spectral_norm(np.kron(A, C) + np.kron(eye, D))
        b = spectral_norm(np.kron(B, C) + np.kron(eye, D))
        gaps.append(_relgap(a, b))
    j = int(np.argmax(gaps))
    return InvariantReport(
        matched=gaps[j] <= tol,
        worst_gap=float(gaps[j]),
        witness={"sample": j, "seed": seed},
        queries=2 * samples,
        note=f"{samples} Gaussian (C, D) pairs",
    )


def numerical_range_support(A, theta):
    """``max Re(e^{-i theta} z)`` over the numerical range of ``A``.

    Computed as the largest eigenvalue of the Hermitian part of
    ``e^{-i theta} A``.
    """
    A = check_matrix(A)
    X = np.exp(-1j * theta) * A
    H = (X + X.conj().T) / 2
    return float(np.linalg.eigvalsh(H)[-1])


def compression_2x2(A, i):
    """Compression of ``A`` to ``span{e_i, e_{i+1}}`` (``i`` is 1-based)."""
    A = check_matrix(A)
    n = A.shape[0]
    if not 1 <= i <= n - 1:
        raise ShapeError(f"i={i} out of range 1..{n - 1}")
    return A[i - 1 : i + 1, i - 1 : i + 1].copy()
