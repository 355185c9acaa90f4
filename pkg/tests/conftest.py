import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_matrix(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_generator(rng, n):
    """Toeplitz generator: z0 in the unit disc, |z1| in [0.1, 1], |z_k| <= |z1| for k >= 2."""
    from unicellular.toeplitz import UpperToeplitz

    z1 = rng.uniform(0.1, 1) * np.exp(2j * np.pi * rng.uniform())
    radius = np.sqrt(rng.uniform(size=n)) * np.r_[1, 1, np.full(n - 2, abs(z1))]
    z = radius * np.exp(2j * np.pi * rng.uniform(size=n))
    z[1] = z1
    return UpperToeplitz(z[:n])


def hidden_matrix(rng, n, lam=None):
    """Upper triangular, constant diagonal, |entries| <= 10, superdiagonal moduli in [0.1, 10]."""
    if lam is None:
        lam = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
    A = np.triu(rng.uniform(-7, 7, (n, n)) + 1j * rng.uniform(-7, 7, (n, n)), 2)
    A += np.diag(rng.uniform(0.1, 10, n - 1) * np.exp(2j * np.pi * rng.uniform(size=n - 1)), 1)
    return A + lam * np.eye(n)


def positive_canonical(A):
    """Independent phase normalization: scale columns so the superdiagonal is |a|."""
    n = A.shape[0]
    d = np.ones(n, dtype=complex)
    for i in range(n - 1):
        d[i + 1] = d[i] * np.exp(-1j * np.angle(A[i, i + 1]))
    return np.diag(d.conj()) @ A @ np.diag(d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {line}")
