"""Independent corner search used as a test oracle: exhaustive grid, then simplex polish."""
import numpy as np
from scipy.optimize import minimize


def _misfits(M, samples, cs):
    # batched: one stacked SVD per sample over all candidate corners
    total = np.zeros(cs.shape)
    for z, h in samples:
        X = np.broadcast_to(M, cs.shape + M.shape).copy()
        X[..., 0, -1] = cs + z
        total += (np.linalg.svd(X, compute_uv=False)[..., 0] - h) ** 2
    return total


def brute_force_corner(M, samples, grid=200):
    """Minimize the sample misfit over a ``grid x grid`` box of radius ``h(0)``, then polish."""
    M = np.array(M, dtype=complex)
    M[0, -1] = 0
    bound = samples[0][1]  # ||M + c E|| >= |c|
    xs = np.linspace(-bound, bound, grid)
    cs = xs[None, :] + 1j * xs[:, None]
    j = np.unravel_index(np.argmin(_misfits(M, samples, cs)), cs.shape)
    start = cs[j]
    res = minimize(
        lambda v: float(_misfits(M, samples, np.array([complex(*v)]))[0]),
        [start.real, start.imag],
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-28, "maxiter": 4000},
    )
    return complex(*res.x)
