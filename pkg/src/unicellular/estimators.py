"""scikit-learn style wrappers around reconstruction, canonical forms and the similarity decision.

Inputs are single square matrices or sequences of them rather than
feature tables, so these estimators follow the fit/transform/predict and
get_params/set_params conventions without being drop-in pipeline steps.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .linalg_core import check_matrix, spectral_norm
from .poly import eval_matrix
from .reconstruct import NormOracle, reconstruct, simulate_oracle
from .similarity import canonical_form, decide_unitary_similarity

__all__ = [
    "CanonicalFormTransformer",
    "NormReconstructor",
    "UnitarySimilarityClassifier",
    "check_matrix_batch",
]


def check_matrix_batch(X, name="X"):
    """Validate one matrix or a sequence of equal-order matrices; return an ``(m, n, n)`` array."""
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim == 2:
        return check_matrix(arr, name)[None]
    if arr.ndim != 3:
        raise ValueError(f"{name} must be a matrix or a stack of matrices, got ndim={arr.ndim}")
    return np.stack([check_matrix(M, f"{name}[{k}]") for k, M in enumerate(arr)])


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class NormReconstructor(BaseEstimator):
    """Recover a matrix from a norm oracle.

    ``fit`` accepts a :class:`NormOracle` or an explicit upper triangular
    matrix, which is wrapped in a simulated oracle.
    """

    def __init__(self, n_samples=6, tol=1e-9, verify=2, seed=0):
        self.n_samples = n_samples
        self.tol = tol
        self.verify = verify
        self.seed = seed

    def fit(self, oracle, y=None):
        if not isinstance(oracle, NormOracle):
            oracle = simulate_oracle(check_matrix(oracle), tol=1e-7)
        report = reconstruct(oracle, n_samples=self.n_samples, tol=self.tol, verify=self.verify, seed=self.seed)
        self.report_ = report
        self.recovered_ = report.recovered
        self.lambda_ = report.lambda_
        self.query_count_ = report.query_count
        return self

    def predict(self, polys, i=None):
        """Norms ``||f(A_i)||`` of the recovered matrix (``i`` defaults to ``n``)."""
        _check_fitted(self, "recovered_")
        n = self.recovered_.shape[0]
        i = n if i is None else i
        block = self.recovered_[:i, :i]
        return np.array([spectral_norm(eval_matrix(f, block, center=self.lambda_)) for f in polys])


class CanonicalFormTransformer(TransformerMixin, BaseEstimator):
    """Map unicellular matrices to their positive-superdiagonal canonical form.

    Stateless: ``fit`` only validates.  ``transform`` returns an array of
    the same shape as its input; the unitaries of the last call are kept in
    ``witnesses_``.
    """

    def __init__(self, upper_triangular=False):
        self.upper_triangular = upper_triangular

    def fit(self, X, y=None):
        X = check_matrix_batch(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        _check_fitted(self, "n_features_in_")
        single = np.asarray(X).ndim == 2
        X = check_matrix_batch(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected order {self.n_features_in_}, got {X.shape[1]}")
        out = []
        self.witnesses_ = []
        for M in X:
            W, C = canonical_form(M, upper_triangular=self.upper_triangular)
            out.append(C)
            self.witnesses_.append(W)
        out = np.stack(out)
        return out[0] if single else out


class UnitarySimilarityClassifier(BaseEstimator):
    """Predict the similarity verdict of each input against a fitted reference matrix."""

    def __init__(self, tol=1e-8):
        self.tol = tol

    def fit(self, A, y=None):
        self.reference_ = check_matrix(A)
        return self

    def predict(self, X):
        _check_fitted(self, "reference_")
        X = check_matrix_batch(X)
        self.reports_ = [decide_unitary_similarity(self.reference_, B, tol=self.tol) for B in X]
        return np.array([r.verdict for r in self.reports_])
