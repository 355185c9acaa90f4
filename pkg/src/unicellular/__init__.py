"""Unitary similarity of unicellular matrices and their reconstruction from polynomial norms."""
from .estimators import CanonicalFormTransformer, NormReconstructor, UnitarySimilarityClassifier
from .exceptions import (
    AmbiguityError,
    BudgetError,
    ConvergenceError,
    HypothesisError,
    NotInAlgebraError,
    NumericalRankError,
    OracleInconsistencyError,
    ReconstructionError,
    ShapeError,
    UnicellularError,
)
from .invariants import (
    InvariantReport,
    PolynomialFamily,
    arveson_test,
    norm_profile,
    norms_match,
    numerical_range_support,
    specht_test,
)
from .linalg_core import UnitaryWitness, check_matrix, eigenvalues, schur, spectral_norm
from .poly import Polynomial, eval_matrix, generator_polynomial, minimal_polynomial
from .reconstruct import CommandOracle, NormOracle, SimulatedOracle, reconstruct, simulate_oracle
from .similarity import (
    SimilarityReport,
    canonical_form,
    counterexample_pair,
    decide_unitary_similarity,
    is_unicellular,
    principal_norm_profile,
)
from .toeplitz import UpperToeplitz, alternating_sum, ones_nilpotent, shift_matrix, volterra_norm_estimate

__version__ = "0.1.0"
