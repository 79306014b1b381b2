"""
Module for numeric evaluation of the diagram integrals I_G.

### Types
- DiagramValue: values over boundary configurations with standard errors (and per-batch means)
- QuadratureOracle: exact Gibbs expectations on a torus of at most 9 sites
- IdentityCheck: one side-by-side comparison of an exact identity

### Operations
- eval_pure: pure Feynman diagrams, FFT chain elimination then einsum over the residual core
- eval_mixed: graphs with Phi insertions, sample averages of Wick-ordered contractions
- wick_power, evaluate_terms, oracle_moments
- term_values_frame: per-term, per-configuration diagram values as a table
- identity_battery and the single checks it runs
"""
from ._value import DiagramValue, evaluate_terms, term_values_frame
from ._contraction import default_configurations
from ._pure import DiagramBudgetError, PureEvaluator, eval_pure, loop_count
from ._mixed import InsufficientDataError, MixedEvaluator, eval_mixed, sample_values, wick_power
from ._oracle import QuadratureConvergenceError, QuadratureOracle, covariance_matrix, oracle_moments
from ._identities import (
    IdentityCheck,
    check_cubic_ibp,
    check_expansion_identity,
    check_three_point_ibp,
    check_two_point_ibp,
    check_wick_square,
    identity_battery,
    two_point_configurations,
)


__all__ = [
    DiagramValue,
    evaluate_terms,
    term_values_frame,
    default_configurations,
    DiagramBudgetError,
    PureEvaluator,
    eval_pure,
    loop_count,
    InsufficientDataError,
    MixedEvaluator,
    eval_mixed,
    sample_values,
    wick_power,
    QuadratureConvergenceError,
    QuadratureOracle,
    covariance_matrix,
    oracle_moments,
    IdentityCheck,
    check_cubic_ibp,
    check_expansion_identity,
    check_three_point_ibp,
    check_two_point_ibp,
    check_wick_square,
    identity_battery,
    two_point_configurations,
]
