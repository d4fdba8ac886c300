"""Optimal irreversible investment under exponential Levy uncertainty.

The package solves for the investment boundary b(u) characterized by

    E[ pi_c(e^{u + I}, b(u)) ] = r,

where I is the running infimum of the shock process over an independent
exponential horizon with rate r, then verifies the answer: Wiener-Hopf
factorization identities, an integral-equation residual, simulation of the
induced capacity policy, and first-order optimality conditions.
"""

from .boundary import (BoundaryTable, ExtrapolationWarning, cobb_douglas_boundary,
                       ces_boundary_constant, ces_polynomial_constant,
                       closed_form_boundary_table, integral_equation_residual,
                       log_boundary, marginal_gap, solve_boundary_grid,
                       solve_boundary_point)
from .config import ExperimentConfig, load_config, parse_config
from .errors import (BracketFailure, ConditionViolation, ConstructionError,
                     DomainError, LevyInvestError, MonotonicityViolation,
                     ParseError, UnsupportedModel, ValidationError)
from .levy import (ExtremaPool, ExtremaSample, Family, LevyModel, SamplePath,
                   default_step, laplace_exponent, path_extrema, sample_extrema,
                   sample_horizon, sample_path)
from .policy import (ComparisonResult, ComparisonRow, FOCEntry, FOCReport,
                     PolicyEvaluation, StoppingRule, compare_policies,
                     default_t_max, evaluate_profit, foc_residuals,
                     simulate_policy, stopping_value)
from .profit import (AssumptionCheck, AssumptionReport, ProfitFunction,
                     check_assumptions, cobb_douglas, ces, custom, evaluate,
                     kappa, log_profit, marginal_profit)
from .roots import bisect, expand_bracket_geometric
from .wiener_hopf import (EXACT_RATIONAL, MONTE_CARLO, WienerHopfFactors,
                          cramer_roots, exact_factors, inf_moment,
                          inf_moment_with_se, sample_triplet, sup_moment,
                          sup_moment_diagnostics, sup_moment_with_se,
                          wh_identity_residual)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "LevyInvestError", "ConstructionError", "DomainError", "UnsupportedModel",
    "BracketFailure", "MonotonicityViolation", "ConditionViolation",
    "ParseError", "ValidationError",
    # shock models
    "Family", "LevyModel", "SamplePath", "ExtremaSample", "ExtremaPool",
    "laplace_exponent", "default_step", "sample_horizon", "sample_path",
    "path_extrema", "sample_extrema",
    # factorization
    "WienerHopfFactors", "EXACT_RATIONAL", "MONTE_CARLO", "cramer_roots",
    "exact_factors", "sample_triplet", "inf_moment", "inf_moment_with_se",
    "sup_moment", "sup_moment_with_se", "sup_moment_diagnostics",
    "wh_identity_residual",
    # profit
    "ProfitFunction", "cobb_douglas", "ces", "log_profit", "custom",
    "evaluate", "marginal_profit", "kappa", "AssumptionCheck",
    "AssumptionReport", "check_assumptions",
    # boundary
    "BoundaryTable", "ExtrapolationWarning", "marginal_gap",
    "solve_boundary_point", "solve_boundary_grid", "integral_equation_residual",
    "cobb_douglas_boundary", "ces_boundary_constant", "ces_polynomial_constant",
    "log_boundary", "closed_form_boundary_table",
    # policy
    "StoppingRule", "PolicyEvaluation", "ComparisonRow", "ComparisonResult",
    "FOCEntry", "FOCReport", "simulate_policy", "evaluate_profit",
    "compare_policies", "foc_residuals", "stopping_value", "default_t_max",
    # numerics
    "bisect", "expand_bracket_geometric",
    # configuration
    "ExperimentConfig", "load_config", "parse_config",
]
