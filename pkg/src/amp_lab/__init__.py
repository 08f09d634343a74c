"""Numerical lab for the 1D Dirichlet p-Laplacian with a forcing weight.

Solves -(|u'|^{p-2} u')' = lambda |u|^{p-2} u + f on (a, b), u(a) = u(b) = 0,
with P1 finite elements: eigenpairs, the constrained Rayleigh minimum
lambda*_f, ground states by window, and the anti-maximum threshold lambda_f.
"""

__version__ = "0.1.0"

from .amp import (
    AmpEstimate,
    BranchPoint,
    VerificationReport,
    branch_to_csv,
    branch_trace,
    lambda_f_estimate,
    paper_example_lambda0,
    verify_theorems,
)
from .config import RunConfig, parse_config
from .estimators import AmpThreshold, EigenSolver, GroundStateSolver, LambdaStar
from .fem import Functional, GridFunction, Mesh1D, SignClass, WeightFunction
from .lambda_star import LambdaStarResult, lambda_star, minimizer_is_solution_check
from .options import DEFAULT_OPTIONS, SolverOptions
from .solver import Solution, linear_solve_p2, solve_ground_state, spectral_context
from .spectrum import first_eigenpair, second_eigenpair, shooting_eigenvalue

__all__ = [
    "AmpEstimate", "AmpThreshold", "BranchPoint", "DEFAULT_OPTIONS", "EigenSolver",
    "Functional", "GridFunction", "GroundStateSolver", "LambdaStar", "LambdaStarResult",
    "Mesh1D", "RunConfig", "SignClass", "Solution", "SolverOptions", "VerificationReport",
    "WeightFunction", "branch_to_csv", "branch_trace", "first_eigenpair", "lambda_f_estimate",
    "lambda_star", "linear_solve_p2", "minimizer_is_solution_check", "paper_example_lambda0",
    "parse_config", "second_eigenpair", "shooting_eigenvalue", "solve_ground_state",
    "spectral_context", "verify_theorems",
]
