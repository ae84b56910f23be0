"""Exactness certification and global solving for forest-structured QCQPs.

The package certifies, ahead of any solve, that the semidefinite relaxation
of a QCQP whose aggregate sparsity pattern is a forest admits a rank-one
optimal solution, then recovers that solution. A single-constraint pipeline
reduces generalized trust-region subproblems to certified-exact form by
simultaneous tridiagonalization of the homogenized matrix pair.
"""

from . import errors
from .exactness import ExactnessCertificate, RecoveredSolution, certify, solve_certified
from .fileio import load_instance, save_instance
from .gtrs import GtrsResult, solve_gtrs
from .model import (
    HomogeneousQcqp,
    QcqpInstance,
    dehomogenize,
    homogenize,
    homogenize_gtrs,
    verify_assumption_b,
)
from .sparsity import ForestAnalysis, analyze_forest, build_graph
from .tridiag import (
    TridiagonalizationResult,
    choose_gamma,
    tridiagonalize_pair,
    tridiagonalize_with_fallback,
)

__version__ = "0.1.0"

__all__ = [
    "ExactnessCertificate",
    "ForestAnalysis",
    "GtrsResult",
    "HomogeneousQcqp",
    "QcqpInstance",
    "RecoveredSolution",
    "TridiagonalizationResult",
    "analyze_forest",
    "build_graph",
    "certify",
    "choose_gamma",
    "dehomogenize",
    "errors",
    "homogenize",
    "homogenize_gtrs",
    "load_instance",
    "save_instance",
    "solve_certified",
    "solve_gtrs",
    "tridiagonalize_pair",
    "tridiagonalize_with_fallback",
    "verify_assumption_b",
    "__version__",
]
