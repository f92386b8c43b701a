"""Minimal matrix-valued quadrature rules with a prescribed atom.

Given matrix moments ``S_0, ..., S_{2n}``, decide which ranks ``m`` of the
mass at a prescribed point ``t`` are attainable by a minimal representing
measure, construct such a measure, and solve the strong truncated Hamburger
problem for Laurent moment sequences.
"""
from .dependency import (
    DependencyProfile,
    FeasibilityResult,
    compute_A,
    compute_B,
    dependency_profile,
    feasibility,
    uniqueness_at,
    zero_multiplicity_possible,
)
from .errors import MatquadError
from .hamburger import LaurentMomentSequence, hamburger_feasible, solve_hamburger
from .kernels import BACKEND
from .moments import MatrixPolynomial, MomentSequence, has_representing_measure, moment_matrix, shift_sequence
from .quadrature import AtomicMeasure, QuadratureResult, solve_quadrature, verify_measure

__all__ = [
    "BACKEND",
    "AtomicMeasure",
    "DependencyProfile",
    "FeasibilityResult",
    "LaurentMomentSequence",
    "MatquadError",
    "MatrixPolynomial",
    "MomentSequence",
    "QuadratureResult",
    "compute_A",
    "compute_B",
    "dependency_profile",
    "feasibility",
    "hamburger_feasible",
    "has_representing_measure",
    "moment_matrix",
    "shift_sequence",
    "solve_hamburger",
    "solve_quadrature",
    "uniqueness_at",
    "verify_measure",
    "zero_multiplicity_possible",
]

__version__ = "0.1.0"
