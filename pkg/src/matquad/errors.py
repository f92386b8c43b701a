"""Exception hierarchy.

Every error carries a ``code`` string (the class name) and an optional
``details`` dict with the diagnostic values that triggered it.
"""
from __future__ import annotations


class MatquadError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 4

    def __init__(self, message: str = "", **details):
        super().__init__(message or type(self).__name__)
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__


class NotSymmetric(MatquadError):
    exit_code = 3


class ParseError(MatquadError):
    exit_code = 3


class DegreeTooHigh(MatquadError):
    exit_code = 3


class OrderTooHigh(MatquadError):
    exit_code = 3


class IndexOutOfRange(MatquadError):
    exit_code = 3


class Inconsistent(MatquadError):
    pass


class NoRepresentingMeasure(MatquadError):
    exit_code = 2


class InfeasibleMultiplicity(MatquadError):
    exit_code = 2


class Infeasible(MatquadError):
    exit_code = 2


class ConsistencyViolation(MatquadError):
    pass


class Z1SearchFailed(MatquadError):
    pass


class FlatnessViolation(MatquadError):
    pass


class RelationViolation(MatquadError):
    pass


class DegenerateZeroPolynomial(MatquadError):
    pass


class ResidualRootAtT(MatquadError):
    pass


class SingularVandermonde(MatquadError):
    pass


class MassNotPSD(MatquadError):
    pass
