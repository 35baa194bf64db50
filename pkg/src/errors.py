# src/errors.py

"""
Error taxonomy shared by every module of the laboratory.
"""


class EigenflowError(Exception):
    """Base class for all laboratory errors.

    ``node`` is the flat row-major index of the grid node where the error
    was detected, or None when the error is not tied to a node.
    """

    def __init__(self, message: str = "", node: int | None = None):
        if node is not None:
            message = f"{message} (node {node})"
        super().__init__(message)
        self.node = node


class NonSquare(EigenflowError):
    pass


class ZeroMatrix(EigenflowError):
    pass


class NotHermitian(EigenflowError):
    pass


class NotNormal(EigenflowError):
    pass


class NoConvergence(EigenflowError):
    pass


class ShapeError(EigenflowError):
    pass


class NotDensityMatrix(EigenflowError):
    pass


class BadParam(EigenflowError):
    pass


# Lab operations name their parameter errors BadParams.
BadParams = BadParam


class SizeMismatch(EigenflowError):
    pass


class TooLarge(EigenflowError):
    pass


class NotUnitModulus(EigenflowError):
    pass


class DegeneratePair(EigenflowError):
    pass


class NotRealTuple(EigenflowError):
    pass


class AxisOutOfRange(EigenflowError):
    pass


class BadExponent(EigenflowError):
    pass


class PairBudgetExceeded(EigenflowError):
    pass


class GridMismatch(EigenflowError):
    pass


class NotCurve(EigenflowError):
    pass


class SingularNode(EigenflowError):
    """Raised when the smallest singular value at a node falls below the floor."""

    def __init__(self, message: str = "", node: int | None = None, sigma: float | None = None):
        super().__init__(message, node)
        self.sigma = sigma


class AllEqual(EigenflowError):
    pass


class GapTooSmall(EigenflowError):
    pass


class ClusterFlip(EigenflowError):
    pass


class ResidualTooLarge(EigenflowError):
    """Raised when a computed factorization misses its residual bound."""


class UnsupportedKind(EigenflowError):
    pass


class ManifestError(EigenflowError):
    """Raised when a matrix literal or grid manifest cannot be read."""
