"""Exception hierarchy. Each class maps to a stable CLI exit code."""


class KnotSpreadError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class CurveParseError(KnotSpreadError):
    """Malformed curve file or invalid construction parameters."""

    exit_code = 2


class NotEmbeddedError(KnotSpreadError):
    """Curve failed the embeddedness check."""

    exit_code = 3

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class QuadratureError(KnotSpreadError):
    """Quadrature could not reach the requested tolerance."""

    exit_code = 4


class SingularityError(QuadratureError):
    """Shared-vertex angle too close to a fold-back; kernel too singular."""


class LocalityError(KnotSpreadError):
    """Knot insertion ball touches more of the host than one edge subarc."""

    exit_code = 5


class InfeasibleWindowError(KnotSpreadError):
    """No curve satisfying the thickness/length window was reachable."""

    exit_code = 6


class GuardMismatchError(KnotSpreadError):
    """Knot determinant changed during an optimization run."""

    exit_code = 7
