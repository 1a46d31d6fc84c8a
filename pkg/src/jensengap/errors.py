"""Exception types shared across the package."""


class JensenGapError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(JensenGapError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(JensenGapError, ValueError):
    """A point, or a distribution's support, falls outside the function's interval."""


class EvaluationError(JensenGapError, ArithmeticError):
    """The function returned a non-finite value where a finite one is required."""


class DerivativeEstimateError(JensenGapError, ArithmeticError):
    """Finite-difference slope estimation failed to converge.

    Attributes:
        residual: size of the last Richardson correction, in slope units.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class ConditionViolationError(JensenGapError, ValueError):
    """The function fails a structural condition (sign or growth) it was declared to satisfy."""


class UnboundedEnvelopeError(JensenGapError, ArithmeticError):
    """The envelope ratio diverges, so no finite constant exists."""


class DegenerateEnvelopeError(JensenGapError, ArithmeticError):
    """The envelope infimum is indistinguishable from zero; the bound would be vacuous."""
