"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class DioseriesError(Exception):
    code = "Error"


class PreconditionError(DioseriesError, ValueError):
    """Input violates an operation's documented precondition."""

    code = "PreconditionError"


class InvalidAngle(PreconditionError):
    code = "InvalidAngle"


class ZeroDenominator(InvalidAngle):
    code = "ZeroDenominator"


class NotReduced(PreconditionError):
    code = "NotReduced"


class InvalidN(PreconditionError):
    code = "InvalidN"


class PrecisionExhausted(DioseriesError):
    """The available precision of theta (or the working budget) cannot resolve the request."""

    code = "PrecisionExhausted"


class DivergentInput(PreconditionError):
    code = "DivergentInput"


class RationalInput(PreconditionError):
    code = "RationalInput"


class InsufficientData(DioseriesError):
    code = "InsufficientData"


class InsufficientExpansion(DioseriesError):
    code = "InsufficientExpansion"


class EmptyInterval(PreconditionError):
    code = "EmptyInterval"


class BudgetTooSmall(PreconditionError):
    code = "BudgetTooSmall"


class InvariantViolation(DioseriesError):
    """An internal identity failed. Signals a bug, never a property of the input."""

    code = "InvariantViolation"


class CertificateFailed(InvariantViolation):
    code = "CertificateFailed"


class IdentityViolated(InvariantViolation):
    code = "IdentityViolated"


class InvalidAlpha(PreconditionError):
    code = "InvalidAlpha"
