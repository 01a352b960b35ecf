"""
Exception hierarchy for fewsolve.

Every error carries the process exit status the command-line front end reports for it.
"""


class FewnomialError(Exception):
    """Base class for all fewsolve errors."""

    exit_status = 4


class ParseError(FewnomialError, ValueError):
    """Polynomial text or a batch line could not be parsed."""

    exit_status = 2


class InvalidRequest(FewnomialError, ValueError):
    """A request violates an operation's precondition."""

    exit_status = 2


class ZeroPolynomial(InvalidRequest):
    pass


class NeedsSFirst(InvalidRequest):
    """The polynomial must have a constant term (apply op_S first)."""


class WrongArity(InvalidRequest):
    """The polynomial does not have the required number of terms."""


class NotPrimitive(InvalidRequest):
    """Exponents share a common factor greater than one."""


class DegreeTooLarge(InvalidRequest):
    """Degree exceeds what the dense oracle accepts."""


class AlphaUnknown(InvalidRequest):
    """No proven alpha bound exists and strict mode forbids a heuristic one."""


class NotDampened(InvalidRequest):
    """Some member of the derivative family has two inflections in one cell."""


class PrecisionExhausted(FewnomialError, ArithmeticError):
    """A sign could not be certified within the configured precision cap."""

    exit_status = 3


class SingularPoint(FewnomialError, ArithmeticError):
    """The first derivative vanishes where a Newton quantity needs it."""

    exit_status = 3


class InvariantViolation(FewnomialError, AssertionError):
    """An internal guarantee failed; indicates a bug, never bad input."""

    exit_status = 4
