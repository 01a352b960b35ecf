"""
Scalar backends.

Polynomial coefficients and evaluation points are plain backend values: ``Fraction`` for
``ExactRational`` and private-context ``mpmath.mpf`` for ``AdaptiveFloat``. Algorithms
never branch on the concrete type; they call the backend for anything beyond ring
arithmetic (signs, rounding, square roots, conversion).
"""

from fractions import Fraction
from math import isqrt

try:
    from mpmath.ctx_iv import IVContext
except ImportError:  # mpmath < 1.4
    from mpmath.ctx_iv import MPIntervalContext as IVContext
from mpmath.ctx_mp import MPContext

from .config import (
    BACKEND_EXACT,
    BACKEND_FLOAT,
    DEFAULT_FLOAT_PRECISION,
    MAX_FLOAT_PRECISION,
    MIN_FLOAT_PRECISION,
)
from .errors import InvalidRequest, ParseError, PrecisionExhausted
from .logger import logger


def _sign(value):
    return (value > 0) - (value < 0)


def mpf_to_fraction(value):
    """Exact rational image of a finite mpf."""
    sign, man, exp, _ = value._mpf_
    man = -int(man) if sign else int(man)
    if exp >= 0:
        return Fraction(man << int(exp))
    return Fraction(man, 1 << int(-exp))


def parse_rational(text):
    """Parse '3/4', '-1.5' or '1e-9' into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid rational number: {text!r}") from e


def format_decimal(value, digits):
    """Fixed-point decimal string of a Fraction, rounded half-even at ``digits`` places."""
    scaled = round(value * 10**digits)
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return f"{sign}{text}"
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


class ScalarBackend:
    """Common contract of the two backends."""

    name = "abstract"
    exact = False

    def coerce(self, value):
        raise NotImplementedError

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def sign(self, value):
        """Sign of a stored value. Stored values are exact binary or rational numbers."""
        return _sign(value)

    def enclosure_sign(self, compute, ctr=None):
        """Certified sign of a quantity.

        ``compute(lift, ctr)`` recomputes the quantity from inputs mapped through ``lift``.
        """
        raise NotImplementedError

    def quantize(self, value, bits):
        """Round to a multiple of 2**-bits (no-op where precision is already bounded)."""
        return value

    def sqrt(self, value, tol):
        raise NotImplementedError

    def to_fraction(self, value):
        raise NotImplementedError

    def to_mpf(self, value, ctx):
        frac = self.to_fraction(value)
        return ctx.mpf(frac.numerator) / ctx.mpf(frac.denominator)

    def to_float(self, value):
        return float(self.to_fraction(value))

    def describe(self):
        return self.name


class ExactRational(ScalarBackend):
    """Exact rational arithmetic on ``fractions.Fraction``."""

    name = BACKEND_EXACT
    exact = True

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, float)):
            return Fraction(value)
        if isinstance(value, str):
            return parse_rational(value)
        if hasattr(value, "_mpf_"):
            return mpf_to_fraction(value)
        raise InvalidRequest(f"Cannot convert {type(value).__name__} to a rational")

    def enclosure_sign(self, compute, ctr=None):
        return _sign(compute(lambda v: v, ctr))

    def quantize(self, value, bits):
        if value.denominator <= (1 << bits):
            return value
        return Fraction(round(value * (1 << bits)), 1 << bits)

    def sqrt(self, value, tol):
        """Approximate square root with absolute error below ``tol``."""
        if value < 0:
            raise InvalidRequest("Square root of a negative number")
        k = 1
        while Fraction(1, 1 << k) >= tol:
            k += 1
        n, d = value.numerator, value.denominator
        # sqrt(n/d) = sqrt(n*d)/d; isqrt at 2**k scale errs by at most 2**-k / d
        return Fraction(isqrt(n * d << (2 * k)), d << k)

    def to_fraction(self, value):
        return value


class AdaptiveFloat(ScalarBackend):
    """Arbitrary precision binary floats with interval-certified signs.

    Values live in a private mpmath context so concurrent jobs with different
    precisions do not interfere.
    """

    name = BACKEND_FLOAT

    def __init__(self, precision=DEFAULT_FLOAT_PRECISION, precision_cap=MAX_FLOAT_PRECISION):
        if precision < MIN_FLOAT_PRECISION:
            raise InvalidRequest(f"Float precision must be >= {MIN_FLOAT_PRECISION} bits")
        if precision_cap < precision:
            raise InvalidRequest("Precision cap must not be below the working precision")
        self.precision = precision
        self.precision_cap = precision_cap
        self.ctx = MPContext()
        self.ctx.prec = precision
        self._iv = IVContext()

    def coerce(self, value):
        if isinstance(value, Fraction):
            return self.ctx.mpf(value.numerator) / self.ctx.mpf(value.denominator)
        if isinstance(value, str):
            return self.coerce(parse_rational(value))
        if isinstance(value, (int, float)) or hasattr(value, "_mpf_"):
            return self.ctx.mpf(value)
        raise InvalidRequest(f"Cannot convert {type(value).__name__} to a float")

    def _lift(self, value):
        """Exact (or outward rounded) interval image of a backend value."""
        iv = self._iv
        if isinstance(value, int):
            return iv.mpf(value)
        if isinstance(value, Fraction):
            return iv.mpf(value.numerator) / iv.mpf(value.denominator)
        sign, man, exp, _ = value._mpf_
        man = -int(man) if sign else int(man)
        return iv.mpf(man) * iv.mpf(2) ** int(exp)

    def enclosure_sign(self, compute, ctr=None):
        prec = self.precision
        counter = ctr
        while True:
            self._iv.prec = prec
            enclosure = compute(self._lift, counter)
            # retries recompute the same quantity and are not charged again
            counter = None
            if enclosure.a > 0:
                return 1
            if enclosure.b < 0:
                return -1
            if enclosure.a == 0 and enclosure.b == 0:
                return 0
            if prec >= self.precision_cap:
                raise PrecisionExhausted(
                    f"Sign indeterminate at {prec} bits (cap {self.precision_cap})"
                )
            prec = min(2 * prec, self.precision_cap)
            logger.debug(f"Escalating sign certification to {prec} bits")

    def sqrt(self, value, tol):
        return self.ctx.sqrt(value)

    def to_fraction(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        return mpf_to_fraction(value)

    def to_mpf(self, value, ctx):
        return ctx.mpf(value)

    def to_float(self, value):
        return float(value)

    def describe(self):
        return f"{self.name}:{self.precision}"


def backend_from_spec(spec, precision_cap=MAX_FLOAT_PRECISION, default_precision=None):
    """Build a backend from 'exact', 'float' or 'float:BITS'."""
    text = (spec or BACKEND_EXACT).strip().lower()
    if text == BACKEND_EXACT:
        return ExactRational()
    kind, _, bits = text.partition(":")
    if kind != BACKEND_FLOAT:
        raise ParseError(f"Unknown backend: {spec!r} (expected 'exact' or 'float:BITS')")
    if bits:
        try:
            precision = int(bits)
        except ValueError as e:
            raise ParseError(f"Invalid float precision: {bits!r}") from e
    else:
        precision = default_precision or DEFAULT_FLOAT_PRECISION
    return AdaptiveFloat(precision, max(precision_cap, precision))
