"""
Sparse univariate polynomials.

A polynomial is an immutable tuple of ``(coefficient, exponent)`` terms with nonzero
coefficients and strictly increasing exponents; the empty tuple is the zero polynomial.
Coefficients are values of one scalar backend (see ``scalar.py``).
"""

from dataclasses import dataclass
from math import gcd
from typing import Any, Iterable, Optional, Sequence, Tuple

from .errors import (
    InvariantViolation,
    NeedsSFirst,
    NotPrimitive,
    ParseError,
    WrongArity,
    ZeroPolynomial,
)
from .op_counter import OpCounter
from .scalar import ScalarBackend, parse_rational

MAX_EXPONENT = (1 << 63) - 1


def _sign(value):
    return (value > 0) - (value < 0)


def _check_exponent(a):
    if not isinstance(a, int) or isinstance(a, bool):
        raise ParseError(f"Exponent must be an integer, got {a!r}")
    if a < 0 or a > MAX_EXPONENT:
        raise ParseError(f"Exponent out of range [0, 2^63-1]: {a}")


@dataclass(frozen=True)
class SparsePoly:
    """c_1 x^a_1 + ... + c_m x^a_m with a_1 < ... < a_m."""

    terms: Tuple[Tuple[Any, int], ...] = ()

    def __post_init__(self):
        previous = -1
        for c, a in self.terms:
            _check_exponent(a)
            if a <= previous:
                raise InvariantViolation("Exponents must be strictly increasing")
            if c == 0:
                raise InvariantViolation("Zero coefficient stored in a sparse polynomial")
            previous = a

    @classmethod
    def from_terms(cls, pairs: Iterable[Tuple[Any, int]]) -> "SparsePoly":
        """Build from unordered pairs, summing equal exponents and dropping zeros."""
        merged = {}
        for c, a in pairs:
            _check_exponent(a)
            merged[a] = merged[a] + c if a in merged else c
        return cls(tuple((merged[a], a) for a in sorted(merged) if merged[a] != 0))

    @classmethod
    def zero(cls) -> "SparsePoly":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or self.terms[-1][1] == 0

    def degree(self) -> int:
        """a_m; the zero polynomial has degree -1 by convention."""
        return self.terms[-1][1] if self.terms else -1

    def term_count(self) -> int:
        return len(self.terms)

    @property
    def min_exponent(self) -> int:
        """delta(f), the exponent divided out by op_S."""
        if not self.terms:
            raise ZeroPolynomial("delta(f) is undefined for the zero polynomial")
        return self.terms[0][1]

    @property
    def coefficients(self) -> Tuple[Any, ...]:
        return tuple(c for c, _ in self.terms)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(a for _, a in self.terms)

    @property
    def leading(self):
        return self.terms[-1][0]

    def gap(self) -> int:
        """Exponent gap of a binomial; 0 for monomials and constants."""
        if len(self.terms) == 2:
            return self.terms[1][1] - self.terms[0][1]
        return 0

    def scale(self, factor) -> "SparsePoly":
        return SparsePoly(tuple((c * factor, a) for c, a in self.terms))

    def __neg__(self) -> "SparsePoly":
        return SparsePoly(tuple((-c, a) for c, a in self.terms))

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        return SparsePoly.from_terms(self.terms + other.terms)

    def __str__(self) -> str:
        return format_poly(self)


def eval_mul_bound(m: int, D: int) -> int:
    """Multiplications allowed for one evaluation by recursive squaring."""
    # ceil(log2(D+1)) == D.bit_length()
    return m * (2 * D.bit_length() + 1) + m - 1


def _evaluate_terms(terms: Sequence[Tuple[Any, int]], x, ctr: Optional[OpCounter]):
    if not terms:
        return x * 0
    top = terms[-1][1]
    squares = [x]  # squares[i] = x^(2^i)
    for _ in range(1, top.bit_length()):
        squares.append(squares[-1] * squares[-1])
    muls = len(squares) - 1
    total = None
    for c, a in terms:
        term = c
        i = 0
        while a:
            if a & 1:
                term = term * squares[i]
                muls += 1
            a >>= 1
            i += 1
        total = term if total is None else total + term
    if ctr is not None:
        bound = eval_mul_bound(len(terms), top)
        if muls > bound:
            raise InvariantViolation(f"Evaluation used {muls} multiplications, bound {bound}")
        ctr.charge_mul(muls)
        ctr.charge_add(len(terms) - 1)
    return total


def evaluate(f: SparsePoly, x, ctr: Optional[OpCounter] = None):
    """f(x) by binary-expansion powering with squarings shared across terms."""
    return _evaluate_terms(f.terms, x, ctr)


def power(x, d: int, ctr: Optional[OpCounter] = None):
    """x**d by recursive squaring."""
    if d < 0:
        raise ValueError("Negative exponent")
    result = None
    base = x
    muls = 0
    while d:
        if d & 1:
            if result is None:
                result = base
            else:
                result = result * base
                muls += 1
        d >>= 1
        if d:
            base = base * base
            muls += 1
    if ctr is not None:
        ctr.charge_mul(muls)
    return x**0 if result is None else result


def sign_at(f: SparsePoly, x, backend: ScalarBackend, ctr: Optional[OpCounter] = None) -> int:
    """Certified sign of f(x)."""
    if ctr is not None:
        ctr.charge_cmp()
    terms = f.terms
    return backend.enclosure_sign(
        lambda lift, counter: _evaluate_terms([(lift(c), a) for c, a in terms], lift(x), counter),
        ctr,
    )


def one_sided_sign(
    f: SparsePoly, x, side: int, backend: ScalarBackend, ctr: Optional[OpCounter] = None
) -> int:
    """Sign of f just right (side=+1) or left (side=-1) of x; side=0 gives sign of f(x)."""
    if f.is_zero:
        return 0
    if side != 0 and backend.sign(x) == 0:
        c, a = f.terms[0]
        if ctr is not None:
            ctr.charge_cmp()
        s = _sign(c)
        return s if side > 0 or a % 2 == 0 else -s
    s = sign_at(f, x, backend, ctr)
    if s != 0 or side == 0:
        return s
    # a nonzero root of an m-term polynomial has multiplicity at most m-1
    g = f
    order = 0
    while s == 0:
        g = derivative(g)
        order += 1
        if g.is_zero:
            return 0
        s = sign_at(g, x, backend, ctr)
    return s if side > 0 or order % 2 == 0 else -s


def falling_factorial(a: int, k: int) -> int:
    """(a)_k = a(a-1)...(a-k+1)."""
    if k > a:
        return 0
    result = 1
    for i in range(k):
        result *= a - i
    return result


def derivative(f: SparsePoly) -> SparsePoly:
    return SparsePoly(tuple((c * a, a - 1) for c, a in f.terms if a > 0))


def nth_derivative(f: SparsePoly, k: int) -> SparsePoly:
    if k == 0:
        return f
    return SparsePoly(tuple((c * falling_factorial(a, k), a - k) for c, a in f.terms if a >= k))


def op_S(f: SparsePoly) -> SparsePoly:
    """x^(-delta(f)) f."""
    delta = f.min_exponent
    if delta == 0:
        return f
    return SparsePoly(tuple((c, a - delta) for c, a in f.terms))


def op_L1(f: SparsePoly) -> SparsePoly:
    return derivative(op_S(f))


def op_L2(f: SparsePoly) -> SparsePoly:
    return derivative(derivative(op_S(f)))


def reflect(f: SparsePoly) -> SparsePoly:
    """f(-x)."""
    return SparsePoly(tuple((-c if a % 2 else c, a) for c, a in f.terms))


def reciprocal_transform(f: SparsePoly) -> SparsePoly:
    """x^D f(1/x); requires a constant term."""
    if f.is_zero:
        raise ZeroPolynomial("Reciprocal of the zero polynomial")
    if f.min_exponent != 0:
        raise NeedsSFirst("Reciprocal transform needs a constant term; apply op_S first")
    D = f.degree()
    return SparsePoly(tuple((c, D - a) for c, a in reversed(f.terms)))


def sign_alternations(signs: Iterable[int]) -> int:
    """Number of sign changes, skipping zeros."""
    count = 0
    previous = 0
    for s in signs:
        if s == 0:
            continue
        if previous and s != previous:
            count += 1
        previous = s
    return count


def descartes_bound(f: SparsePoly) -> int:
    if f.is_zero:
        raise ZeroPolynomial("Descartes' bound of the zero polynomial")
    return sign_alternations(_sign(c) for c in f.coefficients)


def trinomial_discriminant(f: SparsePoly):
    """Closed-form discriminant of c1 + c2 x^a2 + c3 x^a3 with coprime a2, a3.

    Vanishes exactly when f and f' share a nonzero complex root.
    """
    if f.term_count() != 3:
        raise WrongArity(f"Trinomial discriminant needs 3 terms, got {f.term_count()}")
    (c1, a1), (c2, a2), (c3, a3) = f.terms
    if a1 != 0:
        raise NeedsSFirst("Trinomial discriminant needs a constant term")
    if gcd(a2, a3) != 1:
        raise NotPrimitive(f"Exponents {a2}, {a3} share the factor {gcd(a2, a3)}")
    first = a3**a3 * c3**a2 * c1 ** (a3 - a2)
    second = a2**a2 * (a3 - a2) ** (a3 - a2) * c2**a3
    return first + second if (a3 - 1) % 2 == 0 else first - second


def parse_poly(text: str, backend: ScalarBackend) -> SparsePoly:
    """Parse 'coeff,exp;coeff,exp;...' (e.g. '1,0;-3,37;1,100')."""
    if text is None or not text.strip():
        raise ParseError("Empty polynomial text")
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ParseError(f"Expected 'coeff,exponent', got {chunk!r}")
        coeff = parse_rational(parts[0])
        try:
            exp = int(parts[1].strip())
        except ValueError as e:
            raise ParseError(f"Invalid exponent in {chunk!r}") from e
        pairs.append((backend.coerce(coeff), exp))
    if not pairs:
        raise ParseError("Polynomial text contains no terms")
    return SparsePoly.from_terms(pairs)


def format_poly(f: SparsePoly) -> str:
    if f.is_zero:
        return "0,0"
    return ";".join(f"{c},{a}" for c, a in f.terms)
