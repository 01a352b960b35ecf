"""
Dense exact-rational ground truth.

Classical Sturm sequences with full polynomial division over QQ (via sympy), bisection
isolation on top of them, and the tetranomial remainder blow-up. Used by the property
tests and as the counting fallback for polynomials with more than three terms.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

from sympy import QQ, Poly, Rational, Symbol

from .config import MAX_DENSE_DEGREE
from .errors import DegreeTooLarge, InvalidRequest, ZeroPolynomial
from .logger import logger
from .scalar import mpf_to_fraction
from .sparse_poly import SparsePoly

X = Symbol("x")


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "_mpf_"):
        return mpf_to_fraction(value)
    if isinstance(value, Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def _rational(value) -> Rational:
    frac = to_fraction(value)
    return Rational(frac.numerator, frac.denominator)


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


@dataclass(frozen=True)
class DensePoly:
    """Coefficient array view over a sympy ``Poly`` in QQ[x]."""

    poly: Poly

    @classmethod
    def from_coeffs(cls, coeffs) -> "DensePoly":
        """Build from coefficients indexed by exponent (lowest first)."""
        data = {(e,): _rational(c) for e, c in enumerate(coeffs) if c != 0}
        return cls._from_dict(data)

    @classmethod
    def _from_dict(cls, data) -> "DensePoly":
        if not data:
            return cls(Poly(0, X, domain=QQ))
        return cls(Poly.from_dict(data, X, domain=QQ))

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        """Coefficient array indexed by exponent 0..D."""
        if self.is_zero:
            return ()
        return tuple(to_fraction(c) for c in reversed(self.poly.all_coeffs()))

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def degree(self) -> int:
        return -1 if self.is_zero else int(self.poly.degree())

    def term_count(self) -> int:
        return sum(1 for c in self.coeffs if c != 0)

    def sign_at(self, x) -> int:
        return _sign(self.poly.eval(_rational(x)))

    def derivative(self) -> "DensePoly":
        return DensePoly(self.poly.diff(X))

    def rem(self, other: "DensePoly") -> "DensePoly":
        return DensePoly(self.poly.rem(other.poly))

    def __neg__(self) -> "DensePoly":
        return DensePoly(-self.poly)


def _check_degree(D):
    if D > MAX_DENSE_DEGREE:
        raise DegreeTooLarge(f"Dense oracle limited to degree {MAX_DENSE_DEGREE}, got {D}")


def expand(f: SparsePoly) -> DensePoly:
    """Dense image of a sparse polynomial."""
    _check_degree(f.degree())
    return DensePoly._from_dict({(a,): _rational(c) for c, a in f.terms})


def sparsify(p: DensePoly) -> SparsePoly:
    """Sparse image of a dense polynomial (Fraction coefficients)."""
    return SparsePoly(tuple((c, e) for e, c in enumerate(p.coeffs) if c != 0))


def sturm_chain(p: DensePoly) -> List[DensePoly]:
    """p0 = p, p1 = p', p_{i+2} = -rem(p_i, p_{i+1}) up to the last nonzero element."""
    chain = [p]
    current = p.derivative()
    while not current.is_zero:
        chain.append(current)
        current = -chain[-2].rem(chain[-1])
    return chain


def _one_sided_sign(p: DensePoly, x, side: int) -> int:
    s = p.sign_at(x)
    if s != 0 or side == 0:
        return s
    order = 0
    while s == 0 and not p.is_zero:
        p = p.derivative()
        order += 1
        s = p.sign_at(x)
    return s if side > 0 or order % 2 == 0 else -s


def _variations(chain, x, side) -> int:
    signs = [s for s in (_one_sided_sign(p, x, side) for p in chain) if s != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def dense_sturm_count(p: DensePoly, q) -> int:
    """Exact number of distinct real roots of p in the interval of CountQuery ``q``."""
    if p.is_zero:
        raise ZeroPolynomial("Cannot count roots of the zero polynomial")
    _check_degree(p.degree())
    return count_with_chain(sturm_chain(p), q)


def count_with_chain(chain: List[DensePoly], q) -> int:
    """Distinct roots of chain[0] in ``q`` from a precomputed dense Sturm chain."""
    p = chain[0]
    a, b = to_fraction(q.a), to_fraction(q.b)
    if a == b:
        return int(not q.a_open and not q.b_open and p.sign_at(a) == 0)
    if p.degree() == 0:
        return 0
    count = _variations(chain, a, +1) - _variations(chain, b, -1)
    if not q.a_open and p.sign_at(a) == 0:
        count += 1
    if not q.b_open and p.sign_at(b) == 0:
        count += 1
    return count


@dataclass
class IsolationResult:
    """Disjoint open isolating intervals plus rational roots hit exactly."""

    intervals: List[Tuple[Fraction, Fraction]] = field(default_factory=list)
    exact_roots: List[Fraction] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.intervals) + len(self.exact_roots)

    def approximations(self) -> List[Fraction]:
        """One point per root: interval midpoints and exact roots, sorted."""
        points = [(lo + hi) / 2 for lo, hi in self.intervals] + list(self.exact_roots)
        return sorted(points)


@dataclass(frozen=True)
class _OpenInterval:
    a: Fraction
    b: Fraction
    a_open: bool = True
    b_open: bool = True


def isolate_and_refine(p: DensePoly, q, eps) -> IsolationResult:
    """Bracket every distinct root of p in ``q`` to width below eps/4 by Sturm bisection."""
    if p.is_zero:
        raise ZeroPolynomial("Cannot isolate roots of the zero polynomial")
    _check_degree(p.degree())
    eps = to_fraction(eps)
    if eps <= 0:
        raise InvalidRequest("Isolation width must be positive")
    a, b = to_fraction(q.a), to_fraction(q.b)
    result = IsolationResult()
    if not q.a_open and p.sign_at(a) == 0:
        result.exact_roots.append(a)
    if not q.b_open and b != a and p.sign_at(b) == 0:
        result.exact_roots.append(b)
    if p.degree() == 0 or a == b:
        return result

    target = eps / 4
    chain = sturm_chain(p)
    stack = [(a, b)]
    while stack:
        lo, hi = stack.pop()
        n = count_with_chain(chain, _OpenInterval(lo, hi))
        if n == 0:
            continue
        if n == 1 and hi - lo < target:
            result.intervals.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if p.sign_at(mid) == 0:
            result.exact_roots.append(mid)
        stack.append((mid, hi))
        stack.append((lo, mid))
    result.intervals.sort()
    result.exact_roots.sort()
    logger.debug(f"Isolated {len(result)} roots of a degree {p.degree()} polynomial")
    return result


def oracle_roots(f: SparsePoly, q, eps) -> List[Fraction]:
    """Approximations (within eps/8) of the distinct real roots of f in ``q``."""
    return isolate_and_refine(expand(f), q, eps).approximations()


def dense_gcd_degree(f: SparsePoly, g: SparsePoly) -> int:
    return DensePoly(expand(f).poly.gcd(expand(g).poly)).degree()


@dataclass(frozen=True)
class BlowupRow:
    D: int
    p3_degree: int
    p3_terms: int
    p2_matches: bool


def _tetranomial(D: int) -> DensePoly:
    return DensePoly._from_dict(
        {(2 * D,): Rational(1), (D + 1,): Rational(1), (D,): Rational(1), (0,): Rational(1)}
    )


def tetranomial_blowup(D: int) -> BlowupRow:
    """Third Sturm element of x^(2D) + x^(D+1) + x^D + 1."""
    if D < 3:
        raise InvalidRequest(f"Tetranomial blow-up needs D >= 3, got {D}")
    _check_degree(2 * D)
    p0 = _tetranomial(D)
    p1 = p0.derivative()
    p2 = -p0.rem(p1)
    p3 = -p1.rem(p2)
    expected = DensePoly._from_dict(
        {
            (D + 1,): -Rational(D - 1, 2 * D),
            (D,): -Rational(1, 2),
            (0,): Rational(-1),
        }
    )
    return BlowupRow(
        D=D,
        p3_degree=p3.degree(),
        p3_terms=p3.term_count(),
        p2_matches=p2.poly == expected.poly,
    )


def tetranomial_chain_lengths(degrees) -> List[Tuple[int, int]]:
    """(D, K) for the full dense Sturm chain of the tetranomial family."""
    rows = []
    for D in degrees:
        _check_degree(2 * D)
        rows.append((D, len(sturm_chain(_tetranomial(D))) - 1))
    return rows
