"""
Compressed Sturm sequences for trinomials and exact root counting.

For f with at most three terms and a constant term, every element after f itself has at
most two terms, so each remainder is obtained by rewriting exponents with the binomial
relation instead of long division. Elements from p_2 on are divided by the absolute
value of their leading coefficient, which preserves every sign sequence.
"""

import random
from dataclasses import dataclass, field
from typing import Any, List, Optional, Tuple

from .errors import InvalidRequest, InvariantViolation, NeedsSFirst, WrongArity, ZeroPolynomial
from .logger import logger
from .op_counter import OpCounter
from .oracle import count_with_chain, expand, sturm_chain
from .scalar import ExactRational, ScalarBackend
from .sparse_poly import (
    SparsePoly,
    derivative,
    one_sided_sign,
    op_S,
    power,
    sign_alternations,
    sign_at,
)


def chain_bound(D: int) -> int:
    """3 * ceil(log2 D) + 2."""
    return 3 * (D - 1).bit_length() + 2 if D >= 1 else 2


@dataclass(frozen=True)
class CountQuery:
    """Interval with per-endpoint openness."""

    a: Any
    b: Any
    a_open: bool = True
    b_open: bool = True

    def __post_init__(self):
        if self.a > self.b:
            raise InvalidRequest(f"Interval endpoints out of order: {self.a} > {self.b}")

    @classmethod
    def open(cls, a, b) -> "CountQuery":
        return cls(a, b, True, True)

    @classmethod
    def closed(cls, a, b) -> "CountQuery":
        return cls(a, b, False, False)

    def contains(self, x) -> bool:
        above = x > self.a or (x == self.a and not self.a_open)
        below = x < self.b or (x == self.b and not self.b_open)
        return above and below


@dataclass(frozen=True)
class SignSeq:
    signs: Tuple[int, ...]

    def alternations(self) -> int:
        return sign_alternations(self.signs)


@dataclass(frozen=True)
class SturmChain:
    elements: Tuple[SparsePoly, ...]

    @property
    def K(self) -> int:
        return len(self.elements) - 1

    @property
    def gaps(self) -> Tuple[int, ...]:
        """Exponent gap per element (0 for monomials, constants and p_0)."""
        return tuple(p.gap() for p in self.elements)

    def halving_violations(self) -> List[int]:
        """Indices i >= 1 with min(gap[i+2], gap[i+3]) > gap[i] / 2 (missing gaps are 0)."""
        gaps = self.gaps
        K = self.K

        def gap(j):
            return gaps[j] if j <= K else 0

        return [i for i in range(1, K + 1) if 2 * min(gap(i + 2), gap(i + 3)) > gaps[i]]


def _remainder(p: SparsePoly, q: SparsePoly, ctr: Optional[OpCounter]) -> SparsePoly:
    """Remainder of p modulo a monomial or binomial q."""
    if q.term_count() == 1:
        A = q.terms[0][1]
        return SparsePoly(tuple(t for t in p.terms if t[1] < A))
    if q.term_count() != 2:
        raise InvariantViolation("Compressed chain divisor has more than two terms")
    (w0, A0), (w1, A1) = q.terms
    step = A1 - A0
    # x^A1 == ratio * x^A0 modulo q
    ratio = -w0 / w1
    if ctr is not None:
        ctr.charge_div()
    reduced = []
    for c, B in p.terms:
        if B < A1:
            reduced.append((c, B))
            continue
        k = (B - A1) // step + 1
        reduced.append((c * power(ratio, k, ctr), B - k * step))
        if ctr is not None:
            ctr.charge_mul()
    if ctr is not None:
        ctr.charge_add(max(0, len(reduced) - len({B for _, B in reduced})))
    return SparsePoly.from_terms(reduced)


def _normalize(p: SparsePoly, ctr: Optional[OpCounter]) -> SparsePoly:
    lead = abs(p.leading)
    if lead == 1:
        return p
    if ctr is not None:
        ctr.charge_div(p.term_count())
    return SparsePoly(tuple((c / lead, a) for c, a in p.terms))


def build_chain(f: SparsePoly, ctr: Optional[OpCounter] = None) -> SturmChain:
    """Compressed Sturm chain of a polynomial with a constant term and at most three terms."""
    if f.is_zero:
        raise ZeroPolynomial("Sturm chain of the zero polynomial")
    if f.term_count() > 3:
        raise WrongArity(f"Compressed chains need at most 3 terms, got {f.term_count()}")
    if f.min_exponent != 0:
        raise NeedsSFirst("Compressed chains need a constant term; apply op_S first")
    bound = chain_bound(f.degree())
    elements = [f]
    current = derivative(f)
    while not current.is_zero:
        if len(elements) >= 2:
            current = _normalize(current, ctr)
        elements.append(current)
        if len(elements) - 1 > bound:
            raise InvariantViolation(
                f"Chain length exceeds 3*ceil(log2 D)+2 = {bound} for degree {f.degree()}"
            )
        current = -_remainder(elements[-2], elements[-1], ctr)
    chain = SturmChain(tuple(elements))
    if ctr is not None:
        ctr.note_chain(chain.K)
    logger.debug(f"Built chain of length K={chain.K} for degree {f.degree()}")
    return chain


def build_trinomial_chain(f: SparsePoly, ctr: Optional[OpCounter] = None) -> SturmChain:
    if f.term_count() != 3:
        raise WrongArity(f"Trinomial chain needs exactly 3 terms, got {f.term_count()}")
    if f.min_exponent != 0:
        raise NeedsSFirst("Trinomial chain needs a constant term; apply op_S first")
    return build_chain(f, ctr)


def chain_sign_sequence(
    ch: SturmChain,
    x,
    ctr: Optional[OpCounter] = None,
    backend: Optional[ScalarBackend] = None,
    side: int = 0,
) -> SignSeq:
    """Signs of the chain at x, or at x+ / x- when side is +1 / -1."""
    backend = backend or ExactRational()
    return SignSeq(tuple(one_sided_sign(p, x, side, backend, ctr) for p in ch.elements))


class RootCounter:
    """Counts distinct real roots of one polynomial in many intervals.

    The polynomial is factored as x^delta * g with g(0) != 0; g gets a compressed chain
    when it has at most three terms and the dense oracle chain otherwise.
    """

    def __init__(
        self,
        f: SparsePoly,
        backend: Optional[ScalarBackend] = None,
        ctr: Optional[OpCounter] = None,
    ):
        if f.is_zero:
            raise ZeroPolynomial("Cannot count roots of the zero polynomial")
        self.backend = backend or ExactRational()
        self.delta = f.min_exponent
        self.g = op_S(f)
        self.chain = None
        self.dense_chain = None
        if self.g.term_count() <= 3:
            self.chain = build_chain(self.g, ctr)
        else:
            self.dense_chain = sturm_chain(expand(self.g))
            logger.debug(f"Dense counting fallback for {self.g.term_count()} terms")

    def _variations(self, x, side, ctr) -> int:
        return chain_sign_sequence(self.chain, x, ctr, self.backend, side).alternations()

    def _dense_count(self, q, ctr) -> int:
        if ctr is not None:
            work = sum(p.degree() + 1 for p in self.dense_chain)
            ctr.charge_mul(2 * work)
            ctr.charge_add(2 * work)
        return count_with_chain(self.dense_chain, q)

    def count(self, q: CountQuery, ctr: Optional[OpCounter] = None) -> int:
        total = 1 if self.delta > 0 and q.contains(0) else 0
        if self.dense_chain is not None:
            return total + self._dense_count(q, ctr)
        g = self.g
        if q.a == q.b:
            closed = not q.a_open and not q.b_open
            return total + int(closed and sign_at(g, q.a, self.backend, ctr) == 0)
        if g.is_constant:
            return total
        n = self._variations(q.a, +1, ctr) - self._variations(q.b, -1, ctr)
        if not q.a_open and sign_at(g, q.a, self.backend, ctr) == 0:
            n += 1
        if not q.b_open and sign_at(g, q.b, self.backend, ctr) == 0:
            n += 1
        if n < 0:
            raise InvariantViolation("Negative root count from Sturm variations")
        return total + n


def count_roots(
    f: SparsePoly,
    q: CountQuery,
    ctr: Optional[OpCounter] = None,
    backend: Optional[ScalarBackend] = None,
) -> int:
    """Exact number of distinct real roots of f in q."""
    return RootCounter(f, backend, ctr).count(q, ctr)


def random_trinomial(rng: random.Random, D: int, coeff_range: int = 10, backend=None):
    """c1 + c2 x^a + c3 x^D with nonzero integer coefficients and 0 < a < D."""
    backend = backend or ExactRational()
    values = [v for v in range(-coeff_range, coeff_range + 1) if v != 0]
    a = rng.randint(1, D - 1)
    return SparsePoly(tuple((backend.coerce(rng.choice(values)), e) for e in (0, a, D)))


@dataclass(frozen=True)
class ChainStatsRow:
    D: int
    trial: int
    middle_exponent: int
    K: int
    bound: int
    ok: bool
    halving_violations: int

    def as_dict(self):
        return {
            "D": self.D,
            "trial": self.trial,
            "a2": self.middle_exponent,
            "K": self.K,
            "bound": self.bound,
            "ok": self.ok,
            "halving_violations": self.halving_violations,
        }


@dataclass
class ChainStats:
    rows: List[ChainStatsRow] = field(default_factory=list)

    @property
    def all_within_bound(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def chains_with_halving_violations(self) -> int:
        return sum(1 for row in self.rows if row.halving_violations)

    def max_K(self, D: int) -> int:
        return max(row.K for row in self.rows if row.D == D)

    def as_dict(self):
        return {
            "rows": [row.as_dict() for row in self.rows],
            "all_within_bound": self.all_within_bound,
            "chains_with_halving_violations": self.chains_with_halving_violations,
        }


def chain_length_stats(D_list, trials: int, seed: int, backend=None) -> ChainStats:
    """Chain lengths of random trinomials, checked against the length bound."""
    rng = random.Random(seed)
    stats = ChainStats()
    for D in D_list:
        if D < 2:
            raise InvalidRequest(f"Trinomials need degree >= 2, got {D}")
        for trial in range(trials):
            f = random_trinomial(rng, D, backend=backend)
            chain = build_trinomial_chain(f)
            bound = chain_bound(D)
            stats.rows.append(
                ChainStatsRow(
                    D=D,
                    trial=trial,
                    middle_exponent=f.terms[1][1],
                    K=chain.K,
                    bound=bound,
                    ok=chain.K <= bound,
                    halving_violations=len(chain.halving_violations()),
                )
            )
    return stats
