"""
Approximation of every distinct root of a sparse polynomial in [0, R].

The solver recurses on derivatives: approximations of the roots of f' and f'' split
[0, R] into small neighbourhoods, whose root counts come from Sturm counting, and
gaps on which f is monotone and convex or concave, where HYBRID takes over.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple

from .config import DEFAULT_DAMPENED_MAX_DEGREE
from .errors import InvalidRequest, InvariantViolation, NotDampened
from .hybrid_newton import Direction, HybridInput, alpha_bound, hybrid_search
from .logger import logger
from .op_counter import OpCounter
from .oracle import (
    DensePoly,
    count_with_chain,
    expand,
    isolate_and_refine,
    sturm_chain,
    to_fraction,
)
from .scalar import ExactRational, ScalarBackend
from .sparse_poly import (
    SparsePoly,
    derivative,
    op_L1,
    op_L2,
    op_S,
    reciprocal_transform,
    reflect,
    sign_at,
)
from .trinomial_sturm import CountQuery, RootCounter, count_roots


class ProvenanceKind(Enum):
    ZERO_ROOT = "ZeroRoot"
    ENDPOINT = "Endpoint"
    EXACT_HIT = "ExactHit"
    QUADRATIC_FORMULA = "QuadraticFormula"
    CRITICAL_NBHD = "CriticalNbhd"
    INFLECTION_NBHD = "InflectionNbhd"
    HYBRID_INTERVAL = "HybridInterval"


@dataclass(frozen=True)
class Provenance:
    kind: ProvenanceKind
    index: Optional[int] = None

    def __str__(self) -> str:
        if self.index is None:
            return self.kind.value
        return f"{self.kind.value}({self.index})"


ZERO_ROOT = Provenance(ProvenanceKind.ZERO_ROOT)
ENDPOINT = Provenance(ProvenanceKind.ENDPOINT)
EXACT_HIT = Provenance(ProvenanceKind.EXACT_HIT)
QUADRATIC = Provenance(ProvenanceKind.QUADRATIC_FORMULA)


@dataclass(frozen=True)
class RootEntry:
    value: Any
    provenance: Provenance


@dataclass(frozen=True)
class RootReport:
    """Approximations in increasing order, one per distinct root in [0, R]."""

    entries: Tuple[RootEntry, ...] = ()
    all_reals: bool = False

    @property
    def roots(self) -> Tuple[Any, ...]:
        return tuple(e.value for e in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SolveRequest:
    f: SparsePoly
    R: Any
    eps: Any
    alpha_star: Any = None

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidRequest(f"Radius must be positive, got {self.R}")
        if not 0 < self.eps < self.R:
            raise InvalidRequest(f"Need 0 < eps < R, got eps={self.eps}, R={self.R}")
        if self.alpha_star is not None and not self.alpha_star > 0:
            raise InvalidRequest(f"alpha_star must be positive, got {self.alpha_star}")


@dataclass(frozen=True)
class CriticalPartition:
    """Deduplicated approximations of roots of f' (u) and f'' (v) in [0, R]."""

    u: Tuple[Any, ...]
    v: Tuple[Any, ...]


class Verdict(Enum):
    BY_THEOREM = "dampened-by-theorem"
    DAMPENED = "dampened"
    NOT_DAMPENED = "not-dampened"
    UNKNOWN = "unknown"


@dataclass
class DampenedCertificate:
    family: List[SparsePoly] = field(default_factory=list)
    verdicts: List[Verdict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return Verdict.NOT_DAMPENED not in self.verdicts

    @property
    def complete(self) -> bool:
        return Verdict.UNKNOWN not in self.verdicts and self.ok

    def as_dict(self):
        counts = {}
        for v in self.verdicts:
            counts[v.value] = counts.get(v.value, 0) + 1
        return {"members": len(self.family), "verdicts": counts, "ok": self.ok}


def dampened_family(f: SparsePoly) -> List[SparsePoly]:
    """S L_{e1} ... L_{ek} f for k < m and e_i in {1, 2}, without repeats."""
    m = f.term_count()
    family: List[SparsePoly] = []
    seen = set()
    frontier = [op_S(f)]
    for level in range(max(m, 1)):
        following = []
        for g in frontier:
            if g.terms in seen:
                continue
            seen.add(g.terms)
            family.append(g)
            if level == m - 1 or g.is_constant:
                continue
            for op in (op_L1, op_L2):
                h = op(g)
                if not h.is_zero:
                    following.append(op_S(h))
        frontier = following
    return family


def _cauchy_bound(f: SparsePoly) -> Fraction:
    lead = abs(to_fraction(f.leading))
    return 1 + max(abs(to_fraction(c)) for c in f.coefficients[:-1]) / lead


def _explicit_verdict(g: SparsePoly, rounds: int = 8) -> Verdict:
    gp = derivative(g)
    gpp = derivative(gp)
    if gp.is_constant or gpp.is_zero:
        return Verdict.DAMPENED
    dense_gp = expand(gp)
    dense_gpp = expand(gpp)
    gpp_chain = sturm_chain(dense_gpp)
    shared = DensePoly(dense_gp.poly.gcd(dense_gpp.poly))
    shared_chain = sturm_chain(shared) if shared.degree() > 0 else None
    B = _cauchy_bound(gp)
    width = Fraction(1, 1 << 10)

    for _ in range(rounds):
        iso = isolate_and_refine(dense_gp, CountQuery.open(0, B), width)
        crit = sorted(iso.intervals + [(r, r) for r in iso.exact_roots])
        ambiguous = False
        for lo, hi in crit:
            if lo == hi:
                continue
            inside = count_with_chain(gpp_chain, CountQuery.closed(lo, hi))
            if shared_chain is not None:
                # a double root of g' is the critical point itself
                inside -= count_with_chain(shared_chain, CountQuery.open(lo, hi))
            if inside > 0:
                ambiguous = True
                break
        if not ambiguous:
            break
        width /= 1 << 8
    else:
        return Verdict.UNKNOWN

    bounds = [Fraction(0)]
    for lo, hi in crit:
        bounds.extend((lo, hi))
    bounds.append(B)
    for left, right in zip(bounds[0::2], bounds[1::2]):
        if left < right and count_with_chain(gpp_chain, CountQuery.open(left, right)) > 1:
            return Verdict.NOT_DAMPENED
    return Verdict.DAMPENED


def check_dampened(
    f: SparsePoly, max_D_explicit: int = DEFAULT_DAMPENED_MAX_DEGREE
) -> DampenedCertificate:
    """Classify every member of the derivative family of f."""
    cert = DampenedCertificate()
    for g in dampened_family(f):
        if g.term_count() <= 4:
            verdict = Verdict.BY_THEOREM
        elif g.degree() <= max_D_explicit:
            verdict = _explicit_verdict(g)
        else:
            verdict = Verdict.UNKNOWN
        cert.family.append(g)
        cert.verdicts.append(verdict)
    logger.debug(f"Dampened check: {cert.as_dict()}")
    return cert


@dataclass
class _Piece:
    lo: Any
    lo_open: bool
    hi: Any
    center: Any
    provenance: Provenance


@dataclass
class _Gap:
    p: Any
    q: Any
    left_critical: bool
    right_critical: bool


class MnomialSolver:
    """Recursive solver; one instance per backend and configuration."""

    def __init__(
        self,
        backend: Optional[ScalarBackend] = None,
        dampened_max_degree: int = DEFAULT_DAMPENED_MAX_DEGREE,
        strict_alpha: bool = False,
    ):
        self.backend = backend or ExactRational()
        self.dampened_max_degree = dampened_max_degree
        self.strict_alpha = strict_alpha

    def solve(self, req: SolveRequest, ctr: Optional[OpCounter] = None) -> RootReport:
        b = self.backend
        f = req.f
        if f.is_zero:
            return RootReport(all_reals=True)
        R, eps = b.coerce(req.R), b.coerce(req.eps)
        if f.term_count() >= 5:
            cert = check_dampened(f, self.dampened_max_degree)
            if not cert.ok:
                raise NotDampened(f"{f} has a non-dampened derivative in its family")
            if not cert.complete:
                logger.warning(f"Dampened property of {f} is not fully certified")
        entries = self._solve(f, R, eps, req.alpha_star, 0, ctr)
        entries.sort(key=lambda e: e.value)
        for e in entries:
            if not 0 <= e.value <= R:
                raise InvariantViolation(f"Approximation {e.value} outside [0, {R}]")
        report = RootReport(tuple(entries))
        verify_report(f, report, R, eps, b)
        logger.info(f"Solved {f.term_count()}-nomial of degree {f.degree()}: {len(report)} roots")
        return report

    def partition(
        self, f: SparsePoly, R, eps, ctr: Optional[OpCounter] = None
    ) -> CriticalPartition:
        """u and v centres of f on [0, R]."""
        b = self.backend
        R, eps = b.coerce(R), b.coerce(eps)
        g = op_S(f)
        fp = derivative(g)
        fpp = derivative(fp)
        u = self._centers(fp, R, eps, None, 1, ctr)
        v = self._centers(fpp, R, eps, None, 1, ctr)
        return CriticalPartition(tuple(u), tuple(v))

    def _alpha(self, f: SparsePoly, override, depth: int):
        m, D = f.term_count(), f.degree()
        if override is not None and (depth == 0 or m >= 4):
            return override
        return alpha_bound(D, m, None, self.strict_alpha)

    def _centers(self, g: SparsePoly, R, eps, override, depth, ctr) -> List[Any]:
        if g.is_zero:
            return []
        values = sorted({e.value for e in self._solve(g, R, eps, override, depth, ctr)})
        return values

    def _solve(self, f: SparsePoly, R, eps, override, depth: int, ctr) -> List[RootEntry]:
        if ctr is not None:
            ctr.note_depth(depth)
        b = self.backend
        m = f.term_count()
        if m == 0:
            raise InvariantViolation("Zero polynomial reached a recursive solve")
        entries: List[RootEntry] = []
        if m == 1:
            if f.min_exponent > 0:
                entries.append(RootEntry(b.zero(), ZERO_ROOT))
            return entries
        if f.min_exponent > 0:
            entries.append(RootEntry(b.zero(), ZERO_ROOT))
            f = op_S(f)
        D = f.degree()
        if D == 1:
            entries.extend(self._linear(f, R, ctr))
        elif D == 2:
            entries.extend(self._quadratic(f, R, eps, ctr))
        else:
            entries.extend(self._positive(f, R, eps, override, depth, ctr, True))
        return entries

    def _linear(self, f: SparsePoly, R, ctr) -> List[RootEntry]:
        c0, c1 = f.terms[0][0], f.terms[1][0]
        if ctr is not None:
            ctr.charge_div()
            ctr.charge_cmp(2)
        r = -c0 / c1
        if r < 0 or r > R:
            return []
        return [RootEntry(R if r == R else r, ENDPOINT if r == R else EXACT_HIT)]

    def _quadratic(self, f: SparsePoly, R, eps, ctr) -> List[RootEntry]:
        b = self.backend
        coeffs = {a: c for c, a in f.terms}
        c1, c2, c3 = coeffs[0], coeffs.get(1, b.zero()), coeffs[2]
        if ctr is not None:
            ctr.charge_mul(6)
            ctr.charge_add(3)
            ctr.charge_div(2)
            ctr.charge_cmp(6)
        h = -c2 / (2 * c3)
        disc = c2 * c2 - 4 * c1 * c3
        if disc < 0:
            return []
        q2 = disc / (4 * c3 * c3)
        if q2 == 0:
            if h < 0 or h > R:
                return []
            return [RootEntry(h, ENDPOINT if h == R else QUADRATIC)]

        entries = []
        q = None
        for s in (-1, 1):
            # exact membership of h + s*sqrt(q2) in [0, R]
            if s > 0:
                nonneg = h >= 0 or q2 >= h * h
                below = R - h >= 0 and q2 <= (R - h) ** 2
                at_R = below and q2 == (R - h) ** 2
            else:
                nonneg = h >= 0 and h * h >= q2
                below = h - R <= 0 or (h - R) ** 2 <= q2
                at_R = h - R > 0 and (h - R) ** 2 == q2
            if not (nonneg and below):
                continue
            if at_R:
                entries.append(RootEntry(R, ENDPOINT))
                continue
            if q is None:
                q = b.sqrt(q2, eps / 2)
            r = h + s * q
            r = min(max(r, b.zero()), R)
            entries.append(RootEntry(r, QUADRATIC))
        return entries

    def _positive(self, f, R, eps, override, depth, ctr, allow_reciprocal) -> List[RootEntry]:
        """Roots in (0, R] of f with f(0) != 0, degree >= 3."""
        entries: List[RootEntry] = []
        if sign_at(f, R, self.backend, ctr) == 0:
            entries.append(RootEntry(R, ENDPOINT))
        if f.term_count() == 2:
            entries.extend(self._binomial(f, R, eps, override, depth, ctr))
        elif allow_reciprocal and f.terms[1][1] == 1:
            entries.extend(self._reciprocal(f, R, eps, override, depth, ctr))
        else:
            entries.extend(self._cells(f, R, eps, override, depth, ctr))
        return entries

    def _binomial(self, f, R, eps, override, depth, ctr) -> List[RootEntry]:
        b = self.backend
        c1, c2 = f.terms[0][0], f.terms[1][0]
        s0 = b.sign(c1)
        sR = sign_at(f, R, b, ctr)
        if sR == 0 or s0 * sR > 0:
            return []
        s = b.sign(c2)
        inp = HybridInput(eps, R, f, self._alpha(f, override, depth), Direction.INCREASING, sign=s)
        trace = hybrid_search(inp, ctr, b)
        provenance = EXACT_HIT if trace.exact else Provenance(ProvenanceKind.HYBRID_INTERVAL, 0)
        return [RootEntry(trace.root, provenance)]

    def _reciprocal(self, f, R, eps, override, depth, ctr) -> List[RootEntry]:
        """Roots in (0, R) of f with a linear second term, via y = 1/x."""
        b = self.backend
        rec = reciprocal_transform(f)
        c1 = abs(f.terms[0][0])
        Y = b.one() + max(abs(c) for c in f.coefficients[1:]) / c1
        eps_r = min(eps / (6 * R * R), b.one() / (6 * R), Y / 2)
        ys = self._positive(rec, Y, eps_r, override, depth, ctr, False)
        n_in = RootCounter(f, b, ctr).count(CountQuery.open(b.zero(), R), ctr)
        if n_in > len(ys):
            raise InvariantViolation(f"Reciprocal solve found {len(ys)} roots, expected {n_in}")
        ys.sort(key=lambda e: e.value, reverse=True)
        entries = []
        for e in ys[:n_in]:
            if ctr is not None:
                ctr.charge_div()
            x = min(b.one() / e.value, R)
            entries.append(RootEntry(x, e.provenance))
        return entries

    def _check_end_cells(self, fpp: SparsePoly, u, v, R, eps, ctr):
        """Every root of f'' in the first and last critical cells has a v centre."""
        bounds = [self.backend.zero()] + [x for x in u if 0 < x < R] + [R]
        cells = {(bounds[0], bounds[1]), (bounds[-2], bounds[-1])}
        counter = None
        for lo, hi in cells:
            a, b = lo + eps, hi - eps
            if a >= b:
                continue
            counter = counter or RootCounter(fpp, self.backend, ctr)
            if counter.count(CountQuery.closed(a, b), ctr) > 0 and not any(
                a - eps < w < b + eps for w in v
            ):
                raise InvariantViolation("Inflection point in an end cell has no approximation")

    def _layout(self, centers, R, eps) -> Tuple[List[_Piece], List[_Gap]]:
        """Half-open pieces around the centres, merged into clusters, and the gaps between."""
        zero = self.backend.zero()
        pieces: List[_Piece] = []
        clusters: List[list] = []  # [lo, hi, has_critical]
        for value, prov in centers:
            critical = prov.kind is ProvenanceKind.CRITICAL_NBHD
            lo, hi = value - eps, value + eps
            if clusters and clusters[-1][1] >= lo:
                cluster = clusters[-1]
                lo, lo_open = cluster[1], False
                cluster[1] = hi
                cluster[2] = cluster[2] or critical
            else:
                clusters.append([lo, hi, critical])
                lo_open = True
            if lo < zero:
                lo, lo_open = zero, True
            hi = min(hi, R)
            if lo < hi:
                pieces.append(_Piece(lo, lo_open, hi, value, prov))

        gaps: List[_Gap] = []
        start, left_critical = zero, True
        for lo, hi, critical in clusters:
            gaps.append(_Gap(start, lo, left_critical, critical))
            start, left_critical = hi, critical
        gaps.append(_Gap(start, R, left_critical, True))
        return pieces, [
            _Gap(max(g.p, zero), min(g.q, R), g.left_critical, g.right_critical)
            for g in gaps
            if max(g.p, zero) < min(g.q, R)
        ]

    def _cells(self, f, R, eps, override, depth, ctr) -> List[RootEntry]:
        b = self.backend
        fp = derivative(f)
        fpp = derivative(fp)
        if fp.term_count() >= f.term_count() or fpp.term_count() >= f.term_count():
            raise InvariantViolation("Derivative did not reduce the number of terms")
        u = self._centers(fp, R, eps, override, depth + 1, ctr)
        v = self._centers(fpp, R, eps, override, depth + 1, ctr)
        self._check_end_cells(fpp, u, v, R, eps, ctr)

        centers = [(x, Provenance(ProvenanceKind.CRITICAL_NBHD, i)) for i, x in enumerate(u, 1)]
        centers += [(x, Provenance(ProvenanceKind.INFLECTION_NBHD, j)) for j, x in enumerate(v, 1)]
        centers.sort(key=lambda item: (item[0], item[1].kind is ProvenanceKind.INFLECTION_NBHD))
        pieces, gaps = self._layout(centers, R, eps)

        counter = RootCounter(f, b, ctr)
        entries: List[RootEntry] = []
        for piece in pieces:
            n = counter.count(CountQuery(piece.lo, piece.hi, piece.lo_open, True), ctr)
            entries.extend(RootEntry(piece.center, piece.provenance) for _ in range(n))
        for index, gap in enumerate(gaps, 1):
            entries.extend(self._gap(f, fp, fpp, gap, index, R, eps, override, depth, ctr))
        return entries

    def _gap(self, f, fp, fpp, gap: _Gap, index, R, eps, override, depth, ctr) -> List[RootEntry]:
        b = self.backend
        p, q = gap.p, gap.q
        sp = sign_at(f, p, b, ctr)
        sq = sign_at(f, q, b, ctr)
        entries = []
        if sp == 0 and 0 < p < R:
            entries.append(RootEntry(p, EXACT_HIT))
        if sq == 0 and q < R:
            entries.append(RootEntry(q, EXACT_HIT))
        if sp * sq >= 0:
            return entries

        provenance = Provenance(ProvenanceKind.HYBRID_INTERVAL, index)
        width = q - p
        mid = (p + q) / 2
        if width <= 2 * eps:
            return [RootEntry(mid, provenance)]
        convex = sign_at(fpp, mid, b, ctr) or 1
        slope = sign_at(fp, mid, b, ctr) or 1
        if gap.left_critical or not gap.right_critical:
            origin, orientation = p, 1
        else:
            origin, orientation = q, -1
        increasing = convex * orientation * slope > 0
        direction = Direction.INCREASING if increasing else Direction.DECREASING
        inp = HybridInput(
            eps,
            width,
            f,
            self._alpha(f, override, depth),
            direction,
            sign=convex,
            origin=origin,
            orientation=orientation,
        )
        trace = hybrid_search(inp, ctr, b)
        x = origin + orientation * trace.root
        return [RootEntry(x, EXACT_HIT if trace.exact else provenance)]


def verify_report(
    f: SparsePoly, report: RootReport, R, eps, backend: Optional[ScalarBackend] = None
):
    """Every approximation has a root within eps and the total matches the exact count."""
    backend = backend or ExactRational()
    if report.all_reals:
        return
    counter = RootCounter(f, backend)
    zero = backend.zero()
    expected = counter.count(CountQuery.closed(zero, R))
    if expected != len(report):
        raise InvariantViolation(f"Report has {len(report)} roots, exact count is {expected}")
    for z in report.roots:
        lo, hi = z - eps, z + eps
        lo_open, hi_open = True, True
        if lo <= zero:
            lo, lo_open = zero, False
        if hi >= R:
            hi, hi_open = R, False
        if counter.count(CountQuery(lo, hi, lo_open, hi_open)) < 1:
            raise InvariantViolation(f"No root within eps of {z}")


def solve(
    req: SolveRequest,
    ctr: Optional[OpCounter] = None,
    backend: Optional[ScalarBackend] = None,
    **options,
) -> RootReport:
    """Approximate every distinct root of req.f in [0, req.R] to within req.eps."""
    return MnomialSolver(backend, **options).solve(req, ctr)


def solve_closed_count(
    f: SparsePoly,
    q: CountQuery,
    ctr: Optional[OpCounter] = None,
    backend: Optional[ScalarBackend] = None,
) -> int:
    """Root count on a general interval, split at 0 into two nonnegative counts."""
    backend = backend or ExactRational()
    if f.is_zero:
        raise InvalidRequest("Root count of the zero polynomial is infinite")
    zero = backend.zero()
    total = 1 if f.min_exponent > 0 and q.contains(zero) else 0
    g = op_S(f)
    if q.b > zero:
        lo, lo_open = (q.a, q.a_open) if q.a > zero else (zero, True)
        total += count_roots(g, CountQuery(lo, q.b, lo_open, q.b_open), ctr, backend)
    if q.a < zero:
        lo, lo_open = (-q.b, q.b_open) if q.b < zero else (zero, True)
        total += count_roots(reflect(g), CountQuery(lo, -q.a, lo_open, q.a_open), ctr, backend)
    return total
