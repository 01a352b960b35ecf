"""
Geometric-grid bisection followed by Newton iteration, plus gamma diagnostics.

HYBRID locates the single root of a convex monotone function on (0, R): a binary search
over the grid eps * c0**j brackets the root between consecutive grid points, and Newton
iteration from the appropriate bracket end converges quadratically from there.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple

from mpmath.ctx_mp import MPContext

from .config import GAMMA_PRECISION, ORBIT_PRECISION, QUANTIZE_GUARD_BITS
from .errors import AlphaUnknown, InvalidRequest, InvariantViolation, SingularPoint
from .logger import logger
from .op_counter import OpCounter
from .scalar import ExactRational, ScalarBackend, mpf_to_fraction
from .sparse_poly import SparsePoly, derivative, evaluate, nth_derivative, sign_at


class Direction(Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class HybridInput:
    """phi(x) = sign * f(origin + orientation * x), convex and monotone on (0, R)."""

    eps: Any
    R: Any
    phi: SparsePoly
    alpha_star: Any
    direction: Direction
    sign: int = 1
    origin: Any = 0
    orientation: int = 1

    def __post_init__(self):
        if not 0 < self.eps < self.R:
            raise InvalidRequest(f"Need 0 < eps < R, got eps={self.eps}, R={self.R}")
        if not self.alpha_star > 0:
            raise InvalidRequest(f"alpha_star must be positive, got {self.alpha_star}")
        if self.sign not in (1, -1) or self.orientation not in (1, -1):
            raise InvalidRequest("sign and orientation must be +1 or -1")
        if self.phi.is_zero:
            raise InvalidRequest("phi must be nonzero")


@dataclass(frozen=True)
class GridState:
    c0: Any
    M: int
    x_hat: Any
    k_hat: int


@dataclass(frozen=True)
class HybridTrace:
    """Outcome of one HYBRID run in phi coordinates."""

    root: Any
    exact: bool
    start: Any
    bracket: Tuple[Any, Any]
    grid: Optional[GridState]
    newton_iterations: int


def _to_fraction(value) -> Fraction:
    if hasattr(value, "_mpf_"):
        return mpf_to_fraction(value)
    return Fraction(value)


def _log2(value) -> float:
    frac = _to_fraction(value)
    return math.log2(frac.numerator) - math.log2(frac.denominator)


def newton_iterations(R, eps) -> int:
    """ceil(log2(3 + log2(R/eps))) + 1."""
    return math.ceil(math.log2(3 + max(0.0, _log2(R) - _log2(eps)))) + 1


class _Hybrid:
    def __init__(self, inp: HybridInput, backend: ScalarBackend, ctr: Optional[OpCounter]):
        self.inp = inp
        self.backend = backend
        self.ctr = ctr
        self.f = inp.phi
        self.f_prime = derivative(inp.phi)
        self.eps = backend.coerce(inp.eps)
        self.R = backend.coerce(inp.R)
        self.origin = backend.coerce(inp.origin)
        self.increasing = inp.direction is Direction.INCREASING
        # absolute grid for exact iterates, fine enough below both eps and c0 - 1
        eps_bits = max(0, math.ceil(-_log2(inp.eps)))
        alpha_bits = max(0, math.ceil(_log2(8 * _to_fraction(inp.alpha_star) + 1)))
        self.bits = max(eps_bits, alpha_bits) + QUANTIZE_GUARD_BITS
        self.lo = backend.zero()
        self.hi = self.R

    def _q(self, value):
        return self.backend.quantize(value, self.bits)

    def _point(self, z):
        if self.inp.orientation == 1:
            return self.origin + z
        return self.origin - z

    def _sign(self, z) -> int:
        if self.ctr is not None:
            self.ctr.charge_eval()
        return self.inp.sign * sign_at(self.f, self._point(z), self.backend, self.ctr)

    def _value_and_slope(self, z):
        t = self._point(z)
        value = evaluate(self.f, t, self.ctr)
        slope = evaluate(self.f_prime, t, self.ctr)
        if self.ctr is not None:
            self.ctr.charge_eval(2)
            self.ctr.charge_cmp()
        if self.backend.exact:
            s = self.backend.sign(value)
        else:
            s = sign_at(self.f, t, self.backend, None)
        value = value * self.inp.sign
        slope = slope * (self.inp.sign * self.inp.orientation)
        return value, slope, s * self.inp.sign

    def _root_above(self, s) -> bool:
        return s < 0 if self.increasing else s > 0

    def _update(self, z, s):
        if self._root_above(s):
            self.lo = max(self.lo, z)
        else:
            self.hi = min(self.hi, z)

    def grid(self) -> Tuple[Any, List[Any]]:
        alpha = self.backend.coerce(_to_fraction(self.inp.alpha_star))
        # alpha_star is an upper bound, so raising a tiny one keeps c0 well defined
        quarter = self.backend.coerce(Fraction(1, 4))
        if alpha < quarter:
            alpha = quarter
        step = 1 / (8 * alpha)
        c0 = 1 + step if not self.increasing else 1 / (1 - step)
        c0 = self._q(c0)
        target = self.R / self.eps
        ratios = [c0]
        while len(ratios) < 2 or ratios[-1] < target:
            ratios.append(self._q(ratios[-1] * ratios[-1]))
            if self.ctr is not None:
                self.ctr.charge_mul()
                self.ctr.charge_cmp()
        return c0, ratios

    def _newton_point(self, z, value, slope):
        half = (self.lo + self.hi) / 2
        if slope == 0:
            return self._q(half)
        if self.ctr is not None:
            self.ctr.charge_div()
            self.ctr.charge_add()
        candidate = self._q(z - value / slope)
        if not self.lo <= candidate <= self.hi:
            return self._q(half)
        return candidate

    def run(self) -> HybridTrace:
        eps = self.eps
        s = self._sign(eps)
        if s == 0:
            return HybridTrace(eps, True, eps, (eps, eps), None, 0)
        if not self._root_above(s):
            half = self._q(eps / 2)
            return HybridTrace(half, False, half, (self.backend.zero(), eps), None, 0)

        c0, ratios = self.grid()
        M = len(ratios) - 1
        x_hat = eps
        self.lo = eps
        for k in range(M - 1, -1, -1):
            y = self._q(x_hat * ratios[k])
            if self.ctr is not None:
                self.ctr.charge_mul()
                self.ctr.charge_cmp()
            if y >= self.R:
                continue
            s = self._sign(y)
            if s == 0:
                return HybridTrace(y, True, y, (y, y), GridState(c0, M, x_hat, k), 0)
            if self._root_above(s):
                x_hat = y
        self.lo = x_hat
        self.hi = min(self._q(x_hat * c0), self.R)
        # quantization can leave the root just past hi
        while self.hi < self.R:
            s = self._sign(self.hi)
            if s == 0:
                hit = self.hi
                return HybridTrace(hit, True, hit, (hit, hit), GridState(c0, M, x_hat, 0), 0)
            if not self._root_above(s):
                break
            x_hat = self.lo = self.hi
            self.hi = min(self._q(self.hi * c0), self.R)
        grid = GridState(c0, M, x_hat, 0)
        bracket = (self.lo, self.hi)
        start = self.lo if not self.increasing else self.hi
        logger.debug(f"HYBRID grid M={M}, bracket width {self.hi - self.lo}")

        iterations = newton_iterations(self.inp.R, self.inp.eps)
        z = start
        for _ in range(iterations):
            value, slope, s = self._value_and_slope(z)
            if s == 0:
                return HybridTrace(z, True, start, bracket, grid, iterations)
            self._update(z, s)
            z = self._newton_point(z, value, slope)

        root, exact = self._certify(z, iterations)
        return HybridTrace(root, exact, start, bracket, grid, iterations)

    def _certify(self, z, iterations):
        """Shrink the sign bracket below eps around the Newton iterate."""
        half_eps = self.eps / 2
        rounds = 2 * iterations + self.bits + 8
        for round_index in range(rounds):
            s = self._sign(z)
            if s == 0:
                return z, True
            self._update(z, s)
            if self.hi - self.lo < self.eps:
                return z, False
            side = z + half_eps if z == self.lo else z - half_eps
            if not self.lo < side < self.hi:
                side = self._q((self.lo + self.hi) / 2)
            s = self._sign(side)
            if s == 0:
                return side, True
            self._update(side, s)
            if self.hi - self.lo < self.eps:
                return side, False
            if round_index < iterations:
                value, slope, _ = self._value_and_slope(side)
                z = self._newton_point(side, value, slope)
            else:
                z = self._q((self.lo + self.hi) / 2)
        raise InvariantViolation("HYBRID failed to bracket the root within eps")


def hybrid_search(
    inp: HybridInput, ctr: Optional[OpCounter] = None, backend: Optional[ScalarBackend] = None
) -> HybridTrace:
    """Run HYBRID and keep the grid state and Newton start for inspection."""
    return _Hybrid(inp, backend or ExactRational(), ctr).run()


def hybrid_solve(
    inp: HybridInput, ctr: Optional[OpCounter] = None, backend: Optional[ScalarBackend] = None
):
    """z with |z - zeta| < eps for the unique root zeta of phi in (0, R)."""
    return hybrid_search(inp, ctr, backend).root


def alpha_bound(D: int, m: int, override=None, strict: bool = False) -> Fraction:
    """Upper bound on |x - u| * gamma(f, x) over convexity cells of m-nomials of degree D."""
    if D < 2 or m < 2:
        raise InvalidRequest(f"alpha_bound needs D >= 2 and m >= 2, got D={D}, m={m}")
    floor = Fraction(D - 1, 2)
    if m == 2:
        return floor
    cubic = max(Fraction((D - 1) * (D - 2), 2), floor)
    if m == 3:
        return cubic
    if override is not None:
        value = _to_fraction(override)
        if value <= 0:
            raise InvalidRequest(f"alpha override must be positive, got {override}")
        return value
    if strict:
        raise AlphaUnknown(f"No proven alpha bound for {m}-nomials")
    logger.warning(f"Using unverified alpha bound {cubic} for a {m}-nomial of degree {D}")
    return cubic


def _mpf(value, ctx, backend: Optional[ScalarBackend] = None):
    if backend is not None:
        return backend.to_mpf(value, ctx)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / ctx.mpf(value.denominator)
    return ctx.mpf(value)


def gamma(f: SparsePoly, x, k_max: int, backend: Optional[ScalarBackend] = None):
    """max over 2 <= k <= min(k_max, D) of |f^(k)(x) / (k! f'(x))|^(1/(k-1)), as an mpf."""
    backend = backend or ExactRational()
    ctx = MPContext()
    ctx.prec = GAMMA_PRECISION
    x = backend.coerce(x)
    first = evaluate(derivative(f), x)
    if backend.sign(first) == 0:
        raise SingularPoint(f"f'({x}) = 0")
    first = _mpf(first, ctx, backend)
    best = ctx.mpf(0)
    for k in range(2, min(k_max, f.degree()) + 1):
        kth = _mpf(evaluate(nth_derivative(f, k), x), ctx, backend)
        ratio = abs(kth / (ctx.factorial(k) * first))
        if ratio == 0:
            continue
        best = max(best, ratio ** (ctx.mpf(1) / (k - 1)))
    return best


def sum_gamma_bound(f1: SparsePoly, f2: SparsePoly, x, k_max: int, backend=None):
    """(x*gamma(f1+f2, x), max(x*gamma(f1, x), x*gamma(f2, x)))."""
    backend = backend or ExactRational()
    ctx = MPContext()
    ctx.prec = GAMMA_PRECISION
    scale = _mpf(backend.coerce(x), ctx, backend)
    combined = scale * gamma(f1 + f2, x, k_max, backend)
    separate = max(scale * gamma(f1, x, k_max, backend), scale * gamma(f2, x, k_max, backend))
    return combined, separate


def is_approximate_root(f: SparsePoly, z0, zeta_oracle, iters: int) -> bool:
    """Newton from z0 contracts as |z_{i+1} - zeta| <= 8 (1/2)^(2^i) |z0 - zeta|."""
    ctx = MPContext()
    ctx.prec = ORBIT_PRECISION
    terms = [(_mpf(c, ctx), a) for c, a in f.terms]
    poly = SparsePoly(tuple(terms))
    poly_prime = derivative(poly)
    z = _mpf(z0, ctx)
    zeta = _mpf(zeta_oracle, ctx)
    initial = abs(z - zeta)
    slack = ctx.ldexp(max(ctx.mpf(1), abs(zeta)), 16 - ORBIT_PRECISION)
    for i in range(iters):
        slope = evaluate(poly_prime, z)
        if slope == 0:
            raise SingularPoint(f"f' vanishes on the Newton orbit at step {i}")
        z = z - evaluate(poly, z) / slope
        if abs(z - zeta) > 8 * ctx.ldexp(initial, -(2**i)) + slack:
            return False
    return True
