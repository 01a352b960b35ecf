from fractions import Fraction
import random
from math import isqrt

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings
from mpmath.ctx_mp import MPContext

from src.benchmark import bench_hybrid
from src.errors import AlphaUnknown, InvalidRequest, PrecisionExhausted, SingularPoint
from src.hybrid_newton import (
    Direction,
    HybridInput,
    alpha_bound,
    gamma,
    hybrid_search,
    hybrid_solve,
    is_approximate_root,
    newton_iterations,
    sum_gamma_bound,
)
from src.op_counter import OpCounter
from src.scalar import AdaptiveFloat
from src.sparse_poly import SparsePoly, evaluate

from .conftest import poly

SQRT2 = Fraction(isqrt(2 * 10**120), 10**60)


def brackets_root(f, z, eps):
    """f changes sign on (z - eps, z + eps)."""
    return evaluate(f, z - eps) * evaluate(f, z + eps) < 0 or evaluate(f, z) == 0


def high_precision_root(c, D, prec=320):
    ctx = MPContext()
    ctx.prec = prec
    return ctx, ctx.root(c, D)


def test_newton_iteration_count():
    assert newton_iterations(2, Fraction(1, 10**9)) == 7
    assert newton_iterations(1, Fraction(1, 2)) == 3


def test_square_root_of_two():
    eps = Fraction(1, 10**6)
    f = poly((-2, 0), (1, 2))
    z = hybrid_solve(HybridInput(eps, 2, f, Fraction(1, 2), Direction.INCREASING))
    assert brackets_root(f, z, eps)


def test_thousandth_root_of_two_within_budget():
    eps = Fraction(1, 10**9)
    f = poly((-2, 0), (1, 1000))
    ctr = OpCounter()
    trace = hybrid_search(HybridInput(eps, 2, f, Fraction(999, 2), Direction.INCREASING), ctr)
    assert brackets_root(f, trace.root, eps)
    assert trace.newton_iterations == 7
    assert ctr.evals <= 200


def test_linear_phi():
    eps = Fraction(1, 10)
    inp = HybridInput(eps, 2, poly((-1, 0), (1, 1)), Fraction(1, 2), Direction.INCREASING)
    z = hybrid_solve(inp)
    assert abs(z - 1) < eps


def test_root_below_eps_returns_half_eps():
    eps = Fraction(1, 10)
    f = poly((Fraction(-1, 100), 0), (1, 1))
    trace = hybrid_search(HybridInput(eps, 2, f, Fraction(1, 2), Direction.INCREASING))
    assert trace.root == eps / 2
    assert not trace.exact
    assert trace.grid is None


def test_decreasing_convex_phi():
    eps = Fraction(1, 10**8)
    f = poly((3, 0), (-4, 1), (1, 2))  # (x - 1)(x - 3), decreasing on (0, 2)
    z = hybrid_solve(HybridInput(eps, 2, f, Fraction(1, 2), Direction.DECREASING))
    assert abs(z - 1) < eps


def test_reflected_coordinates():
    # phi(x) = f(2 - x) for f = x^2 - 2: decreasing and convex on (0, 2), root 2 - sqrt(2)
    eps = Fraction(1, 10**8)
    f = poly((-2, 0), (1, 2))
    inp = HybridInput(
        eps, 2, f, Fraction(1, 2), Direction.DECREASING, origin=2, orientation=-1
    )
    z = hybrid_solve(inp)
    assert abs((2 - z) - SQRT2) < eps


def test_sign_flipped_phi():
    # phi = -(2 - x^2) is the same increasing convex function as x^2 - 2
    eps = Fraction(1, 10**8)
    inp = HybridInput(eps, 2, poly((2, 0), (-1, 2)), Fraction(1, 2), Direction.INCREASING, sign=-1)
    assert abs(hybrid_solve(inp) - SQRT2) < eps


def test_hybrid_input_validation():
    f = poly((-2, 0), (1, 2))
    with pytest.raises(InvalidRequest):
        HybridInput(Fraction(3), 2, f, 1, Direction.INCREASING)
    with pytest.raises(InvalidRequest):
        HybridInput(Fraction(1, 10), 2, f, 0, Direction.INCREASING)
    with pytest.raises(InvalidRequest):
        HybridInput(Fraction(1, 10), 2, f, 1, Direction.INCREASING, sign=2)


@pytest.mark.parametrize("D", [10, 100, 1000])
def test_newton_start_is_an_approximate_root(D):
    eps = Fraction(1, 10**12)
    f = poly((-2, 0), (1, D))
    trace = hybrid_search(HybridInput(eps, 2, f, alpha_bound(D, 2), Direction.INCREASING))
    assert trace.grid is not None
    lo, hi = trace.bracket
    assert trace.start == hi
    _, zeta = high_precision_root(2, D)
    assert is_approximate_root(f, trace.start, zeta, 5)


def test_float_backend_budget_fits_one_constant():
    degrees = [2**10, 2**12, 2**14]
    report = bench_hybrid(degrees, AdaptiveFloat(128), "2", "1e-12")
    assert report.spread <= 2
    assert all(row.charged_evals > 0 for row in report.rows)


@pytest.mark.parametrize("D", [2**10, 2**16])
@pytest.mark.parametrize("eps_exp", [3, 6, 12])
def test_float_backend_root_accuracy(D, eps_exp):
    backend = AdaptiveFloat(128)
    eps = Fraction(1, 10**eps_exp)
    f = poly((-2, 0), (1, D))
    lifted = SparsePoly(tuple((backend.coerce(c), a) for c, a in f.terms))
    inp = HybridInput(
        backend.coerce(eps), backend.coerce(2), lifted, alpha_bound(D, 2), Direction.INCREASING
    )
    z = hybrid_solve(inp, None, backend)
    ctx, zeta = high_precision_root(2, D)
    assert abs(ctx.mpf(z) - zeta) < ctx.mpf(eps.numerator) / eps.denominator


def test_alpha_bounds():
    assert alpha_bound(100, 2) == Fraction(99, 2)
    assert alpha_bound(100, 3) == 4851
    assert alpha_bound(2, 3) == Fraction(1, 2)
    assert alpha_bound(10, 4, override=Fraction(7)) == 7
    assert alpha_bound(10, 5) == 36
    with pytest.raises(AlphaUnknown):
        alpha_bound(10, 4, strict=True)
    with pytest.raises(InvalidRequest):
        alpha_bound(1, 3)


def test_gamma_of_square():
    assert abs(3 * gamma(poly((-2, 0), (1, 2)), Fraction(3), 2) - 0.5) < 1e-30


def test_gamma_direct_sum():
    # f' (2) = 44, f''(2)/2 = 62, f'''(2)/6 = 37, f''''(2)/24 = 10, f'''''(2)/120 = 1
    value = gamma(poly((1, 0), (-3, 3), (1, 5)), Fraction(2), 5)
    assert abs(float(value) - 62 / 44) < 1e-12


def test_gamma_at_a_critical_point():
    with pytest.raises(SingularPoint):
        gamma(poly((-2, 0), (1, 2)), Fraction(0), 2)


@given(
    st.integers(min_value=2, max_value=60),
    st.integers(min_value=1, max_value=100),
    st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=1000),
)
def test_scaled_gamma_of_binomial_is_constant(D, c, x):
    value = float(x) * float(gamma(poly((-c, 0), (1, D)), x, D))
    expected = (D - 1) / 2
    assert abs(value - expected) <= expected * 1e-12


def test_x_gamma_of_degree_ten_binomial():
    for x in (Fraction(1, 3), Fraction(2), Fraction(17, 5)):
        assert abs(float(x) * float(gamma(poly((-7, 0), (1, 10)), x, 10)) - 4.5) < 1e-12


def test_sum_gamma_bound():
    combined, separate = sum_gamma_bound(poly((1, 5)), poly((1, 5)), Fraction(3), 5)
    assert abs(combined - 2) < 1e-30
    assert abs(separate - 2) < 1e-30


def test_approximate_root_certificate():
    f = poly((-2, 0), (1, 2))
    assert is_approximate_root(f, Fraction(3, 2), SQRT2, 6)
    assert not is_approximate_root(f, Fraction(100), SQRT2, 6)
    assert is_approximate_root(poly((-1, 0), (1, 1)), Fraction(5), Fraction(1), 6)


HYBRID_DEGREES = [2**k for k in range(10, 21, 2)]


def test_evaluation_budget_fits_one_constant_over_degrees_and_accuracies():
    backend = AdaptiveFloat(128)
    rows = []
    for eps_text in ("1e-3", "1e-6", "1e-12"):
        report = bench_hybrid(HYBRID_DEGREES, backend, "2", eps_text)
        assert report.spread <= 2
        rows.extend(report.rows)
    ratios = [row.ratio for row in rows]
    assert len(ratios) == 18
    assert max(ratios) / min(ratios) <= 2


@pytest.mark.parametrize("D", HYBRID_DEGREES)
@pytest.mark.parametrize("eps_exp", [3, 6, 12])
def test_root_within_eps_over_the_budget_sweep(D, eps_exp):
    backend = AdaptiveFloat(128)
    eps = Fraction(1, 10**eps_exp)
    lifted = SparsePoly(((backend.coerce(-2), 0), (backend.coerce(1), D)))
    inp = HybridInput(
        backend.coerce(eps), backend.coerce(2), lifted, alpha_bound(D, 2), Direction.INCREASING
    )
    trace = hybrid_search(inp, OpCounter(), backend)
    lo, hi = trace.bracket
    ctx, zeta = high_precision_root(2, D)
    assert ctx.mpf(lo) <= zeta <= ctx.mpf(hi)
    assert abs(ctx.mpf(trace.root) - zeta) < ctx.mpf(eps.numerator) / eps.denominator


@pytest.mark.slow
@settings(max_examples=100)
@given(
    st.integers(min_value=2, max_value=1000),
    st.integers(min_value=1, max_value=100),
    st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=100),
)
def test_scaled_gamma_of_binomial_is_constant_up_to_degree_1000(D, c, x):
    value = float(x) * float(gamma(poly((-c, 0), (1, D)), x, D))
    expected = (D - 1) / 2
    assert abs(value - expected) <= expected * 1e-12


@st.composite
def decreasing_convex(draw):
    """c - b x + a x^d with b > a d: decreasing and convex on (0, 1)."""
    d = draw(st.integers(min_value=2, max_value=30))
    a = draw(st.integers(min_value=1, max_value=10))
    b = a * d + draw(st.integers(min_value=1, max_value=50))
    c = draw(st.integers(min_value=-10, max_value=10))
    return poly((c, 0), (-b, 1), (a, d))


@given(
    decreasing_convex(),
    decreasing_convex(),
    st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100), max_denominator=100),
)
def test_gamma_of_a_sum_is_bounded_by_the_larger_term(f1, f2, x):
    k_max = max(f1.degree(), f2.degree())
    combined, separate = sum_gamma_bound(f1, f2, x, k_max)
    assert combined > 0
    assert combined <= separate + separate * 1e-30


@pytest.mark.slow
def test_newton_start_is_an_approximate_root_on_random_binomials():
    rng = random.Random(7)
    runs, certified = 200, 0
    for _ in range(runs):
        D = rng.randint(10, 1000)
        c = rng.randint(2, 10)
        eps = Fraction(1, 10 ** rng.choice((6, 9, 12)))
        f = poly((-c, 0), (1, D))
        trace = hybrid_search(HybridInput(eps, 2, f, alpha_bound(D, 2), Direction.INCREASING))
        assert not trace.exact
        _, zeta = high_precision_root(c, D)
        try:
            assert is_approximate_root(f, trace.start, zeta, 5)
        except PrecisionExhausted:
            continue
        certified += 1
    assert certified >= 0.99 * runs
