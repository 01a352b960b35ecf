import json
from fractions import Fraction
from math import comb

import hypothesis.strategies as st
import pytest
from hypothesis import assume, given, settings

from src.config_validator import AppConfig
from src.errors import AlphaUnknown, InvalidRequest, InvariantViolation, NotDampened
from src.jobs import JobSpec, run
from src.mnomial_solver import (
    MnomialSolver,
    ProvenanceKind,
    RootReport,
    SolveRequest,
    Verdict,
    check_dampened,
    dampened_family,
    solve,
    solve_closed_count,
    verify_report,
)
from src.op_counter import OpCounter
from src.oracle import dense_sturm_count, expand, oracle_roots
from src.scalar import AdaptiveFloat
from src.sparse_poly import SparsePoly, evaluate, format_poly
from src.trinomial_sturm import CountQuery, count_roots

from .conftest import poly

EPS = Fraction(1, 10**9)

TRINOMIAL = poly((1, 0), (-3, 37), (1, 100))
QUARTIC = poly((24, 0), (-50, 1), (35, 2), (-10, 3), (1, 4))  # (x-1)(x-2)(x-3)(x-4)
# f' = 15((x^2 - 4x + 3)^2 + 1) > 0 while f'' vanishes at 1, 2 and 3
UNDAMPENED = poly((15, 0), (150, 1), (-180, 2), (110, 3), (-30, 4), (3, 5))


def kinds(report):
    return [e.provenance.kind for e in report.entries]


def near_roots(f, report, eps):
    """Each approximation has a sign change of f (or an exact root) within eps."""
    for z in report.roots:
        lo, hi = max(z - eps, Fraction(0)), z + eps
        if evaluate(f, z) != 0 and evaluate(f, lo) * evaluate(f, hi) > 0:
            return False
    return True


def test_quadratic_with_two_roots():
    report = solve(SolveRequest(poly((2, 0), (-3, 1), (1, 2)), Fraction(10), EPS))
    assert report.roots == (1, 2)
    assert kinds(report) == [ProvenanceKind.QUADRATIC_FORMULA] * 2


def test_double_root_is_reported_once():
    report = solve(SolveRequest(poly((1, 0), (-2, 1), (1, 2)), Fraction(10), EPS))
    assert report.roots == (1,)


def test_binomial_root():
    eps = Fraction(1, 10**12)
    report = solve(SolveRequest(poly((-1, 0), (1, 1000)), Fraction(2), eps))
    assert len(report) == 1
    assert abs(report.roots[0] - 1) < eps


def test_sparse_trinomial():
    ctr = OpCounter()
    report = solve(SolveRequest(TRINOMIAL, Fraction(2), EPS), ctr)
    assert len(report) == count_roots(TRINOMIAL, CountQuery.closed(0, 2)) == 2
    assert near_roots(TRINOMIAL, report, EPS)
    assert ctr.evals > 0
    assert ctr.max_depth >= 1
    assert all(k is ProvenanceKind.HYBRID_INTERVAL for k in kinds(report))


@pytest.mark.slow
def test_sparse_trinomial_matches_oracle():
    report = solve(SolveRequest(TRINOMIAL, Fraction(2), EPS))
    truth = oracle_roots(TRINOMIAL, CountQuery.closed(0, 2), EPS)
    assert len(truth) == len(report)
    assert all(abs(z - t) < EPS * 9 / 8 for z, t in zip(report.roots, truth))


def test_trivial_inputs():
    assert solve(SolveRequest(SparsePoly.zero(), Fraction(1), EPS)).all_reals
    assert len(solve(SolveRequest(poly((3, 0)), Fraction(1), EPS))) == 0
    monomial = solve(SolveRequest(poly((5, 3)), Fraction(1), EPS))
    assert monomial.roots == (0,)
    assert kinds(monomial) == [ProvenanceKind.ZERO_ROOT]


def test_root_at_zero_and_inside():
    report = solve(SolveRequest(poly((-1, 1), (1, 3)), Fraction(2), EPS))
    assert report.roots == (0, 1)
    assert kinds(report)[0] is ProvenanceKind.ZERO_ROOT


def test_roots_at_the_right_endpoint():
    linear = solve(SolveRequest(poly((-2, 0), (1, 1)), Fraction(2), EPS))
    assert linear.roots == (2,)
    assert kinds(linear) == [ProvenanceKind.ENDPOINT]
    cubic = solve(SolveRequest(poly((-8, 0), (1, 3)), Fraction(2), EPS))
    assert cubic.roots == (2,)
    assert kinds(cubic) == [ProvenanceKind.ENDPOINT]


def test_roots_outside_the_interval_are_ignored():
    assert len(solve(SolveRequest(poly((-9, 0), (1, 2)), Fraction(2), EPS))) == 0
    assert len(solve(SolveRequest(poly((1, 0), (1, 2)), Fraction(2), EPS))) == 0


def test_zero_root_with_non_primitive_exponents():
    # x (x^2 - 1)(x^2 - 4)
    report = solve(SolveRequest(poly((4, 1), (-5, 3), (1, 5)), Fraction(3), EPS))
    assert len(report) == 3
    assert report.roots[0] == 0
    assert abs(report.roots[1] - 1) < EPS
    assert abs(report.roots[2] - 2) < EPS


def test_cubic_through_reciprocal_transform():
    cubic = poly((-6, 0), (11, 1), (-6, 2), (1, 3))
    report = solve(SolveRequest(cubic, Fraction(10), EPS))
    assert len(report) == 3
    for z, r in zip(report.roots, (1, 2, 3)):
        assert abs(z - r) < EPS


def test_strict_alpha_needs_an_override_for_tetranomials():
    cubic = poly((-6, 0), (11, 1), (-6, 2), (1, 3))
    with pytest.raises(AlphaUnknown):
        solve(SolveRequest(cubic, Fraction(10), EPS), strict_alpha=True)
    report = solve(SolveRequest(cubic, Fraction(10), EPS, Fraction(10)), strict_alpha=True)
    assert len(report) == 3


def test_dampened_five_term_polynomial():
    report = solve(SolveRequest(QUARTIC, Fraction(5), EPS))
    assert len(report) == 4
    for z, r in zip(report.roots, (1, 2, 3, 4)):
        assert abs(z - r) < EPS


def test_not_dampened_is_refused():
    with pytest.raises(NotDampened):
        solve(SolveRequest(UNDAMPENED, Fraction(2), EPS))


def test_request_validation():
    with pytest.raises(InvalidRequest):
        SolveRequest(TRINOMIAL, Fraction(1), Fraction(2))
    with pytest.raises(InvalidRequest):
        SolveRequest(TRINOMIAL, Fraction(0), EPS)
    with pytest.raises(InvalidRequest):
        SolveRequest(TRINOMIAL, Fraction(2), EPS, Fraction(-1))


def test_partition_of_sparse_trinomial():
    part = MnomialSolver().partition(TRINOMIAL, Fraction(2), EPS)
    assert len(part.u) == 2 and part.u[0] == 0
    assert len(part.v) == 2 and part.v[0] == 0
    assert part.v[1] < part.u[1]


def test_float_backend_solve_agrees_with_exact():
    backend = AdaptiveFloat(128)
    lifted = SparsePoly(tuple((backend.coerce(c), a) for c, a in TRINOMIAL.terms))
    report = solve(
        SolveRequest(lifted, backend.coerce(2), backend.coerce(EPS)), backend=backend
    )
    exact = solve(SolveRequest(TRINOMIAL, Fraction(2), EPS))
    assert len(report) == len(exact)
    for z, w in zip(report.roots, exact.roots):
        assert abs(backend.to_fraction(z) - w) < 2 * EPS


def test_verify_report_rejects_missing_roots():
    report = solve(SolveRequest(poly((2, 0), (-3, 1), (1, 2)), Fraction(10), EPS))
    truncated = RootReport(report.entries[:1])
    with pytest.raises(InvariantViolation):
        verify_report(poly((2, 0), (-3, 1), (1, 2)), truncated, Fraction(10), EPS)


@settings(max_examples=25)
@given(
    st.integers(min_value=3, max_value=40),
    st.data(),
    st.sampled_from([Fraction(1), Fraction(2), Fraction(10)]),
)
def test_random_trinomials_match_oracle(D, data, R):
    coeff = st.integers(min_value=-10, max_value=10).filter(bool)
    a = data.draw(st.integers(min_value=1, max_value=D - 1))
    f = poly((data.draw(coeff), 0), (data.draw(coeff), a), (data.draw(coeff), D))
    report = solve(SolveRequest(f, R, EPS))
    truth = oracle_roots(f, CountQuery.closed(0, R), EPS)
    assert len(report) == len(truth)
    assert all(abs(z - t) < EPS * 9 / 8 for z, t in zip(report.roots, truth))


def test_closed_counts_across_zero():
    assert solve_closed_count(poly((2, 0), (-3, 1), (1, 2)), CountQuery.closed(-5, 5)) == 2
    assert solve_closed_count(poly((-1, 1), (1, 3)), CountQuery.closed(-2, 2)) == 3
    assert solve_closed_count(poly((-1, 1), (1, 3)), CountQuery(-1, 1, True, False)) == 2
    with pytest.raises(InvalidRequest):
        solve_closed_count(SparsePoly.zero(), CountQuery.closed(0, 1))


@given(
    st.integers(min_value=2, max_value=30),
    st.data(),
    st.fractions(min_value=-3, max_value=3, max_denominator=8),
    st.fractions(min_value=-3, max_value=3, max_denominator=8),
)
def test_closed_count_matches_dense_oracle(D, data, a, b):
    a, b = min(a, b), max(a, b)
    coeff = st.integers(min_value=-10, max_value=10).filter(bool)
    middle = data.draw(st.integers(min_value=0, max_value=D - 1))
    shift = data.draw(st.integers(min_value=0, max_value=3))
    f = SparsePoly.from_terms(
        [(Fraction(data.draw(coeff)), shift), (Fraction(data.draw(coeff)), shift + middle)]
        + [(Fraction(data.draw(coeff)), shift + D)]
    )
    q = CountQuery(a, b, data.draw(st.booleans()), data.draw(st.booleans()))
    assert solve_closed_count(f, q) == dense_sturm_count(expand(f), q)


def test_dampened_family_of_binomial():
    family = dampened_family(poly((1, 3), (1, 5)))
    assert family == [poly((1, 0), (1, 2)), poly((2, 0))]


def test_dampened_verdicts():
    assert set(check_dampened(TRINOMIAL).verdicts) == {Verdict.BY_THEOREM}
    assert set(check_dampened(poly((-6, 0), (11, 1), (-6, 2), (1, 3))).verdicts) == {
        Verdict.BY_THEOREM
    }
    cert = check_dampened(QUARTIC)
    assert cert.verdicts[0] is Verdict.DAMPENED
    assert cert.ok and cert.complete
    bad = check_dampened(UNDAMPENED)
    assert bad.verdicts[0] is Verdict.NOT_DAMPENED
    assert not bad.ok


def test_large_degree_members_are_unknown():
    cert = check_dampened(QUARTIC, max_D_explicit=2)
    assert cert.verdicts[0] is Verdict.UNKNOWN
    assert cert.ok and not cert.complete


coefficients = st.integers(min_value=-10, max_value=10).filter(bool)


@st.composite
def random_trinomials(draw, max_degree):
    D = draw(st.integers(min_value=3, max_value=max_degree))
    a = draw(st.integers(min_value=1, max_value=D - 1))
    return poly((draw(coefficients), 0), (draw(coefficients), a), (draw(coefficients), D))


@pytest.mark.slow
@settings(max_examples=300)
@given(random_trinomials(2048), st.sampled_from([Fraction(1), Fraction(2), Fraction(10)]))
def test_random_trinomials_match_oracle_up_to_degree_2048(f, R):
    report = solve(SolveRequest(f, R, EPS))
    truth = oracle_roots(f, CountQuery.closed(0, R), EPS)
    assert len(report) == len(truth)
    assert all(abs(z - t) < EPS * 9 / 8 for z, t in zip(report.roots, truth))


@given(random_trinomials(200))
def test_recursion_depth_is_below_term_count(f):
    ctr = OpCounter()
    solve(SolveRequest(f, Fraction(2), EPS), ctr)
    assert ctr.max_depth <= f.term_count() - 1


def test_tetranomial_recursion_depth():
    ctr = OpCounter()
    solve(SolveRequest(poly((-6, 0), (11, 1), (-6, 2), (1, 3)), Fraction(10), EPS), ctr)
    assert ctr.max_depth <= 3


def shifted_reflection(f, R):
    """f(R - x) expanded into a SparsePoly."""
    return SparsePoly.from_terms(
        (c * comb(a, j) * R ** (a - j) * (-1) ** j, j) for c, a in f.terms for j in range(a + 1)
    )


@given(
    st.lists(st.integers(min_value=-10, max_value=10), min_size=2, max_size=4),
    st.sampled_from([Fraction(1), Fraction(2), Fraction(3)]),
)
def test_roots_of_the_shifted_reflection_mirror(coeffs, R):
    f = SparsePoly.from_terms((Fraction(c), a) for a, c in enumerate(coeffs))
    assume(not f.is_zero and f.degree() >= 1)
    g = shifted_reflection(f, R)
    direct = solve(SolveRequest(f, R, EPS)).roots
    mirrored = sorted(R - z for z in solve(SolveRequest(g, R, EPS)).roots)
    assert len(direct) == len(mirrored)
    assert all(abs(z - w) <= 2 * EPS for z, w in zip(direct, mirrored))


@given(random_trinomials(100), st.sampled_from(["exact", "float:128"]))
def test_repeated_solve_reports_are_byte_identical(f, backend):
    job = JobSpec(command="solve", poly=format_poly(f), interval="0,2", backend=backend)
    first = json.dumps(run(job, AppConfig()), sort_keys=True)
    second = json.dumps(run(job, AppConfig()), sort_keys=True)
    assert first == second
