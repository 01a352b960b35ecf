import random
from fractions import Fraction

import pytest

from src.benchmark import (
    BenchRow,
    bench_count,
    bench_hybrid,
    bench_solve,
    fit_scaling,
    fixed_trinomial,
    random_fewnomial,
    roots_match,
    verify_suite,
)
from src.errors import InvalidRequest
from src.scalar import AdaptiveFloat


def row(D, ratio):
    return BenchRow(D=D, m=3, eps="1e-9", charged_ops=0, charged_evals=0, chain_K=0, ratio=ratio)


def test_fit_scaling():
    C, spread = fit_scaling([row(16, 1.0), row(16, 3.0), row(32, 4.0)])
    assert C == 3.0
    assert spread == 2.0
    assert fit_scaling([]) == (0.0, 0.0)


def test_random_fewnomial_shape():
    rng = random.Random(11)
    f = random_fewnomial(rng, 10, 4)
    assert f.term_count() == 4
    assert f.exponents[0] == 0 and f.degree() == 10
    assert all(c != 0 and abs(c) <= 10 for c in f.coefficients)
    with pytest.raises(InvalidRequest):
        random_fewnomial(rng, 2, 4)


def test_roots_match():
    tol = Fraction(1, 100)
    assert roots_match([Fraction(2), Fraction(1)], [1, 2], tol)
    assert not roots_match([Fraction(1)], [1, 2], tol)
    assert not roots_match([Fraction(11, 10)], [1], tol)


def test_bench_count_rows():
    report = bench_count([16, 64], trials=3, seed=5)
    assert len(report.rows) == 6
    assert report.C > 0
    data = report.as_dict()
    assert data["mode"] == "count"
    assert "wall_time" not in data["rows"][0]
    assert "wall_time" in report.as_dict(timings=True)["rows"][0]


def test_bench_solve_on_floats():
    report = bench_solve([16, 32], m=3, trials=2, seed=5, backend=AdaptiveFloat(128))
    assert len(report.rows) == 4
    assert all(r.charged_ops > 0 for r in report.rows)


def test_bench_hybrid_exact():
    report = bench_hybrid([8, 64], R="2", eps="1e-6")
    assert [r.D for r in report.rows] == [8, 64]
    assert all(r.charged_evals > 0 for r in report.rows)


def test_small_verify_suite_passes():
    result = verify_suite(trials=8, max_degree=12, seed=3)
    assert result["trials"] == 8
    assert result["failed"] == 0, result["failures"]
    assert result["passed"] == 8


def test_verify_suite_on_the_float_backend():
    result = verify_suite(trials=8, max_degree=12, seed=3, backend=AdaptiveFloat(128))
    assert result["failed"] == 0, result["failures"]


def test_verify_suite_needs_degree_three():
    with pytest.raises(InvalidRequest):
        verify_suite(trials=1, max_degree=2)


SCALING_DEGREES = [2**k for k in range(10, 21, 2)]


def test_fixed_trinomial_family():
    f = fixed_trinomial(1024)
    assert f.exponents == (0, 513, 1024)
    assert list(f.coefficients) == [1, -3, 1]
    with pytest.raises(InvalidRequest):
        fixed_trinomial(2)


def test_bench_solve_fixed_family_runs_once_per_degree():
    report = bench_solve([16, 64], trials=4, family="fixed", backend=AdaptiveFloat(128))
    assert [r.D for r in report.rows] == [16, 64]
    assert all(r.m == 3 for r in report.rows)
    with pytest.raises(InvalidRequest):
        bench_solve([16], family="sparse")


@pytest.mark.slow
def test_solve_scaling_fits_one_constant():
    report = bench_solve(SCALING_DEGREES, family="fixed", backend=AdaptiveFloat(128))
    assert [r.D for r in report.rows] == SCALING_DEGREES
    assert report.spread <= 2


@pytest.mark.slow
def test_count_scaling_fits_one_constant():
    report = bench_count(SCALING_DEGREES, trials=10, seed=7, backend=AdaptiveFloat(128))
    assert len(report.rows) == 10 * len(SCALING_DEGREES)
    assert report.spread <= 2
    assert max(r.chain_K for r in report.rows) <= 3 * 20 + 2
