"""
Scaling benchmarks and the oracle-equivalence suite.

Each benchmark charges the OpCounter of one call per row and divides by the complexity
model of the measured operation; a single constant fits every degree when the spread
of the per-degree ratios stays small.
"""

import math
import random
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .config import COEFF_RANGE, DEFAULT_BENCH_RADIUS, DEFAULT_EPS
from .errors import FewnomialError, InvalidRequest
from .hybrid_newton import Direction, HybridInput, alpha_bound, hybrid_search
from .logger import log_progress, logger
from .mnomial_solver import SolveRequest, solve
from .op_counter import OpCounter
from .oracle import dense_sturm_count, expand, oracle_roots
from .scalar import ExactRational, ScalarBackend, parse_rational
from .sparse_poly import SparsePoly, format_poly
from .trinomial_sturm import CountQuery, count_roots, random_trinomial

BENCH_MODES = ("solve", "count", "hybrid")
BENCH_FAMILIES = ("random", "fixed")


@dataclass
class BenchRow:
    D: int
    m: int
    eps: str
    charged_ops: int
    charged_evals: int
    chain_K: int
    ratio: float
    wall_time: float = 0.0

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        data = {
            "D": self.D,
            "m": self.m,
            "eps": self.eps,
            "charged_ops": self.charged_ops,
            "charged_evals": self.charged_evals,
            "chain_K": self.chain_K,
            "ratio": round(self.ratio, 6),
        }
        if timings:
            data["wall_time"] = round(self.wall_time, 6)
        return data


@dataclass
class BenchReport:
    mode: str
    model: str
    rows: List[BenchRow] = field(default_factory=list)
    C: float = 0.0
    spread: float = 0.0

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "model": self.model,
            "rows": [r.as_dict(timings) for r in self.rows],
            "C": round(self.C, 6),
            "spread": round(self.spread, 6),
        }


def fit_scaling(rows: List[BenchRow]) -> tuple:
    """(C, spread): mean ratio per degree, C their mean, spread max/min."""
    per_degree: Dict[int, List[float]] = {}
    for row in rows:
        per_degree.setdefault(row.D, []).append(row.ratio)
    means = [statistics.mean(v) for v in per_degree.values()]
    if not means:
        return 0.0, 0.0
    low = min(means)
    return statistics.mean(means), (max(means) / low if low > 0 else math.inf)


def random_fewnomial(
    rng: random.Random, D: int, m: int, coeff_range: int = COEFF_RANGE, backend=None
) -> SparsePoly:
    """m terms with exponents 0 < ... < D and nonzero integer coefficients."""
    if m == 3:
        return random_trinomial(rng, D, coeff_range, backend)
    if m < 2 or m - 1 > D:
        raise InvalidRequest(f"Cannot place {m} terms in degree {D}")
    backend = backend or ExactRational()
    middle = sorted(rng.sample(range(1, D), m - 2))
    exps = [0] + middle + [D]

    def coeff():
        c = rng.randint(1, coeff_range)
        return backend.coerce(c if rng.random() < 0.5 else -c)

    return SparsePoly(tuple((coeff(), a) for a in exps))


def fixed_trinomial(D: int, backend=None) -> SparsePoly:
    """1 - 3x^(D//2+1) + x^D: one root on each side of 1, both within O(1/D) of it."""
    if D < 3:
        raise InvalidRequest(f"Fixed trinomial family needs D >= 3, got {D}")
    backend = backend or ExactRational()
    return SparsePoly(
        (
            (backend.coerce(1), 0),
            (backend.coerce(-3), D // 2 + 1),
            (backend.coerce(1), D),
        )
    )


def _solve_model(D: int, R: Fraction, eps: Fraction) -> float:
    return math.log2(D) * math.log2(D * math.log2(float(R / eps)))


def bench_solve(
    degrees,
    m: int = 3,
    trials: int = 10,
    seed: int = 7,
    backend: Optional[ScalarBackend] = None,
    R: str = DEFAULT_BENCH_RADIUS,
    eps: str = DEFAULT_EPS,
    family: str = "random",
    **options,
) -> BenchReport:
    """Charged operations of full solves on random m-nomials, or on the fixed trinomial
    family when ``family`` is "fixed" (one solve per degree, m is ignored)."""
    if family not in BENCH_FAMILIES:
        raise InvalidRequest(f"Unknown bench family {family!r}; expected one of {BENCH_FAMILIES}")
    backend = backend or ExactRational()
    if family == "fixed":
        m, trials = 3, 1
    rng = random.Random(seed)
    R_frac, eps_frac = parse_rational(R), parse_rational(eps)
    report = BenchReport("solve", "ops/(log2D*log2(D*log2(R/eps)))")
    total = len(degrees) * trials
    for D in degrees:
        for _ in range(trials):
            if family == "fixed":
                f = fixed_trinomial(D, backend)
            else:
                f = random_fewnomial(rng, D, m, backend=backend)
            ctr = OpCounter()
            start = time.perf_counter()
            solve(
                SolveRequest(f, backend.coerce(R_frac), backend.coerce(eps_frac)),
                ctr,
                backend,
                **options,
            )
            wall = time.perf_counter() - start
            report.rows.append(
                BenchRow(
                    D,
                    m,
                    eps,
                    ctr.total,
                    ctr.evals,
                    ctr.max_chain_length,
                    ctr.total / _solve_model(D, R_frac, eps_frac),
                    wall,
                )
            )
            log_progress(100 * len(report.rows) / total, len(report.rows), total)
    report.C, report.spread = fit_scaling(report.rows)
    return report


def bench_count(
    degrees, trials: int = 10, seed: int = 7, backend: Optional[ScalarBackend] = None
) -> BenchReport:
    """Charged operations of trinomial root counts on random intervals in [-2, 2]."""
    backend = backend or ExactRational()
    rng = random.Random(seed)
    report = BenchReport("count", "ops/ceil(log2D)^2")
    for D in degrees:
        for _ in range(trials):
            f = random_trinomial(rng, D, backend=backend)
            ends = sorted(Fraction(rng.randint(-2000, 2000), 1000) for _ in range(2))
            q = CountQuery(backend.coerce(ends[0]), backend.coerce(ends[1]))
            ctr = OpCounter()
            start = time.perf_counter()
            count_roots(f, q, ctr, backend)
            wall = time.perf_counter() - start
            model = max(1, (D - 1).bit_length()) ** 2
            report.rows.append(
                BenchRow(D, 3, "", ctr.total, 0, ctr.max_chain_length, ctr.total / model, wall)
            )
    report.C, report.spread = fit_scaling(report.rows)
    return report


def bench_hybrid(
    degrees,
    backend: Optional[ScalarBackend] = None,
    R: str = DEFAULT_BENCH_RADIUS,
    eps: str = DEFAULT_EPS,
) -> BenchReport:
    """HYBRID evaluations for x^D - 2 on (0, R) against log2(alpha * log2(R/eps))."""
    backend = backend or ExactRational()
    R_frac, eps_frac = parse_rational(R), parse_rational(eps)
    report = BenchReport("hybrid", "evals/log2(alpha*log2(R/eps))")
    for D in degrees:
        f = SparsePoly(((backend.coerce(-2), 0), (backend.coerce(1), D)))
        alpha = alpha_bound(D, 2)
        inp = HybridInput(
            backend.coerce(eps_frac), backend.coerce(R_frac), f, alpha, Direction.INCREASING
        )
        ctr = OpCounter()
        start = time.perf_counter()
        hybrid_search(inp, ctr, backend)
        wall = time.perf_counter() - start
        model = math.log2(float(alpha) * math.log2(float(R_frac / eps_frac)))
        report.rows.append(
            BenchRow(D, 2, eps, ctr.total, ctr.evals, 0, ctr.evals / model, wall)
        )
    report.C, report.spread = fit_scaling(report.rows)
    return report


def roots_match(approx, truth, tol) -> bool:
    """Sorted pairing with every pair closer than tol."""
    if len(approx) != len(truth):
        return False
    return all(abs(Fraction(z) - t) < tol for z, t in zip(sorted(approx), sorted(truth)))


def verify_suite(
    trials: int = 100,
    max_degree: int = 64,
    seed: int = 7,
    eps: str = DEFAULT_EPS,
    backend: Optional[ScalarBackend] = None,
) -> Dict[str, Any]:
    """Random trinomials and tetranomials counted and solved on 'backend', checked against
    the dense oracle in exact arithmetic."""
    if max_degree < 3:
        raise InvalidRequest(f"verify needs max_degree >= 3, got {max_degree}")
    backend = backend or ExactRational()
    rng = random.Random(seed)
    eps_frac = parse_rational(eps)
    R = Fraction(2)
    passed = 0
    failures = []
    for trial in range(trials):
        D = rng.randint(3, max_degree)
        m = 3 if trial % 4 else 4
        f = random_fewnomial(rng, D, m)
        g = SparsePoly(tuple((backend.coerce(c), e) for c, e in f.terms))
        a, b = sorted(Fraction(rng.randint(-3000, 3000), 1000) for _ in range(2))
        q = CountQuery(a, b, rng.random() < 0.5, rng.random() < 0.5)
        try:
            lifted = CountQuery(backend.coerce(a), backend.coerce(b), q.a_open, q.b_open)
            counted = count_roots(g, lifted, backend=backend)
            expected = dense_sturm_count(expand(f), q)
            report = solve(SolveRequest(g, R, eps_frac), backend=backend)
            truth = oracle_roots(f, CountQuery.closed(0, R), eps_frac)
            ok = counted == expected and roots_match(
                [backend.to_fraction(z) for z in report.roots], truth, eps_frac * 9 / 8
            )
            reason = None if ok else "mismatch"
        except FewnomialError as e:
            ok, reason = False, f"{type(e).__name__}: {e}"
        if ok:
            passed += 1
        else:
            failures.append({"trial": trial, "poly": format_poly(f), "reason": reason})
            logger.warning(f"verify trial {trial} failed for {format_poly(f)}: {reason}")
    return {"trials": trials, "passed": passed, "failed": len(failures), "failures": failures}
