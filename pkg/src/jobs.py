"""
Job descriptions and their execution.

A JobSpec is what one CLI invocation or one batch line asks for; ``run`` executes it
and returns the exit status together with a JSON-ready report.
"""

import time
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .benchmark import (
    BENCH_FAMILIES,
    BENCH_MODES,
    bench_count,
    bench_hybrid,
    bench_solve,
    verify_suite,
)
from .config import (
    BACKEND_FLOAT,
    DEFAULT_BENCH_DEGREES,
    DEFAULT_BENCH_RADIUS,
    DEFAULT_BENCH_TRIALS,
    DEFAULT_EPS,
    DEFAULT_SEED,
    DEFAULT_VERIFY_MAX_DEGREE,
    DEFAULT_VERIFY_TRIALS,
)
from .config_validator import AppConfig, ConfigValidator
from .errors import FewnomialError, InvalidRequest, ParseError
from .logger import logger
from .mnomial_solver import MnomialSolver, SolveRequest, solve_closed_count
from .op_counter import OpCounter
from .oracle import tetranomial_blowup, tetranomial_chain_lengths
from .scalar import format_decimal, parse_rational
from .sparse_poly import parse_poly
from .trinomial_sturm import CountQuery, chain_length_stats

COMMANDS = ("count", "solve", "bench", "verify", "blowup")
DEFAULT_BLOWUP_DEGREES = [3, 4, 5, 10, 20]


def parse_interval(text: str) -> Tuple[Fraction, Fraction]:
    """'a,b' into two rationals."""
    if not isinstance(text, str):
        raise ParseError(f"Interval must be a string 'a,b', got {text!r}")
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(f"Interval must look like 'a,b', got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


def parse_degrees(value) -> List[int]:
    if isinstance(value, str):
        items = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        items = list(value)
    else:
        raise ParseError(f"Degrees must be a list or 'D1,D2,...', got {value!r}")
    try:
        degrees = [int(d) for d in items]
    except (TypeError, ValueError) as e:
        raise ParseError(f"Invalid degree list: {value!r}") from e
    if not degrees:
        raise ParseError("Degree list is empty")
    return degrees


def decimal_digits(eps: Fraction) -> int:
    """ceil(-log10 eps) + 2."""
    k = 0
    while Fraction(1, 10**k) > eps:
        k += 1
    return k + 2


@dataclass
class JobSpec:
    command: str
    poly: Optional[str] = None
    interval: Optional[str] = None
    a_open: bool = False
    b_open: bool = False
    eps: str = DEFAULT_EPS
    backend: Optional[str] = None
    alpha: Optional[str] = None
    seed: int = DEFAULT_SEED
    degrees: Optional[List[int]] = None
    m: int = 3
    trials: Optional[int] = None
    mode: str = "solve"
    family: str = "random"
    digits: Optional[int] = None
    max_degree: int = DEFAULT_VERIFY_MAX_DEGREE
    radius: str = DEFAULT_BENCH_RADIUS
    timings: bool = False
    bounds: Tuple[Fraction, Fraction] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"Unknown command {self.command!r}; expected one of {COMMANDS}")
        if self.degrees is not None:
            self.degrees = parse_degrees(self.degrees)
        self.eps = str(self.eps)
        self.radius = str(self.radius)
        if self.alpha is not None:
            self.alpha = str(self.alpha)
        if self.trials is not None and self.trials < 1:
            raise InvalidRequest(f"trials must be positive, got {self.trials}")
        eps = parse_rational(self.eps)
        if eps <= 0:
            raise InvalidRequest(f"eps must be positive, got {self.eps}")
        if self.digits is not None and not 0 <= self.digits <= 1000:
            raise InvalidRequest(f"digits must be 0-1000, got {self.digits}")
        if self.alpha is not None and parse_rational(self.alpha) <= 0:
            raise InvalidRequest(f"alpha must be positive, got {self.alpha}")

        if self.command in ("count", "solve"):
            if not self.poly:
                raise ParseError(f"{self.command} needs a polynomial")
            if not self.interval:
                raise ParseError(f"{self.command} needs an interval")
            a, b = parse_interval(self.interval)
            if a > b:
                raise InvalidRequest(f"Interval endpoints out of order: {self.interval}")
            self.bounds = (a, b)
        if self.command == "solve":
            a, b = self.bounds
            if a != 0:
                raise InvalidRequest("solve works on [0, R]; reflect x -> -x for negative roots")
            if not eps < b:
                raise InvalidRequest(f"eps must be below the interval width, got eps={self.eps}")
        if self.command == "bench":
            if self.mode not in BENCH_MODES + ("chains",):
                raise InvalidRequest(f"Unknown bench mode {self.mode!r}")
            if self.family not in BENCH_FAMILIES:
                raise InvalidRequest(f"Unknown bench family {self.family!r}")
            if any(D < 3 for D in self.degrees or DEFAULT_BENCH_DEGREES):
                raise InvalidRequest("bench degrees must be >= 3")
            if self.m < 2:
                raise InvalidRequest(f"bench needs m >= 2, got {self.m}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JobSpec":
        """Job from one decoded batch line."""
        if not isinstance(data, dict):
            raise ParseError("Batch line must be a JSON object")
        known = {f.name for f in fields(cls)} - {"bounds"}
        data = dict(data)
        if data.pop("open", False):
            data["a_open"] = data["b_open"] = True
        unknown = set(data) - known
        if unknown:
            raise ParseError(f"Unknown job fields: {sorted(unknown)}")
        if "command" not in data:
            raise ParseError("Batch line has no 'command'")
        return cls(**data)

    @classmethod
    def from_args(cls, args) -> "JobSpec":
        both_open = getattr(args, "open", False)
        return cls(
            command=args.command,
            poly=getattr(args, "poly", None),
            interval=getattr(args, "interval", None),
            a_open=both_open or getattr(args, "a_open", False),
            b_open=both_open or getattr(args, "b_open", False),
            eps=getattr(args, "eps", DEFAULT_EPS),
            backend=getattr(args, "backend", None),
            alpha=getattr(args, "alpha", None),
            seed=getattr(args, "seed", DEFAULT_SEED),
            degrees=getattr(args, "degrees", None),
            m=getattr(args, "m", 3),
            trials=getattr(args, "trials", None),
            mode=getattr(args, "mode", "solve"),
            family=getattr(args, "family", "random"),
            digits=getattr(args, "digits", None),
            max_degree=getattr(args, "max_degree", DEFAULT_VERIFY_MAX_DEGREE),
            radius=getattr(args, "radius", DEFAULT_BENCH_RADIUS),
            timings=getattr(args, "timings", False),
        )


def _count(job: JobSpec, config: AppConfig) -> Dict[str, Any]:
    backend = config.backend.build(job.backend)
    f = parse_poly(job.poly, backend)
    a, b = job.bounds
    q = CountQuery(backend.coerce(a), backend.coerce(b), job.a_open, job.b_open)
    return {"count": solve_closed_count(f, q, OpCounter(), backend)}


def _solve(job: JobSpec, config: AppConfig) -> Dict[str, Any]:
    backend = config.backend.build(job.backend)
    f = parse_poly(job.poly, backend)
    eps = parse_rational(job.eps)
    R = job.bounds[1]
    alpha = parse_rational(job.alpha) if job.alpha is not None else None
    ctr = OpCounter()
    solver = MnomialSolver(backend, **config.solver.solver_options())
    report = solver.solve(SolveRequest(f, backend.coerce(R), backend.coerce(eps), alpha), ctr)
    digits = job.digits if job.digits is not None else decimal_digits(eps)
    return {
        "all_reals": report.all_reals,
        "count": len(report),
        "roots": [format_decimal(backend.to_fraction(z), digits) for z in report.roots],
        "provenance": [str(e.provenance) for e in report.entries],
        "backend": backend.describe(),
        "ops": ctr.as_dict(),
    }


def _bench(job: JobSpec, config: AppConfig) -> Dict[str, Any]:
    degrees = job.degrees or DEFAULT_BENCH_DEGREES
    trials = job.trials or DEFAULT_BENCH_TRIALS
    if job.mode == "chains":
        return chain_length_stats(degrees, trials, job.seed).as_dict()
    # exact bignums grow with D; large-degree benchmarks default to floats
    backend = config.backend.build(job.backend or BACKEND_FLOAT)
    if job.mode == "count":
        report = bench_count(degrees, trials, job.seed, backend)
    elif job.mode == "hybrid":
        report = bench_hybrid(degrees, backend, job.radius, job.eps)
    else:
        report = bench_solve(
            degrees,
            job.m,
            trials,
            job.seed,
            backend,
            job.radius,
            job.eps,
            job.family,
            **config.solver.solver_options(),
        )
    data = report.as_dict(job.timings)
    data["backend"] = backend.describe()
    return data


def _blowup(job: JobSpec, config: AppConfig) -> Dict[str, Any]:
    degrees = job.degrees or DEFAULT_BLOWUP_DEGREES
    lengths = dict(tetranomial_chain_lengths(degrees))
    rows = []
    for D in degrees:
        row = tetranomial_blowup(D)
        rows.append(
            {
                "D": D,
                "p3_degree": row.p3_degree,
                "p3_terms": row.p3_terms,
                "p2_matches": row.p2_matches,
                "chain_length": lengths[D],
            }
        )
    return {"rows": rows}


def _verify(job: JobSpec, config: AppConfig) -> Dict[str, Any]:
    return verify_suite(
        job.trials or DEFAULT_VERIFY_TRIALS,
        job.max_degree,
        job.seed,
        job.eps,
        config.backend.build(job.backend),
    )


HANDLERS = {
    "count": _count,
    "solve": _solve,
    "bench": _bench,
    "blowup": _blowup,
    "verify": _verify,
}


def error_report(error: Exception) -> Tuple[int, Dict[str, Any]]:
    status = getattr(error, "exit_status", 4)
    return status, {"error": str(error), "error_type": type(error).__name__, "status": status}


def run(job: JobSpec, config: Optional[AppConfig] = None) -> Tuple[int, Dict[str, Any]]:
    """Execute ``job``; returns (exit status, report)."""
    config = config or ConfigValidator.from_env()
    start = time.perf_counter()
    try:
        report = HANDLERS[job.command](job, config)
    except FewnomialError as e:
        logger.error(f"{job.command} failed: {e}")
        return error_report(e)
    status = 0
    if job.command == "verify" and report["failed"]:
        status = 4
    if job.timings or config.timings:
        report["wall_time"] = round(time.perf_counter() - start, 6)
    return status, report
