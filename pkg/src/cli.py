"""
Command-line argument parsing and dispatch for fewsolve.
"""

import argparse
import json
import os
import sys

from .config import (
    DEFAULT_EPS,
    DEFAULT_SEED,
    DEFAULT_VERIFY_MAX_DEGREE,
)
from .config_validator import ConfigValidator, performance_metrics
from .errors import FewnomialError
from .jobs import JobSpec, error_report, run
from .logger import format_time, log_step, logger, set_verbosity
from .processor import run_batch


def _get_env_bool(key: str) -> bool:
    """Get boolean value from environment variable."""
    return os.environ.get(key, "").lower() in ("true", "yes", "1")


def _add_interval_options(parser):
    group = parser.add_argument_group("Interval")
    group.add_argument(
        "--interval",
        required=True,
        help="Endpoints 'a,b', e.g. 0,3 or -1,1",
    )
    group.add_argument("--open", action="store_true", help="Exclude both endpoints")
    group.add_argument("--a-open", action="store_true", help="Exclude the left endpoint")
    group.add_argument("--b-open", action="store_true", help="Exclude the right endpoint")


def _add_common_options(parser):
    group = parser.add_argument_group("Arithmetic")
    group.add_argument(
        "--backend",
        default=os.environ.get("FEWSOLVE_BACKEND"),
        help="'exact' or 'float[:BITS]' (env: FEWSOLVE_BACKEND, default: exact; bench: float)",
    )
    group.add_argument("--eps", default=DEFAULT_EPS, help=f"Accuracy (default: {DEFAULT_EPS})")
    # SUPPRESS keeps the top-level values when the flags are not repeated here
    group.add_argument(
        "--timings", action="store_true", default=argparse.SUPPRESS, help="Include wall time"
    )
    group.add_argument(
        "-v", "--verbose", action="count", default=argparse.SUPPRESS, help="More logging"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fewsolve",
        description="Count and approximate real roots of sparse polynomials.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Polynomials are written as 'coeff,exp;coeff,exp;...', e.g. '1,0;-3,37;1,100'
for 1 - 3x^37 + x^100. Reports are JSON on stdout; logs go to stderr.

Environment Variables:
  FEWSOLVE_BACKEND              Default scalar backend (exact, float, float:BITS)
  FEWSOLVE_FLOAT_PRECISION      Default float precision in bits (53-8192, default: 128)
  FEWSOLVE_PRECISION_CAP        Sign certification escalation cap (default: 8192)
  FEWSOLVE_BATCH_WORKERS        Parallel batch workers (1-64, default: 4)
  FEWSOLVE_DAMPENED_MAX_DEGREE  Degree limit for explicit dampening checks (default: 256)
  FEWSOLVE_STRICT_ALPHA         Refuse unproven alpha bounds for m >= 4 (true/false)
  FEWSOLVE_LOG_LEVEL            Logging level (default: WARNING)
  FEWSOLVE_LOG_FILE             Also log to this file

Exit Status:
  0 success, 2 invalid input, 3 precision exhausted, 4 internal error

Examples:
  # Count roots of 2x^2 - 3x + 1 in (0, 3)
  python fewsolve.py count --poly "1,0;-3,1;2,2" --interval 0,3 --open

  # Approximate all roots of 1 - 3x^37 + x^100 in [0, 2]
  python fewsolve.py solve --poly "1,0;-3,37;1,100" --interval 0,2 --eps 1e-9

  # Scaling benchmark on trinomials
  python fewsolve.py bench --degrees 1024,4096,16384,65536 --m 3 --trials 20 --seed 7

  # JSON-lines batch
  python fewsolve.py --batch jobs.jsonl
        """,
    )
    parser.add_argument("--batch", metavar="FILE", help="Run JSON-lines jobs from FILE")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Batch workers (env: FEWSOLVE_BATCH_WORKERS, default: 4)",
    )
    parser.add_argument(
        "--strict-alpha",
        action="store_true",
        default=_get_env_bool("FEWSOLVE_STRICT_ALPHA"),
        help="Fail instead of using an unproven alpha bound (env: FEWSOLVE_STRICT_ALPHA)",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging on stderr")
    parser.add_argument("--timings", action="store_true", help="Include wall time in reports")

    sub = parser.add_subparsers(dest="command")

    count = sub.add_parser("count", help="Exact number of distinct roots in an interval")
    count.add_argument("--poly", required=True, help="Polynomial text")
    _add_interval_options(count)
    _add_common_options(count)

    solve = sub.add_parser("solve", help="Approximate every distinct root in [0, R]")
    solve.add_argument("--poly", required=True, help="Polynomial text")
    _add_interval_options(solve)
    _add_common_options(solve)
    solve.add_argument("--alpha", help="Override the alpha bound used by HYBRID")
    solve.add_argument("--digits", type=int, help="Decimal places (default: ceil(-log10 eps)+2)")

    bench = sub.add_parser("bench", help="Operation-count scaling benchmarks")
    bench.add_argument("--degrees", help="Comma-separated degrees")
    bench.add_argument("--m", type=int, default=3, help="Terms per random polynomial (default: 3)")
    bench.add_argument("--trials", type=int, help="Polynomials per degree")
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    bench.add_argument(
        "--mode",
        choices=["solve", "count", "hybrid", "chains"],
        default="solve",
        help="What to measure (default: solve)",
    )
    bench.add_argument("--radius", default="2", help="R for solve and hybrid modes (default: 2)")
    bench.add_argument(
        "--family",
        choices=["random", "fixed"],
        default="random",
        help="Solve-mode inputs: random m-nomials or 1 - 3x^(D//2+1) + x^D (default: random)",
    )
    _add_common_options(bench)

    verify = sub.add_parser("verify", help="Oracle-equivalence suite on random fewnomials")
    verify.add_argument("--trials", type=int, help="Random cases (default: 100)")
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    verify.add_argument(
        "--max-degree",
        type=int,
        default=DEFAULT_VERIFY_MAX_DEGREE,
        help=f"Largest random degree (default: {DEFAULT_VERIFY_MAX_DEGREE})",
    )
    _add_common_options(verify)

    blowup = sub.add_parser("blowup", help="Sturm chain growth of x^2D + x^(D+1) + x^D + 1")
    blowup.add_argument("--degrees", help="Comma-separated D values (default: 3,4,5,10,20)")
    _add_common_options(blowup)
    return parser


# options whose values may start with "-" (negative endpoints, leading negative coefficients)
VALUE_OPTIONS = ("--poly", "--interval", "--eps", "--alpha", "--radius", "--backend")


def join_option_values(argv):
    """Rewrite '--poly -1,1' as '--poly=-1,1' so argparse does not read the value as a flag."""
    joined = []
    tokens = iter(argv)
    for token in tokens:
        if token in VALUE_OPTIONS:
            value = next(tokens, None)
            if value is None:
                joined.append(token)
            elif value.startswith("-") and value not in VALUE_OPTIONS:
                joined.append(f"{token}={value}")
            else:
                joined.extend((token, value))
            continue
        joined.append(token)
    return joined


def parse_arguments(argv=None):
    """Parse command-line arguments with enhanced validation."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(join_option_values(argv))
    if not args.batch and not args.command:
        parser.error("a command or --batch FILE is required")
    return args


def emit(report) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def execute(args) -> int:
    """Run the parsed invocation, write JSON reports to stdout and return the exit status."""
    set_verbosity(args.verbose)
    try:
        config = ConfigValidator.from_args_and_env(args)
    except FewnomialError as e:
        logger.error(f"Configuration validation failed: {e}")
        status, report = error_report(e)
        emit(report)
        return status

    logger.info("CONFIGURATION:")
    logger.info(
        f"Backend: {config.backend.spec} (float precision {config.backend.float_precision}, "
        f"cap {config.backend.precision_cap})"
    )
    logger.info(f"Solver: {config.solver.solver_options()}")
    if args.batch:
        logger.info(f"Workers: {config.batch.workers}")
    performance_metrics.start_operation("total_execution")
    if args.batch:
        log_step(f"BATCH {args.batch}")
        status, reports = run_batch(args.batch, config)
        for report in reports:
            emit(report)
    else:
        log_step(args.command.upper())
        try:
            job = JobSpec.from_args(args)
        except FewnomialError as e:
            status, report = error_report(e)
        else:
            status, report = run(job, config)
        emit(report)
    duration = performance_metrics.end_operation("total_execution")
    logger.info(f"Finished in {format_time(duration)} with status {status}")
    return status
