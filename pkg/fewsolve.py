#!/usr/bin/env python3
"""
Sparse polynomial real-root engine (fewsolve.py)

This is the main entry point for the fewsolve toolkit: root counting, root
approximation, scaling benchmarks and oracle checks, all reporting JSON on stdout.
"""

import os
import sys
from datetime import datetime

# Third-party libraries - ensure these are in requirements.txt and installed
try:
    from dotenv import load_dotenv
except ImportError as e:
    print(
        f"Error: A required library is missing: {e}. "
        "Please install all dependencies from requirements.txt.",
        file=sys.stderr,
    )
    sys.exit(1)

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from src.cli import execute, parse_arguments  # noqa: E402
from src.config import VERSION  # noqa: E402
from src.config_validator import ConfigValidator, performance_metrics  # noqa: E402
from src.logger import log_error, log_step, logger  # noqa: E402


def main(argv=None) -> int:
    """Parse arguments, validate the environment and run the requested command."""
    # Load environment variables from .env file if it exists
    load_dotenv(override=True)
    start_datetime = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    log_step(f"FEWSOLVE v{VERSION}\nStarted at: {start_datetime}")

    args = parse_arguments(argv)

    try:
        ConfigValidator.validate_runtime_requirements()
    except RuntimeError as e:
        logger.error(f"Runtime validation failed: {e}")
        return 1

    status = execute(args)
    if args.verbose:
        performance_metrics.log_summary()
    return status


if __name__ == "__main__":
    try:
        sys.exit(main())

    except KeyboardInterrupt:
        log_error("Interrupted by user (Ctrl+C)")
        sys.exit(130)  # Standard exit code for SIGINT

    except Exception as e:
        log_error(f"Unexpected error occurred: {str(e)}")
        log_error(f"Error type: {type(e).__name__}")

        import traceback

        log_error("Full traceback:")
        for line in traceback.format_exc().split("\n"):
            if line.strip():
                log_error(f"  {line}")
        sys.exit(4)

    finally:
        sys.stdout.flush()
        sys.stderr.flush()
