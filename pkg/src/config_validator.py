"""
Configuration validation and management for fewsolve.
Provides type-safe configuration handling with comprehensive validation.
"""

import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict

from .config import (
    BACKEND_EXACT,
    DEFAULT_BATCH_WORKERS,
    DEFAULT_DAMPENED_MAX_DEGREE,
    DEFAULT_FLOAT_PRECISION,
    MAX_DENSE_DEGREE,
    MAX_FLOAT_PRECISION,
    MIN_FLOAT_PRECISION,
)
from .errors import InvalidRequest
from .logger import logger
from .scalar import ScalarBackend, backend_from_spec


@dataclass
class BackendConfig:
    """Scalar backend selection and float precision limits."""

    spec: str = BACKEND_EXACT
    float_precision: int = DEFAULT_FLOAT_PRECISION
    precision_cap: int = MAX_FLOAT_PRECISION

    def __post_init__(self):
        if not (MIN_FLOAT_PRECISION <= self.float_precision <= MAX_FLOAT_PRECISION):
            raise InvalidRequest(
                f"Float precision must be {MIN_FLOAT_PRECISION}-{MAX_FLOAT_PRECISION} bits, "
                f"got: {self.float_precision}"
            )
        if self.precision_cap < self.float_precision:
            raise InvalidRequest(
                f"Precision cap {self.precision_cap} is below the working precision "
                f"{self.float_precision}"
            )

    def build(self, spec: str = None) -> ScalarBackend:
        """Backend for ``spec`` (or the configured one) under these limits."""
        return backend_from_spec(spec or self.spec, self.precision_cap, self.float_precision)


@dataclass
class SolverConfig:
    """Solver switches."""

    dampened_max_degree: int = DEFAULT_DAMPENED_MAX_DEGREE
    strict_alpha: bool = False

    def __post_init__(self):
        if not (0 <= self.dampened_max_degree <= MAX_DENSE_DEGREE):
            raise InvalidRequest(
                f"Dampened check degree limit must be 0-{MAX_DENSE_DEGREE}, "
                f"got: {self.dampened_max_degree}"
            )

    def solver_options(self) -> Dict[str, Any]:
        return {
            "dampened_max_degree": self.dampened_max_degree,
            "strict_alpha": self.strict_alpha,
        }


@dataclass
class BatchConfig:
    """Batch fan-out configuration."""

    workers: int = DEFAULT_BATCH_WORKERS

    def __post_init__(self):
        if not (1 <= self.workers <= 64):
            raise InvalidRequest(f"Batch workers must be 1-64, got: {self.workers}")


@dataclass
class AppConfig:
    """Main application configuration."""

    backend: BackendConfig = field(default_factory=BackendConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    batch: BatchConfig = field(default_factory=BatchConfig)
    timings: bool = False


class ConfigValidator:
    """Configuration validator and loader."""

    @staticmethod
    def _get_env_bool(key: str, default: bool = False) -> bool:
        """Get boolean value from environment variable."""
        value = os.environ.get(key)
        if value is None:
            return default
        return value.lower() in ("true", "yes", "1", "on")

    @staticmethod
    def _get_env_int(key: str, default: int, min_val: int = None, max_val: int = None) -> int:
        """Get integer value from environment variable with validation."""
        raw = os.environ.get(key, str(default))
        try:
            value = int(raw)
        except ValueError:
            raise InvalidRequest(f"Invalid integer value for {key}: {raw}")
        if min_val is not None and value < min_val:
            raise InvalidRequest(f"{key} must be >= {min_val}, got: {value}")
        if max_val is not None and value > max_val:
            raise InvalidRequest(f"{key} must be <= {max_val}, got: {value}")
        return value

    @classmethod
    def from_env(cls) -> AppConfig:
        """Configuration from the environment alone (library and batch use)."""
        precision = cls._get_env_int(
            "FEWSOLVE_FLOAT_PRECISION",
            DEFAULT_FLOAT_PRECISION,
            MIN_FLOAT_PRECISION,
            MAX_FLOAT_PRECISION,
        )
        cap = cls._get_env_int(
            "FEWSOLVE_PRECISION_CAP", MAX_FLOAT_PRECISION, MIN_FLOAT_PRECISION, 1 << 20
        )
        return AppConfig(
            backend=BackendConfig(float_precision=precision, precision_cap=max(cap, precision)),
            solver=SolverConfig(
                dampened_max_degree=cls._get_env_int(
                    "FEWSOLVE_DAMPENED_MAX_DEGREE", DEFAULT_DAMPENED_MAX_DEGREE, 0, MAX_DENSE_DEGREE
                ),
                strict_alpha=cls._get_env_bool("FEWSOLVE_STRICT_ALPHA"),
            ),
            batch=BatchConfig(
                workers=cls._get_env_int("FEWSOLVE_BATCH_WORKERS", DEFAULT_BATCH_WORKERS, 1, 64)
            ),
        )

    @classmethod
    def from_args_and_env(cls, args) -> AppConfig:
        """Create configuration from command line arguments and environment variables."""
        config = cls.from_env()
        backend = getattr(args, "backend", None)
        if backend:
            config.backend = BackendConfig(
                spec=backend,
                float_precision=config.backend.float_precision,
                precision_cap=config.backend.precision_cap,
            )
            # surfaces a malformed backend before any job runs
            config.backend.build()
        workers = getattr(args, "workers", None)
        if workers is not None:
            config.batch = BatchConfig(workers=workers)
        if getattr(args, "strict_alpha", False):
            config.solver.strict_alpha = True
        config.timings = bool(getattr(args, "timings", False))
        return config

    @staticmethod
    def validate_runtime_requirements():
        """Validate runtime requirements and dependencies."""
        errors = []
        try:
            import mpmath  # noqa: F401
            import sympy  # noqa: F401
        except ImportError as e:
            errors.append(f"Missing Python dependency: {e}")

        if errors:
            raise RuntimeError(
                "Runtime validation failed:\n" + "\n".join(f"- {error}" for error in errors)
            )

        logger.debug("Runtime requirements validated successfully")


# Performance monitoring utilities
class PerformanceMetrics:
    """Wall-time collection for reports requested with --timings."""

    def __init__(self):
        self.metrics: Dict[str, Dict[str, Any]] = {}
        self.start_times: Dict[str, float] = {}

    def start_operation(self, operation: str):
        """Start timing an operation."""
        self.start_times[operation] = time.perf_counter()

    def end_operation(self, operation: str, **metadata) -> float:
        """End timing an operation, record metrics and return the duration."""
        if operation not in self.start_times:
            logger.warning(f"No start time recorded for operation: {operation}")
            return 0.0

        duration = time.perf_counter() - self.start_times.pop(operation)
        self.metrics[operation] = {"duration": duration, **metadata}
        return duration

    def get_summary(self) -> Dict[str, Any]:
        """Get performance summary."""
        total_time = sum(m["duration"] for m in self.metrics.values())
        return {
            "total_duration": total_time,
            "operations": len(self.metrics),
            "breakdown": {op: m["duration"] for op, m in self.metrics.items()},
        }

    def log_summary(self):
        """Log performance summary."""
        summary = self.get_summary()
        logger.info("=== PERFORMANCE SUMMARY ===")
        logger.info(f"Total Duration: {summary['total_duration']:.2f}s")
        logger.info(f"Operations: {summary['operations']}")

        for operation, duration in summary["breakdown"].items():
            percentage = (
                (duration / summary["total_duration"]) * 100 if summary["total_duration"] > 0 else 0
            )
            logger.info(f"  {operation}: {duration:.2f}s ({percentage:.1f}%)")


# Global performance metrics instance
performance_metrics = PerformanceMetrics()
