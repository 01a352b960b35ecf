"""
Configuration constants and settings for fewsolve.
"""

# Version information
VERSION = "1.0.0"

# Scalar backends
BACKEND_EXACT = "exact"
BACKEND_FLOAT = "float"
DEFAULT_FLOAT_PRECISION = 128  # bits
MIN_FLOAT_PRECISION = 53
MAX_FLOAT_PRECISION = 8192  # escalation cap for sign certification

# Dense oracle limits
MAX_DENSE_DEGREE = 4096

# Solver defaults
DEFAULT_EPS = "1e-9"
DEFAULT_DAMPENED_MAX_DEGREE = 256

# Working precision (bits) for diagnostics computed outside the backends
GAMMA_PRECISION = 160
ORBIT_PRECISION = 256

# Extra bits kept when rounding exact iterates and grid points
QUANTIZE_GUARD_BITS = 40

# Batch and bench defaults
DEFAULT_BATCH_WORKERS = 4
DEFAULT_BENCH_DEGREES = [1024, 4096, 16384, 65536]
DEFAULT_BENCH_TRIALS = 10
DEFAULT_BENCH_RADIUS = "2"
DEFAULT_VERIFY_TRIALS = 100
DEFAULT_VERIFY_MAX_DEGREE = 64
DEFAULT_SEED = 7

# Random test polynomial coefficients are drawn from {-10..10} \ {0}
COEFF_RANGE = 10
