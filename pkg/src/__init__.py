"""
fewsolve

Real-root counting and approximation for sparse ("fewnomial") polynomials.
"""

__version__ = "1.0.0"
__author__ = "fewsolve"
__description__ = "Sparse polynomial real-root engine"

# Import main components
from .config import VERSION
from .errors import (
    FewnomialError,
    InvalidRequest,
    InvariantViolation,
    ParseError,
    PrecisionExhausted,
)
from .hybrid_newton import Direction, HybridInput, alpha_bound, gamma, hybrid_solve
from .mnomial_solver import RootReport, SolveRequest, check_dampened, solve, solve_closed_count
from .op_counter import OpCounter
from .oracle import dense_sturm_count, expand, isolate_and_refine, tetranomial_blowup
from .scalar import AdaptiveFloat, ExactRational, backend_from_spec
from .sparse_poly import SparsePoly, evaluate, parse_poly
from .trinomial_sturm import CountQuery, build_trinomial_chain, count_roots
