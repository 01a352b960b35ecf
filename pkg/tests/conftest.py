import os
from fractions import Fraction

import hypothesis
import pytest

from src.op_counter import OpCounter
from src.scalar import AdaptiveFloat, ExactRational
from src.sparse_poly import SparsePoly

hypothesis.settings.register_profile("default", deadline=None, max_examples=50)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=5)
hypothesis.settings.register_profile("thorough", deadline=None, max_examples=500)
hypothesis.settings.register_profile("debugger", deadline=None, report_multiple_bugs=False)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def exact():
    return ExactRational()


@pytest.fixture
def adaptive():
    return AdaptiveFloat(128)


@pytest.fixture
def ctr():
    return OpCounter()


def poly(*pairs):
    """SparsePoly from (coeff, exp) pairs with Fraction coefficients."""
    return SparsePoly.from_terms((Fraction(c), a) for c, a in pairs)
