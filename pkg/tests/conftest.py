"""Shared fixtures: weight families used across the suite, hypothesis profile."""

import pytest
from hypothesis import HealthCheck, settings

from permcycles import WeightSequence

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# The reference families most tests cycle through.  Chosen to cover constant,
# rising-factorial, polynomially growing/decaying, and explicit-list weights.
FAMILIES = [
    ("uniform", WeightSequence.uniform()),
    ("ewens_half", WeightSequence.ewens(0.5)),
    ("ewens_2", WeightSequence.ewens(2.0)),
    ("poly_decay", WeightSequence.polynomial(1.0, -0.5)),
    ("poly_linear", WeightSequence.polynomial(1.0, 1.0)),
    ("explicit_tail", WeightSequence.explicit((0.5, 2.0, 1.0), tail="const")),
]


@pytest.fixture(params=FAMILIES, ids=[name for name, _ in FAMILIES])
def weight_family(request) -> WeightSequence:
    return request.param[1]
