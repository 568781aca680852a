"""Weight sequences, the grammar, and normalization constants."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FAMILIES
from permcycles import (
    DegenerateModelError,
    LogWeight,
    WeightSequence,
    WeightSpecError,
    enumerate_h,
    norm_constants,
    parse_weights,
    stability_diagnostic,
)


# ---------------------------------------------------------------- sequences


def test_theta_values():
    assert WeightSequence.uniform().theta(7) == 1.0
    assert WeightSequence.ewens(2.0).theta(3) == 2.0
    assert WeightSequence.polynomial(1.0, -1.0).theta(4) == 0.25
    assert WeightSequence.polynomial(2.0, 0.5).theta(9) == pytest.approx(6.0)


def test_explicit_tails():
    w = WeightSequence.explicit((0.5, 2.0), tail="const")
    assert w.theta(1) == 0.5
    assert w.theta(2) == 2.0
    assert w.theta(50) == 2.0  # constant continuation of the last entry
    z = WeightSequence.explicit((0.5, 2.0), tail="zero")
    assert z.theta(2) == 2.0
    assert z.theta(3) == 0.0


def test_theta_rejects_bad_index():
    with pytest.raises(ValueError):
        WeightSequence.uniform().theta(0)
    with pytest.raises(ValueError):
        WeightSequence.ewens(1.0).theta(-3)


def test_negative_weights_rejected():
    with pytest.raises(ValueError):
        WeightSequence.ewens(-1.0)
    with pytest.raises(ValueError):
        WeightSequence.explicit((1.0, -0.5))
    with pytest.raises(ValueError):
        WeightSequence.polynomial(-2.0, 1.0)


@given(st.integers(min_value=1, max_value=200))
def test_uniform_ewens1_poly0_coincide(k):
    # Three spellings of the same model: theta_k = 1 for all k.
    assert WeightSequence.uniform().theta(k) == 1.0
    assert WeightSequence.ewens(1.0).theta(k) == 1.0
    assert WeightSequence.polynomial(1.0, 0.0).theta(k) == 1.0


def test_log_theta_array_matches_scalar():
    for _, ws in FAMILIES:
        arr = ws.log_theta_array(12)
        assert arr.shape == (13,)
        assert arr[0] == -np.inf
        for k in range(1, 13):
            t = ws.theta(k)
            if t == 0.0:
                assert arr[k] == -np.inf
            else:
                assert arr[k] == pytest.approx(math.log(t), rel=1e-14)


# ------------------------------------------------------------------ grammar


@pytest.mark.parametrize(
    "text,expect",
    [
        ("uniform", WeightSequence.uniform()),
        ("ewens:2", WeightSequence.ewens(2.0)),
        ("EWENS:0.5", WeightSequence.ewens(0.5)),
        ("poly:1,-0.5", WeightSequence.polynomial(1.0, -0.5)),
        ("  poly: 2 , 1 ", WeightSequence.polynomial(2.0, 1.0)),
        ("list:0.5,2,1", WeightSequence.explicit((0.5, 2.0, 1.0), tail="const")),
        ("list:0.5,2;tail=zero", WeightSequence.explicit((0.5, 2.0), tail="zero")),
        ("List:1,1 ; TAIL=CONST", WeightSequence.explicit((1.0, 1.0), tail="const")),
    ],
)
def test_parse_weights(text, expect):
    assert parse_weights(text) == expect


def test_spec_string_round_trip():
    for _, ws in FAMILIES:
        assert parse_weights(ws.spec_string()) == ws


@pytest.mark.parametrize(
    "text,token",
    [
        ("gamma:2", "gamma"),
        ("ewens", "ewens"),
        ("ewens:abc", "abc"),
        ("poly:1", "'1'"),
        ("poly:1,2,3", "1,2,3"),
        ("list:", "no values"),
        ("list:1,x", "'x'"),
        ("list:1,2;tail=linear", "linear"),
        ("ewens:-2", "-2"),
    ],
)
def test_parse_weights_errors_name_the_token(text, token):
    with pytest.raises(WeightSpecError) as err:
        parse_weights(text)
    assert token in str(err.value)


# ---------------------------------------------------------------- LogWeight


def test_log_weight_basics():
    assert LogWeight.from_value(0.0).log_value == -math.inf
    assert LogWeight.from_value(0.0).value == 0.0
    assert LogWeight.from_value(1.0).log_value == 0.0
    prod = LogWeight.from_value(2.0) * LogWeight.from_value(8.0)
    assert prod.value == pytest.approx(16.0, rel=1e-15)
    with pytest.raises(ValueError):
        LogWeight.from_value(-1.0)


@given(
    st.floats(min_value=1e-300, max_value=1e300, allow_nan=False, allow_infinity=False)
)
def test_log_weight_round_trip(x):
    # exp(log(x)) in float64 is exact only to ~0.5 ulp of |log x| * x; across
    # [1e-300, 1e300] the measured worst case is ~5.7e-14 relative, so the
    # bound below is the representation limit, not an implementation gap.
    assert LogWeight.from_value(x).value == pytest.approx(x, rel=1e-13)


# ---------------------------------------------- normalization constants h_n


def test_uniform_h_is_one():
    table = norm_constants(WeightSequence.uniform(), 50)
    for n in range(51):
        assert table.h(n) == pytest.approx(1.0, rel=1e-12)


def test_ewens_h_is_rising_factorial_over_factorial():
    # For constant weight theta the constants have the closed form
    # h_n = theta (theta+1) ... (theta+n-1) / n!.
    for theta in (0.5, 2.0, 3.7):
        table = norm_constants(WeightSequence.ewens(theta), 300)
        for n in (1, 2, 5, 17, 120, 300):
            expected = math.lgamma(theta + n) - math.lgamma(theta) - math.lgamma(n + 1)
            got = table.log_weight(n).log_value
            assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_frozen_small_constants():
    # ewens(2), n=2: cycle-weight products are 4 (identity) and 2, /2! -> 3.
    assert norm_constants(WeightSequence.ewens(2.0), 2).h(2) == pytest.approx(3.0, rel=1e-12)
    # theta_k = k at n=3: the six permutations weigh 1,2,2,2,3,3 -> 13/6.
    assert norm_constants(WeightSequence.polynomial(1.0, 1.0), 3).h(3) == pytest.approx(
        13.0 / 6.0, rel=1e-12
    )
    # fixed points forbidden, theta_2 = 1: only the transposition survives at n=2.
    assert norm_constants(WeightSequence.explicit((0.0, 1.0)), 2).h(2) == pytest.approx(
        0.5, rel=1e-12
    )


def test_h_matches_enumeration(weight_family):
    table = norm_constants(weight_family, 8)
    for n in range(9):
        exact = enumerate_h(weight_family, n)
        assert table.h(n) == pytest.approx(exact, rel=1e-10)


@given(
    st.sampled_from([ws for _, ws in FAMILIES]),
    st.integers(min_value=1, max_value=60),
)
def test_recurrence_residual(ws, n):
    # n h_n = sum_k theta_k h_{n-k} must hold to near machine precision.
    table = norm_constants(ws, n)
    total = math.fsum(ws.theta(k) * table.h(n - k) for k in range(1, n + 1))
    assert total == pytest.approx(n * table.h(n), rel=1e-12)


def test_norm_constants_rejects_negative_n():
    with pytest.raises(ValueError):
        norm_constants(WeightSequence.uniform(), -1)


def test_table_h_out_of_range():
    table = norm_constants(WeightSequence.uniform(), 5)
    with pytest.raises(ValueError):
        table.h(6)
    with pytest.raises(ValueError):
        table.h(-1)


# ---------------------------------------------------------------- stability


def test_stability_uniform_ratios_are_one():
    diag = stability_diagnostic(norm_constants(WeightSequence.uniform(), 40))
    assert diag.shape == (40,)
    assert np.allclose(diag, 1.0, atol=1e-12)


def test_stability_ewens_ratio_formula():
    # h_n / h_{n-1} = (theta + n - 1) / n for constant weights, so the ratio
    # h_{n-1} / h_n drifts back to 1 like theta/n.
    theta = 2.0
    diag = stability_diagnostic(norm_constants(WeightSequence.ewens(theta), 100))
    assert diag[-1] == pytest.approx(100.0 / (theta + 99.0), rel=1e-12)
    assert abs(diag[-1] - 1.0) < 0.05


def test_degenerate_model_signals():
    # theta_1 = theta_2 = 0 leaves nothing to build permutations of size 2 from.
    with pytest.raises(DegenerateModelError):
        stability_diagnostic(norm_constants(WeightSequence.explicit((0.0, 0.0, 3.0)), 2))
    # an all-zero weight sequence kills every h_n
    with pytest.raises(DegenerateModelError):
        stability_diagnostic(norm_constants(WeightSequence.explicit((0.0,), tail="zero"), 4))
