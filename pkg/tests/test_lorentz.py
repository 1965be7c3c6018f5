"""Simple functions, rearrangements, and the two-exponent norms."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentray.lorentz import (
    SimpleFunction,
    StepProfile,
    blockwise_lorentz_norm,
    distribution,
    lorentz_norm,
    lorentz_norm_from_steps,
    lp_norm,
    rearrangement,
)
from momentray.sets import BoxUnionSet


def _box(b):
    return BoxUnionSet([np.asarray(b, dtype=float)])


A = _box([[0.0, 1.0], [0.0, 2.0]])  # measure 2
B = _box([[3.0, 4.0], [0.0, 1.0]])  # measure 1
TWO_STEP = SimpleFunction([2.0, 1.0], [A, B])


def test_simple_function_evaluation():
    pts = np.array([[0.5, 1.0], [3.5, 0.5], [9.0, 9.0]])
    assert np.allclose(TWO_STEP(pts), [2.0, 1.0, 0.0])


def test_simple_function_rejects_overlapping_supports():
    with pytest.raises(ValueError):
        SimpleFunction([1.0, 1.0], [A, _box([[0.5, 1.5], [0.0, 1.0]])])


def test_distribution_hand_values():
    # {f > t}: t < 1 -> 3, 1 <= t < 2 -> 2, t >= 2 -> 0
    assert np.allclose(distribution(TWO_STEP, [0.5, 1.0, 1.5, 2.0]), [3.0, 2.0, 2.0, 0.0])


def test_rearrangement_profile():
    prof = rearrangement(TWO_STEP)
    assert prof.values == (2.0, 1.0)
    assert prof.measures == (2.0, 1.0)
    assert prof.rearrangement_at(0.5) == 2.0
    assert prof.rearrangement_at(2.5) == 1.0
    assert prof.rearrangement_at(3.5) == 0.0


def test_rearrangement_merges_equal_values():
    f = SimpleFunction([1.0, 1.0], [A, B])
    prof = rearrangement(f)
    assert prof.values == (1.0,)
    assert prof.measures == (3.0,)


def test_step_profile_requires_decreasing():
    with pytest.raises(ValueError):
        StepProfile((1.0, 2.0), (1.0, 1.0))


def test_lp_norm_hand_value():
    # (2^2 * 2 + 1^2 * 1)^(1/2) = 3
    assert lp_norm(TWO_STEP, 2.0) == pytest.approx(3.0)


def test_lorentz_equals_lp_at_equal_exponents():
    for p in (0.5, 1.0, 1.7, 3.0):
        assert lorentz_norm(TWO_STEP, p, p) == pytest.approx(
            lp_norm(TWO_STEP, p), rel=1e-12
        )


def test_indicator_closed_form():
    chi = SimpleFunction([1.0], [A])
    for s, r in ((1.5, 2.5), (2.0, 1.0), (3.0, 0.7)):
        want = (s / r) ** (1.0 / r) * A.measure ** (1.0 / s)
        assert lorentz_norm(chi, s, r) == pytest.approx(want, rel=1e-12)
    assert lorentz_norm(chi, 2.0, float("inf")) == pytest.approx(
        A.measure**0.5, rel=1e-12
    )


def test_weak_norm_is_sup_of_scaled_rearrangement():
    # r = inf: sup_t t^(1/s) f*(t) over the step profile
    got = lorentz_norm(TWO_STEP, 2.0, float("inf"))
    want = max(2.0 * 2.0**0.5, 1.0 * 3.0**0.5)
    assert got == pytest.approx(want, rel=1e-12)


def test_norm_scales_linearly_in_function_value():
    tripled = SimpleFunction([6.0, 3.0], [A, B])
    assert lorentz_norm(tripled, 1.3, 2.2) == pytest.approx(
        3.0 * lorentz_norm(TWO_STEP, 1.3, 2.2), rel=1e-12
    )


@given(
    st.lists(st.floats(0.1, 10.0), min_size=1, max_size=6),
    st.lists(st.floats(0.05, 3.0), min_size=6, max_size=6),
    st.floats(0.6, 3.0),
)
@settings(max_examples=60, deadline=None)
def test_steps_norm_matches_bruteforce_integral(weights, measures, p):
    """The closed-form sum equals a fine Riemann sum of (t^(1/s) f*)^r dt/t."""
    values = sorted(weights, reverse=True)
    measures = measures[: len(values)]
    norm = lorentz_norm_from_steps(values, measures, p, p)
    brute = sum(v**p * m for v, m in zip(values, measures)) ** (1.0 / p)
    assert norm == pytest.approx(brute, rel=1e-9)


def test_blockwise_aggregate_between_min_and_sum():
    values = [3.0, 2.0, 1.0]
    measures = [0.5, 1.0, 2.0]
    s, r = 1.5, 2.0
    scores = [
        lorentz_norm_from_steps([v], [m], s, r) for v, m in zip(values, measures)
    ]
    agg = blockwise_lorentz_norm(values, measures, s, r)
    assert max(scores) <= agg <= sum(scores) + 1e-12
    assert agg == pytest.approx(
        sum(sc**r for sc in scores) ** (1.0 / r), rel=1e-12
    )
