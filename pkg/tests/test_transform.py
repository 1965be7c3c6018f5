"""Exact fibers, the pairing quadratures, and superlevel brackets."""

import numpy as np
import pytest

from momentray.lorentz import SimpleFunction
from momentray.sets import BoxUnionSet, Interval
from momentray.transform import (
    GridFunction,
    QuadSpec,
    adjointness_gap,
    apply_x,
    apply_x_star,
    bilinear_form,
    bilinear_form_dual,
    fiber_measure_batch,
    line_fiber,
    superlevel_set,
)

UNIT2 = BoxUnionSet([np.array([[0.0, 1.0], [0.0, 1.0]])])


def test_primal_fiber_hand_value():
    # x = (1, 0.5): need 0.5 + s in [0,1] and s in [0,1] -> s in [0, 0.5]
    fib = line_fiber(UNIT2, (1.0, 0.5), (0.0, 1.0))
    assert fib.measure == pytest.approx(0.5)
    assert fib.n_intervals == 1
    assert (fib.los[0], fib.his[0]) == (0.0, 0.5)


def test_primal_fiber_vertical_line():
    # x1 = 0: the j >= 2 constraints are constant, fiber is all of I
    fib = line_fiber(UNIT2, (0.0, 0.5), (0.0, 1.0))
    assert fib.measure == pytest.approx(1.0)
    empty = line_fiber(UNIT2, (0.0, 1.5), (0.0, 1.0))
    assert empty.is_empty


def test_dual_fiber_hand_value():
    # x = (1, 0.5): need t in [0,1] and 0.5 - t in [0,1] -> t in [0, 0.5]
    fib = line_fiber(UNIT2, (1.0, 0.5), (-1.0, 1.0), dual=True)
    assert fib.measure == pytest.approx(0.5)


def test_dual_fiber_even_power_components():
    # F3 = [-2,2] x [-1,1] x [0, 0.5], x = (1, 0, 1):
    # t in [-1,1] from the linear constraint, t^2 in [0.5, 1] from the
    # quadratic one -> |t| in [sqrt(0.5), 1], two symmetric components.
    F = BoxUnionSet([np.array([[-2.0, 2.0], [-1.0, 1.0], [0.0, 0.5]])])
    fib = line_fiber(F, (1.0, 0.0, 1.0), (-2.0, 2.0), dual=True)
    assert fib.n_intervals == 2
    assert fib.measure == pytest.approx(2.0 * (1.0 - np.sqrt(0.5)), rel=1e-12)


def test_fiber_measure_batch_matches_single():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.5, 1.5, size=(64, 2))
    batch = fiber_measure_batch(UNIT2, pts, (0.0, 1.0))
    singles = [line_fiber(UNIT2, p, (0.0, 1.0)).measure for p in pts]
    assert np.allclose(batch, singles, atol=1e-12)
    batch_dual = fiber_measure_batch(UNIT2, pts, (-1.0, 1.0), dual=True)
    singles_dual = [
        line_fiber(UNIT2, p, (-1.0, 1.0), dual=True).measure for p in pts
    ]
    assert np.allclose(batch_dual, singles_dual, atol=1e-12)


def test_fiber_dilation_covariance():
    """delta-scaling the set, point, and interval scales fibers by delta."""
    E = BoxUnionSet([np.array([[0.1, 0.9], [-0.4, 0.6], [0.0, 0.7]])])
    rng = np.random.default_rng(4)
    delta = 0.6
    exps = np.arange(1, 4)
    scaled = E.dilated_nonisotropic(delta)
    for _ in range(20):
        x = rng.uniform(-1.0, 1.0, 3)
        base = line_fiber(E, x, (-1.0, 1.0)).measure
        scaled_fiber = line_fiber(scaled, delta**exps * x, (-delta, delta))
        assert scaled_fiber.measure == pytest.approx(delta * base, rel=1e-12, abs=1e-15)


def test_unit_square_pairing_all_methods():
    for quad, tol in (
        (None, 1e-12),
        (QuadSpec(method="midpoint", step=1.0 / 2048.0), 1e-6),
        (QuadSpec(method="montecarlo", samples=200000, seed=1), 5e-3),
    ):
        val = bilinear_form(UNIT2, UNIT2, (0.0, 1.0), quad)
        assert val == pytest.approx(0.75, abs=tol)


def test_pairing_methods_agree_on_skew_pair():
    E = BoxUnionSet([np.array([[-0.3, 0.9], [-0.5, 0.6], [-0.4, 0.7]])])
    F = BoxUnionSet([np.array([[-0.8, 0.7], [-0.6, 0.3], [-0.2, 0.8]])])
    layered = bilinear_form(E, F, (-0.3, 0.9))
    midpoint = bilinear_form(E, F, (-0.3, 0.9), QuadSpec(method="midpoint", step=1.0 / 64.0))
    assert midpoint == pytest.approx(layered, rel=2e-3)


def test_adjointness_small_gap_and_coverage_errors():
    E = BoxUnionSet([np.array([[0.0, 1.0], [-0.5, 0.5]])])
    F = BoxUnionSet([np.array([[-0.5, 0.8], [0.0, 1.0]])])
    gap = adjointness_gap(E, F, (0.0, 1.0), (-0.5, 0.8))
    assert gap["rel_gap"] < 1e-5
    with pytest.raises(ValueError):
        adjointness_gap(E, F, (0.2, 1.0), (-0.5, 0.8))  # interval misses E
    with pytest.raises(ValueError):
        bilinear_form_dual(E, F, (0.0, 0.8))  # window misses F


def test_pairing_monotone_in_source():
    small = BoxUnionSet([np.array([[0.2, 0.8], [0.2, 0.8]])])
    assert bilinear_form(small, UNIT2, (0.0, 1.0)) < bilinear_form(
        UNIT2, UNIT2, (0.0, 1.0)
    )


def test_apply_x_scales_with_simple_function_weight():
    f = SimpleFunction([2.0], [UNIT2])
    pts = np.array([[1.0, 0.5], [0.0, 0.5], [0.5, 0.2]])
    doubled = apply_x(f, (0.0, 1.0), pts)
    plain = apply_x(UNIT2, (0.0, 1.0), pts)
    assert np.allclose(doubled, 2.0 * plain)
    assert plain[0] == pytest.approx(0.5)


def test_apply_x_star_window_requirement():
    g = SimpleFunction([1.0], [UNIT2])
    vals = apply_x_star(g, (0.0, 1.0), np.array([[1.0, 0.5]]))
    assert vals[0] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        apply_x_star(g, (0.2, 1.0), np.array([[1.0, 0.5]]))


def test_grid_function_evaluation():
    values = np.arange(12, dtype=float).reshape(3, 4)
    gf = GridFunction(origin=(0.0, 0.0), spacing=(1.0, 1.0), values=values)
    assert gf((1.0, 2.0)) == pytest.approx(values[1, 2])
    assert gf((0.5, 0.5)) == pytest.approx(np.mean(values[:2, :2]))


def test_superlevel_bracket_and_monotonicity():
    low = superlevel_set(UNIT2, UNIT2, (0.0, 1.0), theta=0.3, grid_n=32)
    high = superlevel_set(UNIT2, UNIT2, (0.0, 1.0), theta=0.7, grid_n=32)
    for res in (low, high):
        assert res.inner_measure <= res.center_measure <= res.outer_measure
    assert high.outer_measure <= low.outer_measure
    assert low.max_value <= 1.0 + 1e-12
    inner = low.inner_set()
    outer = low.outer_set()
    assert inner.measure == pytest.approx(low.inner_measure)
    assert outer.measure == pytest.approx(low.outer_measure)


def test_superlevel_inner_points_clear_threshold():
    res = superlevel_set(UNIT2, UNIT2, (0.0, 1.0), theta=0.5, grid_n=32)
    inner = res.inner_set()
    if inner.n_boxes:
        rng = np.random.default_rng(7)
        pts = rng.uniform(0.0, 1.0, size=(200, 2))
        keep = inner.contains_batch(pts)
        vals = apply_x(UNIT2, (0.0, 1.0), pts[keep])
        # grid corners+center clearing theta doesn't certify every interior
        # point, but values should sit near or above it
        assert vals.min() >= 0.5 - 0.05


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(method="simpson")
    with pytest.raises(ValueError):
        QuadSpec(step=0.0)
    with pytest.raises(ValueError):
        QuadSpec(samples=0)
