"""Line maps, iterated incidence maps, and determinant identities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentray.geometry import (
    closed_form_degree,
    estimate_c_d,
    gamma,
    gamma_star,
    incidence_path,
    jacobian_closed_form,
    jacobian_numeric,
    phi_map,
    psi_map,
    psi_map_closed,
    sample_incidence_params,
    split_params,
)

coord = st.floats(-3.0, 3.0, allow_nan=False)


def test_gamma_hand_value():
    # x = (1, 2), s = 3: first coordinate becomes s, second 2 + 3*1 = 5
    assert np.allclose(gamma((1.0, 2.0), 3.0), [3.0, 5.0])


def test_gamma_star_hand_value():
    # x = (1, 5), t = 2: (t, 5 - 1*2) = (2, 3)
    assert np.allclose(gamma_star((1.0, 5.0), 2.0), [2.0, 3.0])


def test_gamma_three_dimensional():
    # powers of x1 appear: (s, x2 + s*x1, x3 + s*x1^2)
    out = gamma((2.0, 1.0, -1.0), 0.5)
    assert np.allclose(out, [0.5, 1.0 + 0.5 * 2.0, -1.0 + 0.5 * 4.0])


def test_phi_psi_hand_values():
    assert np.allclose(phi_map((1.0, 0.0), (2.0, 3.0)), [3.0, 4.0])
    assert np.allclose(psi_map((1.0, 0.0), (2.0, 3.0)), [3.0, -4.0])


@given(st.lists(coord, min_size=2, max_size=5), coord)
def test_gamma_star_inverts_gamma_at_base_slope(coords, s):
    """Following the line out and back with matched parameters returns x."""
    x = np.asarray(coords)
    y = gamma(x, s)
    back = gamma_star(y, x[0])
    assert np.allclose(back, np.concatenate([[x[0]], x[1:]]), atol=1e-9)


@given(st.lists(coord, min_size=2, max_size=5), coord)
def test_gamma_inverts_gamma_star(coords, t):
    x = np.asarray(coords)
    y = gamma_star(x, t)
    back = gamma(y, x[0])
    assert np.allclose(back, x, atol=1e-9)


def test_incidence_path_lengths():
    path = incidence_path((0.5, 0.2, -0.1), (1.0, 2.0, 3.0), start="dual")
    assert len(path) == 3  # one visited point per applied parameter
    assert path[-1].shape == (3,)


def test_psi_closed_form_matches_recursion():
    rng = np.random.default_rng(3)
    for d in (2, 3, 4, 5):
        base = rng.uniform(-1, 1, d)
        params = rng.uniform(-1, 1, d)
        rec = psi_map(base, params)
        closed = psi_map_closed(base, params)
        assert np.allclose(rec, closed, atol=1e-10)


def test_split_params_interleaving():
    t, s = split_params("phi", 0.7, [1.0, 2.0, 3.0, 4.0])
    assert np.allclose(t, [1.0, 3.0])
    assert np.allclose(s, [0.7, 2.0, 4.0])
    t, s = split_params("psi", 0.7, [1.0, 2.0, 3.0, 4.0])
    assert np.allclose(t, [0.7, 2.0, 4.0])
    assert np.allclose(s, [1.0, 3.0])


def test_closed_form_degree():
    assert [closed_form_degree(d) for d in (2, 3, 4, 5)] == [1, 3, 6, 10]


def test_jacobian_closed_form_d2_hand():
    # phi factored form is (s1 - s0)(s1 - t1); psi is (t2 - t1)(t2 - s1)
    assert jacobian_closed_form("phi", 0.0, [2.0, 3.0]) == pytest.approx(3.0)
    assert jacobian_closed_form("psi", 1.0, [2.0, 3.0]) == pytest.approx(2.0)


def test_jacobian_numeric_matches_d2_hand():
    # base (1, 0), params (t1, s1) = (2, 3): determinant -(3-1)(3-2) = -2
    val = jacobian_numeric("phi", (1.0, 0.0), (2.0, 3.0))
    assert val == pytest.approx(-2.0, abs=1e-7)
    val = jacobian_numeric("psi", (1.0, 0.0), (2.0, 3.0))
    assert val == pytest.approx(2.0, abs=1e-7)


@given(st.integers(2, 5), st.floats(1.2, 3.0))
@settings(max_examples=20, deadline=None)
def test_closed_form_scales_with_degree(d, scale):
    """Scaling all parameters multiplies the factored form by lam^degree."""
    rng = np.random.default_rng(d)
    base, params = sample_incidence_params("phi", d, rng)
    v1 = jacobian_closed_form("phi", base[0] * scale, params * scale)
    v0 = jacobian_closed_form("phi", base[0], params)
    assert v1 == pytest.approx(scale ** closed_form_degree(d) * v0, rel=1e-9)


def test_closed_form_vanishing_factor():
    """Repeating a chain value kills the factored determinant."""
    # phi in d=3: params (t1, s1, t2); t1 == t2 repeats a t-chain entry
    assert jacobian_closed_form("phi", 0.3, [0.8, -0.4, 0.8]) == 0.0


def test_numeric_jacobian_rejects_inconsistent_steps():
    with pytest.raises(ValueError):
        jacobian_numeric("phi", (1.0, 0.0), (2.0, 3.0), match_tol=1e-16)


def test_sampler_respects_separation():
    rng = np.random.default_rng(0)
    for _ in range(20):
        base, params = sample_incidence_params("psi", 4, rng, min_sep=1e-2)
        t, s = split_params("psi", base[0], params)
        for chain in (t, s):
            diffs = np.abs(np.subtract.outer(chain, chain))
            off = diffs[~np.eye(len(chain), dtype=bool)]
            assert off.min() >= 1e-2


def test_estimate_c_d_constant_and_signs():
    for kind, d, sign in (("phi", 2, -1.0), ("psi", 2, 1.0), ("phi", 3, -1.0)):
        est = estimate_c_d(kind, d, samples=30, seed=1)
        assert est.rel_dispersion < 1e-8
        assert est.mean == pytest.approx(sign, abs=1e-8)
