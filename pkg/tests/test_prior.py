import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ridgexmse.checks import check_euler, check_prior_derivatives
from ridgexmse.errors import ConfigError, PoleError
from ridgexmse.prior import (WeightingParams, euler_exponent, grad_log_pi, hessian_log_pi, log_pi,
                             radial_factor)


def test_derivatives_match_finite_differences():
    assert check_prior_derivatives().passed


def test_euler_residual_vanishes():
    assert check_euler().passed


def test_euler_exponent_is_one():
    for n in range(1, 81):
        assert euler_exponent(n) == 1.0


def test_special_cases():
    theta = np.array([0.6, -0.8, 0.0])
    # C2 = 0: pi = r^(4-n); C1 = 0: pi = r^(-n)
    assert log_pi(theta * 2, WeightingParams(1, 0, 3)) == pytest.approx(math.log(2.0))
    assert log_pi(theta * 2, WeightingParams(0, 1, 3)) == pytest.approx(-3 * math.log(2.0))
    np.testing.assert_allclose(grad_log_pi(theta, WeightingParams(0, 1, 3)), -3 * theta)


def test_bracket_bound_when_signs_agree():
    n = 7
    for c1, c2 in ((1, 0), (0, 1), (2, 3)):
        p = WeightingParams(c1, c2, n)
        for r in np.geomspace(1e-3, 1e3, 50):
            assert abs(radial_factor(r, p)) <= n + 2


def test_pole_raises():
    p = WeightingParams(1.0, -4.0, 3)
    assert p.pole_radius == 2.0
    with pytest.raises(PoleError):
        log_pi(np.array([2.0, 0.0, 0.0]), p)
    with pytest.raises(PoleError):
        grad_log_pi(np.array([0.0, 2.0, 0.0]), p)


def test_delta_guards_the_origin():
    p = WeightingParams(0, 1, 2, delta=1e-3)
    assert np.isfinite(log_pi(np.zeros(2), p))
    assert log_pi(np.zeros(2), p) == log_pi(np.array([1e-3, 0.0]), p)


def test_params_validation():
    with pytest.raises(ConfigError):
        WeightingParams(0, 0, 3)
    with pytest.raises(ConfigError):
        WeightingParams(1, 0, 3, delta=0)


def test_large_n_does_not_overflow():
    p = WeightingParams(1, 1, 80)
    assert np.isfinite(log_pi(np.full(80, 1e-3), p))
    assert np.all(np.isfinite(hessian_log_pi(np.full(80, 10.0), p)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 10), st.floats(0.1, 3), st.floats(0.1, 3), st.floats(-5, 5).filter(lambda k: abs(k) > 1e-3),
       st.integers(0, 2**31))
def test_ratio_invariance(n, c1, c2, k, seed):
    theta = np.random.default_rng(seed).standard_normal(n) + 0.1
    p, q = WeightingParams(c1, c2, n), WeightingParams(c1, c2, n).scaled(k)
    d1 = log_pi(theta, q) - log_pi(theta, p)
    d2 = log_pi(2 * theta, q) - log_pi(2 * theta, p)
    assert d1 == pytest.approx(d2, abs=1e-10)
    assert d1 == pytest.approx(2 * math.log(abs(k)), abs=1e-10)
    np.testing.assert_allclose(grad_log_pi(theta, q), grad_log_pi(theta, p), rtol=1e-12)
    np.testing.assert_allclose(hessian_log_pi(theta, q), hessian_log_pi(theta, p), rtol=1e-12, atol=1e-14)


def test_hessian_is_symmetric(rng):
    p = WeightingParams(0.4, 1.3, 6)
    H = hessian_log_pi(rng.standard_normal(6), p)
    np.testing.assert_array_equal(H, H.T)
