import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_roughness.quadrature import (
    QuadratureError,
    QuadratureResult,
    first_derivative,
    integrate_interval,
    integrate_nested,
    integrate_nested_many,
    integrate_semi_infinite,
    integrate_triangle,
    second_derivative,
)

ZETA3 = sum(1.0 / n ** 3 for n in range(1, 200000)) + 1.0 / (2 * 200000.0 ** 2)


def test_exponential():
    res = integrate_semi_infinite(lambda k: np.exp(-2 * k), rel_tol=1e-10)
    assert res.value == pytest.approx(0.5, rel=1e-12)
    assert res.abs_error_estimate >= 0
    assert res.evaluations >= 1


def test_bose_moment_matches_series():
    # sum_n 6/(2n)^4 = (3/8) zeta(4) = pi^4/240
    series = sum(6.0 / (2 * n) ** 4 for n in range(1, 10000))
    res = integrate_semi_infinite(lambda k: k ** 3 * np.exp(-2 * k) / -np.expm1(-2 * k), 1e-10)
    assert res.value == pytest.approx(series, rel=1e-10)
    assert res.value == pytest.approx(math.pi ** 4 / 240, rel=1e-10)


def test_log_moment_matches_series():
    res = integrate_semi_infinite(lambda k: k * np.log(-np.expm1(-2 * k)), 1e-10)
    assert res.value == pytest.approx(-ZETA3 / 4, rel=1e-9)


@pytest.mark.parametrize("f, expected", [
    (lambda K, W: np.exp(-2 * K) + 0 * W, 0.25),
    (lambda K, W: np.exp(-K - W), 0.5),
    (lambda K, W: K * np.exp(-2 * K) + 0 * W, 0.25),
])
def test_triangle_examples(f, expected):
    res = integrate_triangle(f, 1e-8)
    assert res.value == pytest.approx(expected, rel=1e-8)
    # iterated 1-D route
    def inner(K):
        K = np.asarray(K, dtype=float)
        out = [integrate_interval(lambda w: f(k + 0 * w, w), 0.0, k, 1e-10).value
               if k > 0 else 0.0 for k in K.ravel()]
        return np.reshape(out, K.shape)
    iterated = integrate_semi_infinite(inner, 1e-8)
    assert res.value == pytest.approx(iterated.value,
                                      abs=res.abs_error_estimate + iterated.abs_error_estimate
                                      + 1e-12)


def test_nested_many_matches_single():
    params = np.array([0.5, 1.0, 3.0])
    vals, errs = integrate_nested_many(
        lambda K, y, p: np.exp(-p * K) * (1 + y), lambda K, p: 0 * K, lambda K, p: K,
        params, 1e-9)
    for p, v in zip(params, vals):
        single = integrate_nested(lambda K, y: np.exp(-p * K) * (1 + y),
                                  lambda K: 0.0, lambda K: K, 1e-9)
        # int_0^inf e^{-pK} (K + K^2/2) dK = 1/p^2 + 1/p^3
        assert v == pytest.approx(1 / p ** 2 + 1 / p ** 3, rel=1e-9)
        assert v == pytest.approx(single.value, rel=1e-9)
    assert np.all(errs >= 0)


def test_breakpoints_resolve_kink():
    res = integrate_interval(lambda x: np.abs(x - 0.3), 0.0, 1.0, 1e-12, points=[0.3])
    assert res.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-13)


def test_failure_raises_with_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate_interval(lambda x: np.sin(1 / x) / x, 0.0, 1.0, 1e-12, limit=20)
    assert isinstance(info.value.estimate, QuadratureResult)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate_semi_infinite(lambda k: np.exp(-k), rel_tol=0.0)


def test_result_validation():
    with pytest.raises(ValueError):
        QuadratureResult(1.0, -1.0, 1)
    with pytest.raises(ValueError):
        QuadratureResult(1.0, 0.0, 0)


@pytest.mark.parametrize("f, x, expected", [
    (lambda x: x ** 3, 1.0, 6.0),
    (math.exp, 0.0, 1.0),
    (lambda x: x ** -3, 2.0, 0.375),
])
def test_second_derivative(f, x, expected):
    assert second_derivative(f, x, 1e-2) == pytest.approx(expected, rel=1e-6)


def test_first_derivative():
    assert first_derivative(math.sin, 0.7, 1e-2) == pytest.approx(math.cos(0.7), rel=1e-9)


def test_step_underflow():
    with pytest.raises(ValueError):
        second_derivative(math.exp, 1.0, 1e-9)
    with pytest.raises(ValueError):
        second_derivative(math.exp, 1.0, 0.0)


@settings(max_examples=25, deadline=None)
@given(rate=st.floats(0.3, 5.0), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity(rate, a, b):
    f = lambda k: np.exp(-rate * k)
    g = lambda k: k * np.exp(-2 * rate * k)
    rf, rg = integrate_semi_infinite(f), integrate_semi_infinite(g)
    rs = integrate_semi_infinite(lambda k: a * f(k) + b * g(k))
    tol = abs(a) * rf.abs_error_estimate + abs(b) * rg.abs_error_estimate + rs.abs_error_estimate
    assert rs.value == pytest.approx(a * rf.value + b * rg.value, abs=tol + 1e-14)


@settings(max_examples=15, deadline=None)
@given(rate=st.floats(0.2, 8.0))
def test_halving_tolerance_is_consistent(rate):
    f = lambda k: k ** 2 * np.exp(-rate * k) / (1 + k)
    r1 = integrate_semi_infinite(f, 1e-6)
    r2 = integrate_semi_infinite(f, 5e-7)
    assert abs(r1.value - r2.value) <= r1.abs_error_estimate + r2.abs_error_estimate + 1e-15
