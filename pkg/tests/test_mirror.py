import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casimir_roughness.mirror import (
    DomainError,
    MirrorSpec,
    PerfectMirror,
    ReducedPoint,
    k_t,
    log_round_trip_gap,
    loop_function,
    mirror_from_lambda,
    r_te,
    r_tm,
    round_trip_gap,
    tm_reflection,
)


@pytest.mark.parametrize("K, K_P, expected", [(0, 5, 5), (3, 4, 5), (1, 0, 1)])
def test_k_t(K, K_P, expected):
    assert k_t(K, K_P) == expected


def test_r_te_examples():
    assert r_te(2.0, 0.0) == 0.0
    assert r_te(3.0, 4.0) == pytest.approx(-0.25, rel=1e-15)
    assert r_te(1.0, 1e8) == pytest.approx(-1.0, abs=1e-7)


def test_r_tm_examples():
    assert r_tm(2.0, 0.0, 3.0) == 1.0
    assert r_tm(2.0, 1.0, 0.0) == 0.0
    assert r_tm(1.0, 1.0, math.sqrt(3.0)) == pytest.approx(1 / 3, rel=1e-14)


def test_undefined_points():
    with pytest.raises(DomainError):
        r_te(0.0, 0.0)
    with pytest.raises(DomainError):
        r_tm(0.0, 0.0, 1.0)


def test_loop_function_examples():
    assert loop_function(0.0, 1.0) == 0.0
    assert loop_function(-1.0, math.log(2) / 2) == pytest.approx(1.0, rel=1e-14)
    assert loop_function(1.0, 40.0) < 1e-30
    with pytest.raises(DomainError):
        loop_function(1.0, 0.0)


def test_gap_and_log_gap_are_accurate():
    r, K = 0.999999, 1e-7
    x = r * r * math.exp(-2 * K)
    # mpmath-free reference: 1 - x computed in extended form
    expected = (1 - r * r) + r * r * (2 * K - 2 * K * K)
    assert round_trip_gap(r, K) == pytest.approx(expected, rel=1e-8)
    assert log_round_trip_gap(0.5, 30.0) == pytest.approx(-0.25 * math.exp(-60), rel=1e-12)
    assert log_round_trip_gap(r, K) == pytest.approx(math.log(expected), rel=1e-8)
    assert x < 1


def test_mirror_variants():
    assert isinstance(mirror_from_lambda(0), PerfectMirror)
    m = mirror_from_lambda(136)
    assert isinstance(m, MirrorSpec) and not m.perfect
    assert m.k_p(136.0) == pytest.approx(2 * math.pi)
    assert math.isinf(PerfectMirror().k_p(5.0))
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(DomainError):
            MirrorSpec(bad)


def test_reduced_point():
    p = ReducedPoint(3.0, 1.0, 4.0)
    assert p.k_t == 5.0
    assert p.r_te == pytest.approx(-0.25)
    assert 0 <= p.r_tm < 1
    with pytest.raises(DomainError):
        ReducedPoint(1.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        ReducedPoint(1.0, 0.5, -1.0)


def _literal_r_tm(K, W, K_P, sqrt=math.sqrt):
    eps = 1 + K_P ** 2 / W ** 2
    kt = sqrt(K * K + K_P * K_P)
    return (eps * K - kt) / (eps * K + kt)


@settings(max_examples=300, deadline=None)
@given(K=st.floats(1e-3, 50.0), u=st.floats(1e-6, 1.0), K_P=st.floats(1e-3, 1e3))
def test_stable_tm_equals_literal_form(K, u, K_P):
    W = u * K
    lit = _literal_r_tm(K, W, K_P)
    # the literal numerator cancels when r is small; its own error grows as 1/|r|
    cond = max(1.0, 1.0 / abs(lit))
    assert r_tm(K, W, K_P) == pytest.approx(lit, rel=1e-12 * cond)


@settings(max_examples=100, deadline=None)
@given(K=st.floats(1e-3, 50.0), u=st.floats(1e-6, 1.0), K_P=st.floats(1e-3, 1e3))
def test_stable_tm_against_extended_precision(K, u, K_P):
    with mpmath.workdps(40):
        ref = _literal_r_tm(mpmath.mpf(K), mpmath.mpf(u * K), mpmath.mpf(K_P), mpmath.sqrt)
    assert r_tm(K, u * K, K_P) == pytest.approx(float(ref), rel=1e-13)


@settings(max_examples=300, deadline=None)
@given(K=st.floats(1e-6, 100.0), u=st.floats(0.0, 1.0), K_P=st.floats(1e-4, 1e4))
def test_reflection_bounds(K, u, K_P):
    W = u * K
    rte, rtm = r_te(K, K_P), r_tm(K, W, K_P)
    assert -1 < rte <= 0
    assert 0 <= rtm <= 1
    _, c = tm_reflection(K, W, K_P)
    if W * W > 0:
        # r may round to 1 when 1 - r < eps; the companion 1 - r^2 keeps strictness
        assert c > 0
    assert c == pytest.approx(1 - rtm ** 2, abs=1e-12)


def test_te_magnitude_grows_with_plasma_wavevector():
    kp = np.logspace(-3, 3, 200)
    for K in (0.01, 1.0, 30.0):
        assert np.all(np.diff(np.abs(r_te(K, kp))) > 0)
        for u in (0.0, 0.5, 1.0):
            assert np.diff(r_tm(K, u * K, kp)).min() >= -4e-16


def test_loop_function_monotone():
    r = np.linspace(0, 0.999, 100)
    assert np.all(np.diff(loop_function(r, 0.3)) > 0)
    K = np.linspace(0.01, 20, 100)
    assert np.all(np.diff(loop_function(0.9, K)) < 0)
