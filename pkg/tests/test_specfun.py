"""Tests for the Bessel evaluation core.

The independent oracle throughout is mpmath.besselj at 30 significant
digits; frozen constants below were computed with it once and pinned.
"""

import math

import mpmath
import numpy as np
import pytest

from invsq.errors import AccuracyError, DomainError, ResolutionError
from invsq.specfun import (
    BesselInterpolant,
    RegimeTag,
    asymptotic_remainder_constant,
    bessel_j,
    bessel_j_batch,
    check_regime_bound,
    classify_regime,
    dyadic_l2,
    magnitude_scale,
)

mpmath.mp.dps = 30

# Frozen oracle values (mpmath.besselj, 30 digits).
J_10_5 = 0.0014678026473104741311
J_20_5 = 2.7703300521289416874e-11
J_20_20 = 0.16474777377532653234
J_2_100 = -0.021528757344505365585
J_2p7_7p3 = -0.28315660146706036072
J_37p5_300p25 = -0.024917494597622889217
DYADIC_0_8 = 0.192564619022          # fine-quadrature oracle for int_8^16 J_0^2


def oracle(nu, x):
    return float(mpmath.besselj(mpmath.mpf(nu), mpmath.mpf(x)))


def test_power_series_at_zero():
    assert bessel_j(0.0, 0.0, 1e-10) == 1.0
    assert bessel_j(2.0, 0.0, 1e-10) == 0.0
    assert bessel_j(0.5, 0.0, 1e-10) == 0.0


def test_half_integer_zero_at_pi():
    # J_{1/2}(pi) = sqrt(2/(pi*r)) sin(r) vanishes at r = pi
    assert abs(bessel_j(0.5, math.pi, 1e-10)) < 1e-10


def test_small_value_high_order():
    v = bessel_j(10.0, 5.0, 1e-10)
    assert abs(v) < 0.01
    assert abs(v - J_10_5) <= 1e-10 * abs(J_10_5)


@pytest.mark.parametrize("nu,x,ref", [
    (2.7, 7.3, J_2p7_7p3),
    (37.5, 300.25, J_37p5_300p25),
    (2.0, 100.0, J_2_100),
    (20.0, 20.0, J_20_20),
])
def test_frozen_reference_points(nu, x, ref):
    assert abs(bessel_j(nu, x, 1e-10) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.7, 10.0, 37.5])
def test_against_oracle_log_lattice(nu):
    xs = np.geomspace(1e-4, 1e4, 25)
    vals = bessel_j_batch(nu, xs, rel_tol=1e-10).values
    for x, v in zip(xs, vals):
        ref = oracle(nu, x)
        if abs(ref) > 1e-280:
            assert abs(v - ref) <= 1e-10 * abs(ref) + 1e-290, (nu, x)
        else:
            assert abs(v - ref) <= 1e-290


def test_half_integer_closed_form_sweep():
    xs = np.geomspace(0.1, 100.0, 120)
    vals = bessel_j_batch(0.5, xs, rel_tol=1e-10).values
    ref = np.sqrt(2.0 / (np.pi * xs)) * np.sin(xs)
    assert np.all(np.abs(vals - ref) <= 1e-10 * np.maximum(1.0, np.abs(ref)))


def test_small_argument_uniform_bound():
    # |J_k(r)| <= C r^k/(2^k Gamma(k+1/2) Gamma(1/2)) (1 + 1/(k+1/2)),
    # with the per-k fitted C showing no growth in k.
    rs = np.linspace(0.05, 1.0, 16)
    fitted = []
    for k in range(0, 41):
        vals = np.abs(bessel_j_batch(float(k), rs, rel_tol=1e-8, abs_floor=1e-280).values)
        envelope = (rs ** k / (2.0 ** k * math.gamma(k + 0.5) * math.gamma(0.5))
                    * (1.0 + 1.0 / (k + 0.5)))
        fitted.append(np.max(vals / envelope))
    fitted = np.array(fitted)
    assert np.all(fitted < 2.0)
    assert fitted[-1] <= fitted[0]  # decreasing trend, no growth


def test_underflow_convention():
    # J_100(1e-3) ~ 1e-488: reported as exact 0 with the underflow flag set
    out = bessel_j_batch(100.0, np.array([1e-3]), rel_tol=1e-10)
    assert out.values[0] == 0.0
    assert bool(out.underflow[0])


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(-1.0, 2.0, 1e-10)
    with pytest.raises(DomainError):
        bessel_j(1.0, -2.0, 1e-10)
    with pytest.raises(DomainError):
        bessel_j(1.0, 2.0, 1e-3)   # rel_tol above the 1e-6 ceiling
    with pytest.raises(DomainError):
        bessel_j(1.0, 2.0, 0.0)


def test_accuracy_error_when_uncertifiable():
    # deep cancellation zone at very large order: no double-precision route
    with pytest.raises(AccuracyError):
        bessel_j_batch(300.0, np.array([240.0]), rel_tol=1e-10)


def test_classify_regime_examples_and_partition():
    assert classify_regime(10, 4) is RegimeTag.BELOW_TRANSITION
    assert classify_regime(10, 15) is RegimeTag.TRANSITION
    assert classify_regime(10, 30) is RegimeTag.OSCILLATORY
    # boundaries belong to the outer regimes
    assert classify_regime(10, 5) is RegimeTag.BELOW_TRANSITION
    assert classify_regime(10, 20) is RegimeTag.OSCILLATORY
    # exact partition of [0, inf) for several k
    for k in [0.0, 1.0, 7.0, 10.0]:
        for r in np.linspace(0.0, 4 * k + 10.0, 201):
            tags = [classify_regime(k, r)]
            assert len(tags) == 1  # classify returns exactly one tag
    assert classify_regime(0, 0) is RegimeTag.BELOW_TRANSITION
    assert classify_regime(0, 1.0) is RegimeTag.OSCILLATORY


def test_check_regime_bound_below_transition():
    rep = check_regime_bound(20, 5.0, C=10.0, c=0.2)
    assert rep.regime is RegimeTag.BELOW_TRANSITION
    assert rep.satisfied
    assert abs(rep.lhs - abs(J_20_5)) <= 1e-8 * abs(J_20_5)
    assert abs(rep.constant_used * rep.rhs_envelope - 10.0 * math.exp(-0.2 * 25)) < 1e-12


def test_check_regime_bound_transition_at_peak():
    rep = check_regime_bound(20, 20.0, C=10.0, c=0.2)
    assert rep.regime is RegimeTag.TRANSITION
    assert rep.lhs <= 10.0 * 20.0 ** (-1.0 / 3.0)
    assert rep.satisfied


def test_check_regime_bound_oscillatory():
    rep = check_regime_bound(2, 100.0, C=10.0, c=0.2)
    assert rep.regime is RegimeTag.OSCILLATORY
    assert abs(rep.constant_used * rep.rhs_envelope - (10.0 * 100.0 ** -0.5 + 10.0 / 100.0)) < 1e-12
    assert rep.satisfied


def test_check_regime_bound_domain():
    with pytest.raises(DomainError):
        check_regime_bound(1, 5.0, 10.0, 0.2)
    with pytest.raises(DomainError):
        check_regime_bound(4, -1.0, 10.0, 0.2)


def test_dyadic_l2_frozen_window():
    v = dyadic_l2(0, 8.0)
    assert abs(v - DYADIC_0_8) < 0.01 * DYADIC_0_8


def test_dyadic_l2_leading_asymptotic_large_window():
    # (1/pi) ln 2 is the non-oscillatory leading term; at large R the
    # oscillatory correction has decayed and the 5% bracket holds.
    v = dyadic_l2(0, 1024.0)
    assert abs(v - math.log(2.0) / math.pi) < 0.05 * math.log(2.0) / math.pi


def test_dyadic_l2_exponentially_small():
    assert dyadic_l2(50, 8.0) < 1e-6


def test_dyadic_l2_resolution_contract():
    with pytest.raises(ResolutionError):
        dyadic_l2(0, 1024.0, quad_points=64)
    with pytest.raises(DomainError):
        dyadic_l2(0, 4.0)
    with pytest.raises(DomainError):
        dyadic_l2(0, 16.0, quad_points=32)


def test_magnitude_scale_brackets_J():
    rng = np.random.default_rng(3)
    for nu in [0.0, 0.5, 2.7, 10.0, 37.5]:
        xs = np.geomspace(max(0.2, 0.05 * nu), 1e3, 40)
        env = magnitude_scale(nu, xs)
        for x, e in zip(xs, env):
            ref = abs(oracle(nu, x))
            assert ref <= 12.0 * e, (nu, x)


def test_interpolant_matches_oracle():
    itp = BesselInterpolant(2.7, 300.0, tol=1e-11)
    rng = np.random.default_rng(11)
    xs = rng.uniform(0.0, 300.0, 80)
    vals = itp(xs)
    env = magnitude_scale(2.7, xs)
    for x, v, e in zip(xs, vals, env):
        assert abs(v - oracle(2.7, x)) <= 1e-9 * max(e, 1e-300)
    assert itp.cert_err < 5e-11


def test_interpolant_large_order():
    itp = BesselInterpolant(37.5, 500.0, tol=1e-11)
    xs = np.array([0.5, 5.0, 20.0, 36.0, 37.5, 40.0, 75.0, 499.0])
    env = magnitude_scale(37.5, xs)
    for x, e in zip(xs, env):
        v = float(itp(np.array([x]))[0])
        ref = oracle(37.5, x)
        assert abs(v - ref) <= 1e-9 * max(e, abs(ref)), x


def test_asymptotic_remainder_constant_is_modest():
    c = asymptotic_remainder_constant(1.118033988749895, 5.0, 500.0)
    assert 0.0 < c < 5.0
