import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ginprod.errors import ConvergenceError, DomainError
from ginprod.special import (bessel_I0, bessel_K0, erfc, hyper_0F_q, log_bessel_I0,
                             log_bessel_K0, log_erfc, log_gamma)

# 30-digit mpmath values
ERFC_1 = 0.157299207050285130658779364917
K0_2 = 0.113893872749533435652719574932
I0_2 = 2.27958530233606726743720444081


@pytest.mark.parametrize("s, expected", [(1.0, 0.0), (5.0, math.log(24.0)),
                                         (0.5, 0.5 * math.log(math.pi))])
def test_log_gamma_known_values(s, expected):
    assert log_gamma(s) == pytest.approx(expected, abs=1e-14)
    assert log_gamma(complex(s)).real == pytest.approx(expected, abs=1e-14)


def test_log_gamma_matches_mpmath_on_contour_strip():
    rng = np.random.default_rng(0)
    s = rng.uniform(0.25, 50, 400) + 1j * rng.uniform(-200, 200, 400)
    got = log_gamma(s)
    with mp.workdps(30):
        ref = np.array([complex(mp.loggamma(mp.mpc(x.real, x.imag))) for x in s])
    err = np.abs(got - ref) / np.maximum(1.0, np.abs(ref))
    assert err.max() <= 1e-13


def test_log_gamma_recurrence():
    rng = np.random.default_rng(1)
    s = rng.uniform(0.25, 50, 1000) + 1j * rng.uniform(-200, 200, 1000)
    lhs = log_gamma(s + 1)
    rhs = log_gamma(s) + np.log(s)
    # equal modulo 2 pi i on the principal branch
    diff = lhs - rhs
    diff = diff.real + 1j * ((diff.imag + np.pi) % (2 * np.pi) - np.pi)
    assert np.abs(diff).max() <= 1e-12


@pytest.mark.parametrize("bad", [0.0, -1.0, complex(-0.5, 2.0), math.inf, math.nan])
def test_log_gamma_domain(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)


def test_erfc_values():
    assert erfc(0.0) == 1.0
    assert erfc(0.7) == pytest.approx(2.0 - erfc(-0.7), rel=1e-15)
    assert erfc(1.0) == pytest.approx(ERFC_1, rel=1e-12)


def test_erfc_against_mpmath():
    for x in np.linspace(-10, 10, 81):
        assert erfc(x) == pytest.approx(float(mp.erfc(x)), rel=1e-12)


def test_erfc_reflection():
    x = np.random.default_rng(2).uniform(-8, 8, 1000)
    assert np.abs(erfc(x) + erfc(-x) - 2.0).max() <= 1e-13


def test_log_erfc_tail_is_finite():
    for x in (10.0, 30.0, 100.0):
        assert log_erfc(x) == pytest.approx(float(mp.log(mp.erfc(x))), rel=1e-12)


def test_k0_against_integral_definition():
    val, _ = integrate.quad(lambda t: math.exp(-2 * math.cosh(t)), 0, 8.0,
                            epsabs=0, epsrel=1e-13)
    assert val == pytest.approx(K0_2, rel=1e-12)
    assert bessel_K0(2.0) == pytest.approx(K0_2, rel=1e-12)


def test_i0_series():
    series = sum(1.0 / math.factorial(k) ** 2 for k in range(40))
    assert series == pytest.approx(I0_2, rel=1e-14)
    assert bessel_I0(2.0) == pytest.approx(I0_2, rel=1e-12)
    assert bessel_I0(0.0) == 1.0


@pytest.mark.parametrize("x", [1e-8, 1e-3, 0.5, 3.0, 40.0, 300.0, 700.0])
def test_log_bessel_against_mpmath(x):
    assert log_bessel_K0(x) == pytest.approx(float(mp.log(mp.besselk(0, x))), rel=1e-12)
    assert log_bessel_I0(x) == pytest.approx(float(mp.log(mp.besseli(0, x))), rel=1e-12, abs=1e-15)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_K0(0.0)
    with pytest.raises(DomainError):
        log_bessel_I0(-1.0)


def test_hyper_small_cases():
    for q in range(5):
        assert hyper_0F_q(q, 0) == 1.0
    assert hyper_0F_q(0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert hyper_0F_q(1, 1.0).real == pytest.approx(bessel_I0(2.0), rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 20), st.floats(-math.pi, math.pi))
def test_hyper_q0_is_exp(rad, phi):
    x = cmath.rect(rad, phi)
    assert abs(hyper_0F_q(0, x) / cmath.exp(x) - 1) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 100))
def test_hyper_q1_is_i0(x):
    assert hyper_0F_q(1, x).real == pytest.approx(bessel_I0(2 * math.sqrt(x)), rel=1e-10)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_hyper_against_mpmath(q):
    for x in (0.3 + 0.4j, -2.0, 3.0 - 1.0j, 15.0):
        with mp.workdps(30):
            ref = complex(mp.hyper([], [1] * q, x))
        assert abs(hyper_0F_q(q, x) - ref) <= 1e-11 * abs(ref)


def test_hyper_beyond_switch_radius():
    with pytest.raises(ConvergenceError) as info:
        hyper_0F_q(2, 1e5)
    assert info.value.bound == math.inf
