import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aybe.numeric import jet_lift, plain_derivative_from_jet
from aybe.theta import (
    SeriesTruncationError,
    TorusParam,
    reduce_argument,
    theta1,
    theta1_prime0,
    theta1_value,
    theta3,
    theta3_value,
    theta_relation_check,
)

from conftest import TAUS

mpmath.mp.dps = 30


def mp_theta(which, z, tau, deriv=0):
    q = mpmath.exp(1j * mpmath.pi * tau)
    val = mpmath.jtheta(which, mpmath.pi * z, q, deriv)
    return complex(val * mpmath.pi**deriv)


@pytest.mark.parametrize("tau", TAUS)
def test_against_mpmath(tau):
    tp = TorusParam(tau)
    rng = np.random.default_rng(1)
    for _ in range(20):
        z = complex(rng.uniform(-2, 2)) + complex(rng.uniform(-1.5, 1.5)) * tau
        for which, f in ((1, theta1_value), (3, theta3_value)):
            ref = mp_theta(which, z, tau)
            assert abs(f(z, tp) - ref) <= 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("tau", TAUS)
def test_jet_derivatives_against_mpmath(tau):
    tp = TorusParam(tau)
    z0 = 0.23 + 0.31 * tau
    j1 = theta1(jet_lift(z0, 4), tp)
    j3 = theta3(jet_lift(z0, 4), tp)
    for k in range(4):
        for which, j in ((1, j1), (3, j3)):
            ref = mp_theta(which, z0, tau, k)
            assert abs(plain_derivative_from_jet(j, k) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_theta1_zero_and_odd(tp):
    assert abs(theta1_value(0, tp)) < 1e-300
    z = 0.3 + 0.2j
    assert abs(theta1_value(-z, tp) + theta1_value(z, tp)) < 1e-15


def test_prime0_positive_for_imaginary_tau(tp):
    d = theta1_prime0(tp)
    assert abs(d.imag) < 1e-14 and d.real > 0
    assert abs(d - mp_theta(1, 0, 1j, 1)) < 1e-13


zs = st.tuples(st.floats(-1, 1), st.floats(-1, 1)).map(lambda ab: complex(ab[0]) + complex(ab[1]) * 1j)


@settings(max_examples=50, deadline=None)
@given(zs)
def test_quasi_periodicity(z):
    tp = TorusParam(1j)
    tau = tp.tau
    t1, t3 = theta1_value(z, tp), theta3_value(z, tp)
    phi = cmath.exp(-1j * math.pi * tau - 2j * math.pi * z)
    assert abs(theta1_value(z + 1, tp) + t1) < 1e-12 * max(1, abs(t1))
    assert abs(theta3_value(z + 1, tp) - t3) < 1e-12 * max(1, abs(t3))
    a = theta1_value(z + tau, tp)
    assert abs(a + phi * t1) < 1e-12 * max(1, abs(a))
    b = theta3_value(z + tau, tp)
    assert abs(b - phi * t3) < 1e-12 * max(1, abs(b))


@settings(max_examples=50, deadline=None)
@given(zs)
def test_half_period_relation(z):
    tp = TorusParam(1j)
    scale = max(1.0, abs(theta3_value(z + tp.half_period, tp)))
    assert abs(theta_relation_check(z, tp)) < 1e-12 * scale


def test_reduction_lands_in_fundamental_strip(tp):
    z_red, _, sign = reduce_argument(3.7 + 2.6j, tp)
    assert abs(z_red.imag) <= 0.5 and abs(z_red.real) <= 0.5 + 1e-12
    assert sign in (1, -1)


def test_truncation_budget_enforced():
    with pytest.raises(SeriesTruncationError):
        TorusParam(0.01j, max_terms=4)


def test_truncation_terms_for_tau_i():
    tp = TorusParam(1j)
    assert (tp.terms1, tp.terms3) == (5, 4)


def test_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        TorusParam(-1j)
