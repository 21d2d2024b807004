import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from sausage import ramanujan as R

# N(lambda) from mpmath quadrature at 20 digits
N_ORACLE = {
    0.1: 0.64817775720103525,
    1.0: 0.4517473207591964,
    10.0: 0.276334325659171533,
    100.0: 0.179175804574065024,
    1e4: 0.100191981732528914,
}


def test_n_at_zero():
    assert R.n_direct(0.0) == 1.0


@pytest.mark.parametrize("lam", sorted(N_ORACLE))
def test_n_direct_oracle(lam):
    assert R.n_direct(lam) == pytest.approx(N_ORACLE[lam], rel=1e-13)


def test_domain():
    with pytest.raises(ValueError):
        R.n_direct(-1.0)
    with pytest.raises(ValueError):
        R.n_bouwkamp(1.0)
    with pytest.raises(ValueError):
        R.n_laplace_closed_form(1.0)


def test_laplace_closed_form_value():
    # 1 - 1/(2 log 2)
    assert R.n_laplace_closed_form(2.0) == pytest.approx(1 - 1 / (2 * math.log(2)), rel=1e-15)
    assert R.n_laplace_closed_form(2.0) == pytest.approx(0.2786524795555183, rel=1e-13)


@pytest.mark.parametrize("lam", [0.01, 0.5, 3.0, 50.0, 1e5])
def test_derivative(lam):
    h = 1e-5 * lam
    fd = (R.n_direct(lam + h) - R.n_direct(lam - h)) / (2 * h)
    assert R.n_prime(lam) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("t,alpha", [(0.5, 1.0), (10.0, 0.63), (300.0, 2.0)])
def test_running_integral(t, alpha):
    ref = integrate.quad(lambda s: R.n_direct(alpha * s), 0, t, epsrel=1e-12, limit=200)[0]
    assert R.n_running_integral(t, alpha) == pytest.approx(ref, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(2.0001, 1e8))
def test_bouwkamp_within_bound(lam):
    rep = R.n_bouwkamp(lam)
    assert rep.method is R.NMethod.BOUWKAMP
    assert abs(rep.value - R.n_direct(lam)) <= rep.error_bound + 1e-10


@pytest.mark.parametrize("s", [0.5, 1.5, 3.0])
def test_bouwkamp_fixed_s(s):
    lam = 40.0
    rep = R.n_bouwkamp(lam, s)
    assert rep.s == s
    assert rep.error_bound == pytest.approx(math.gamma(s) / (math.pi**2 * lam**s), rel=1e-12)
    assert abs(rep.value - R.n_direct(lam)) <= rep.error_bound


@settings(max_examples=80, deadline=None)
@given(st.floats(0, 1e6), st.floats(1e-6, 1e6))
def test_n_decreasing_and_in_unit_interval(a, b):
    lo, hi = sorted((a, a + b))
    nlo, nhi = R.n_direct(lo), R.n_direct(hi)
    assert 0 < nhi <= nlo <= 1
