import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sausage import expansion as E
from sausage import ramanujan as R
from sausage.specfun import EULER_GAMMA as G, KAPPA, zeta_int


def test_printed_a_coefficients():
    z2, z3 = zeta_int(2), zeta_int(3)
    a = E.a_coeffs(1.0, 3)
    assert a == pytest.approx([1, -G, G * G - z2, 3 * G * z2 - G**3 - 2 * z3], abs=1e-13)


def test_printed_b_coefficients():
    assert E.b_coeffs(1.0, 1) == pytest.approx([1, 1 - G], abs=1e-15)


def test_n_max_cap():
    E.a_coeffs(1.0, 30)
    with pytest.raises(ValueError):
        E.a_coeffs(1.0, 31)
    with pytest.raises(ValueError):
        E.b_coeffs(0.0, 3)


coef = st.lists(st.floats(-3, 3), min_size=1, max_size=12)


@settings(max_examples=100, deadline=None)
@given(coef)
def test_exp_log_roundtrip(c):
    p = E.PowerSeries([0.0] + c)
    back = E.series_log(E.series_exp(p))
    assert np.allclose(back.coeffs, p.coeffs, rtol=1e-9, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(coef, coef)
def test_exp_is_homomorphism(c1, c2):
    n = min(len(c1), len(c2))
    p, q = E.PowerSeries([0.0] + c1[:n]), E.PowerSeries([0.0] + c2[:n])
    lhs = E.series_exp(p + q).coeffs
    rhs = (E.series_exp(p) * E.series_exp(q)).coeffs
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 20))
def test_b_is_partial_sum_of_a(alpha):
    f = np.array([math.factorial(n) for n in range(11)], dtype=float)
    a, b = E.a_coeffs(alpha, 10), E.b_coeffs(alpha, 10)
    assert np.allclose(b / f, np.cumsum(a / f), rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("t", [1e4, 1e6, 1e10])
def test_expansion_tracks_n(t):
    ev = E.eval_expansion(t, E.a_coeffs(KAPPA, 30), "N")
    assert abs(ev.value - R.n_direct(KAPPA * t)) <= 5 * ev.omitted + 1e-15


def test_optimal_truncation_cuts_at_smallest_term():
    a = E.a_coeffs(1.0, 30)
    t = 50.0
    L = math.log(t)
    terms = np.abs(a / L ** np.arange(31)) / L
    ev = E.eval_expansion(t, a)
    assert ev.n_terms == 1 + int(np.argmin(terms[1:]))
    assert ev.omitted == pytest.approx(terms[ev.n_terms])


def test_mean_integral_expansion_beyond_all_orders():
    # the series misses a constant, which is invisible at every order in t / (log t)^n
    b = E.b_coeffs(1.0, 30)
    diffs = [E.eval_expansion(t, b, "MeanIntegral").value - R.n_running_integral(t, 1.0) for t in (1e6, 1e8)]
    assert abs(diffs[1] - diffs[0]) < 0.05


def test_derivative_integral_kind():
    b = E.b_coeffs(1.0, 6)
    ev = E.eval_expansion(1e6, b, E.ExpansionKind.DERIVATIVE_INTEGRAL, n_terms=3)
    L = math.log(1e6)
    assert ev.value == pytest.approx(1e6 / L**2 * (b[0] + 2 * b[1] / L + 3 * b[2] / L**2), rel=1e-14)
