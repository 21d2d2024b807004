import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sausage import inversion as I
from sausage.ramanujan import n_direct
from sausage.specfun import KAPPA

# phi(z) from mpmath at 40 digits
PHI_ORACLE = [
    (0.1, 0.6402270849502906),
    (0.25, 0.54534828779154258),
    (0.26, 0.54106592445331837),
    (0.6, 0.44771478142710236),
    (KAPPA * (1 + 1e-4), 0.44213294557689254),
    (2 + 3j, 0.2502070008613107 - 0.090881767754979939j),
    (0.01j, 0.83555683752579527 - 0.085453987349305395j),
    (0.2 - 0.1j, 0.55856049770704117 + 0.050210426812025903j),
    (50j, 0.069585149656638965 - 0.059677143959238677j),
]


@pytest.mark.parametrize(
    "F,f",
    [
        (lambda s: 1 / (s + 1), lambda t: math.exp(-t)),
        (lambda s: 1 / (s + 1) ** 2, lambda t: t * math.exp(-t)),
        (lambda s: 1 / np.sqrt(s), lambda t: 1 / math.sqrt(math.pi * t)),
        (lambda s: np.log(s) / s, lambda t: -math.log(t) - 0.5772156649015329),
    ],
)
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_talbot_known_pairs(F, f, t):
    res = I.talbot_invert(F, t, check_imag=True)
    assert res.value == pytest.approx(f(t), rel=1e-9, abs=1e-12)
    assert res.error_estimate < 1e-6 * max(abs(f(t)), 1e-6)
    assert res.imag_residue < 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        I.InversionConfig(nodes=8)
    assert I.InversionConfig(method="fourier").method is I.InversionMethod.FOURIER_CORRECTION


@pytest.mark.parametrize("z,ref", PHI_ORACLE)
def test_phi_oracle(z, ref):
    assert abs(I.phi(z) - ref) <= 3e-12 * abs(ref)


def test_phi_at_origin_and_domain():
    assert I.phi(0) == pytest.approx(1 / KAPPA - 0.5, rel=1e-15)
    # the approach to phi(0) is only logarithmic; values from mpmath at 40 digits
    assert I.phi(1e-12) == pytest.approx(1.047949166451736, rel=1e-12)
    assert I.phi(1e-3) == pytest.approx(0.90969939408485598, rel=1e-12)
    with pytest.raises(ValueError):
        I.phi(-1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 2 * math.pi), st.floats(-1e-3, 1e-3))
def test_phi_continuous_across_small_z_switch(arg, eps):
    # the regularised series and the direct difference meet on |z| = 0.25
    if abs(arg - math.pi) < 0.05:
        return
    z1 = 0.25 * np.exp(1j * arg)
    z2 = z1 * (1 + eps)
    assert abs(I.phi(z1) - I.phi(z2)) <= 2 * abs(eps) + 1e-11


def test_phi_large_u():
    for u in (1e4, 1e6):
        exact = I.phi(1j * u)
        assert abs(exact - I.phi_large_u(u)) < 5 * abs(1 / (1j * u * math.log(u)) ** 1) / math.log(u)


@pytest.mark.parametrize("t", [0.01, 1.0, 100.0, 1e4])
def test_two_routes_agree(t):
    a = I.rate_m(t, "talbot")
    b = I.rate_m(t, "fourier")
    assert a.m == pytest.approx(b.m, rel=1e-10)
    assert a.leading == pytest.approx(2 * math.pi * n_direct(KAPPA * t), rel=1e-15)


def test_rate_scaling_in_r():
    assert I.rate_m_scaled(4.0, 2.0) == pytest.approx(I.rate_m(1.0).m, rel=1e-15)


def test_rate_is_decreasing():
    m = [I.rate_m(t).m for t in np.geomspace(1e-3, 1e3, 25)]
    assert np.all(np.diff(m) < 0)


def test_small_t_sqrt_coefficient():
    # beyond sqrt(2 pi/t) + pi/2 the next term is c sqrt(t), c = -sqrt(pi)/(4 sqrt 2)
    c = -math.sqrt(math.pi) / (4 * math.sqrt(2))
    vals = [(I.rate_m(t).m - math.sqrt(2 * math.pi / t) - math.pi / 2) / math.sqrt(t) for t in (1e-4, 1e-5, 1e-6)]
    assert abs(vals[-1] / c - 1) < 2e-3
    assert abs(vals[0] - c) > abs(vals[1] - c) > abs(vals[2] - c)


def test_small_t_remainder_with_constant_half_pi_shrinks_like_sqrt_t():
    res = [abs(I.rate_m(t).m - math.sqrt(2 * math.pi / t) - math.pi / 2) for t in (1e-2, 1e-3, 1e-4)]
    for a, b in zip(res, res[1:]):
        assert 2.5 <= a / b <= 4.5


@pytest.mark.parametrize("t", [1e3, 1e4, 1e5, 1e6])
def test_large_t_correction_is_two_pi_over_t_log_squared(t):
    L = math.log(t)
    scaled = I.rate_m(t).correction * t * L * L / (2 * math.pi)
    assert 1.0 < scaled < 1.15


def test_large_t_correction_helper():
    assert I.large_t_correction(1e4) == pytest.approx(4 * math.pi / (1e4 * math.log(1e4) ** 3))


def test_free_area_routes_agree():
    assert I.free_area_theory(100.0) == pytest.approx(I.free_area_talbot(100.0), rel=1e-10)
    assert I.free_area_theory(400.0, 2.0) == pytest.approx(4 * I.free_area_theory(100.0), rel=1e-10)


def test_free_area_small_t():
    # pi r^2 + 2 sqrt(2 pi t) r + (pi/2) t + ...
    t = 1e-4
    approx = math.pi + 2 * math.sqrt(2 * math.pi * t) + 0.5 * math.pi * t
    assert I.free_area_theory(t) == pytest.approx(approx, rel=1e-6)


def test_f0_and_bridge_areas():
    assert I.f0_residual(1e3) * 1e3 * math.log(1e3) ** 2 == pytest.approx(1.48, abs=0.01)
    assert I.bridge_area_f0(100.0) == pytest.approx(122.0584, rel=1e-5)
    assert I.bridge_area_exact(100.0) == pytest.approx(127.9832, rel=1e-5)
    assert I.bridge_area_exact(400.0, 2.0) == pytest.approx(4 * I.bridge_area_exact(100.0), rel=1e-10)
    # the dropped angular modes contribute a positive O(1) amount
    gaps = [I.bridge_area_exact(t) - I.bridge_area_f0(t) for t in (10.0, 100.0, 1000.0)]
    assert all(0 < g < 10 for g in gaps)


def test_bridge_exact_small_t_limit():
    # a short bridge barely moves: area -> pi
    assert I.bridge_area_exact(1e-3) == pytest.approx(math.pi, rel=0.05)


def test_bridge_prediction():
    p0 = I.bridge_area_prediction(100.0, (0.0, 0.0))
    assert p0.value == pytest.approx(2 * math.pi * 100 * n_direct(KAPPA * 100), rel=1e-14)
    assert p0.second == 0
    px = I.bridge_area_prediction(100.0, (5.0, 0.0))
    assert px.value > p0.value
    # at |x| = sqrt(t) the explicit second term vanishes
    assert I.bridge_area_prediction(100.0, (10.0, 0.0)).second == 0.0
    with pytest.raises(ValueError):
        I.bridge_area_prediction(100.0, (41.0, 0.0))
    with pytest.raises(ValueError):
        I.bridge_area_prediction(2.0, 0.0)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_bessel_square_integrand_identity(r):
    # r K0(r)^2 = (1/2) d/dr [r^2 (K0(r)^2 - K1(r)^2)], the integrand behind F0
    from sausage.specfun import bessel_k0, bessel_k1

    g = lambda x: x * x * (bessel_k0(x).real ** 2 - bessel_k1(x).real ** 2)
    h = 1e-5
    assert r * bessel_k0(r).real ** 2 == pytest.approx(0.5 * (g(r + h) - g(r - h)) / (2 * h), rel=1e-6)


def test_more_nodes_lose_accuracy_in_double_precision():
    ref = I.rate_m(1.0, "fourier").m
    err = {n: abs(I.rate_m(1.0, I.InversionConfig(nodes=n, tol=1)).m / ref - 1) for n in (24, 40)}
    assert err[24] < 1e-11 < err[40]
