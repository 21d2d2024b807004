import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sausage import specfun
from sausage.specfun import BesselEvalMethod, BesselMethod, bessel_k0, bessel_k01e, bessel_k1

# (z, K0(z), K1(z)) from mpmath.besselk at 20 digits
K_ORACLE = [
    (0.3 + 0.2j, 1.17999980840642466 - 0.530668342596929576j, 2.00317919968185481 - 1.62107391292379347j),
    (2.5 - 1j, 0.0231553326149992072 + 0.0557383602291872305j, 0.0235257799779871465 + 0.0661829467783955524j),
    (10 + 10j, -8.5995322049402432e-6 + 1.23347915716509794e-5j, -8.51324839848642276e-6 + 1.285270896727941e-5j),
    (0.05 + 0.01j, 3.09455836993950304 - 0.196490654070682317j, 19.1399501500798009 - 3.85919795269008237j),
    (30 - 5j, 7.65027882586617446e-15 - 1.97516667588054417e-14j, 7.82594444248919836e-15 - 2.0049156730322772e-14j),
]


def test_constants():
    assert specfun.euler_gamma() == pytest.approx(0.5772156649015329, rel=1e-15)
    assert specfun.KAPPA == pytest.approx(2 * math.exp(-2 * 0.5772156649015329), rel=1e-15)
    assert specfun.zeta_int(2) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert specfun.zeta_int(3) == pytest.approx(1.2020569031595942, rel=1e-14)
    assert specfun.zeta_int(20) == pytest.approx(1.0000009539620338, rel=1e-14)


def test_recip_gamma():
    for x in (-2.5, -0.3, 0.0, 0.4, 0.9, 1.0):
        assert specfun.recip_gamma_one_minus(x) == pytest.approx(special.rgamma(1 - x), rel=1e-13, abs=1e-15)
    with pytest.raises(ValueError):
        specfun.recip_gamma_one_minus(1.5)
    for x in (-0.4, 0.1, 0.45):
        assert specfun.log_recip_gamma_series(x) == pytest.approx(-special.gammaln(1 - x), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("z,k0,k1", K_ORACLE)
def test_bessel_mpmath_oracle(backend, z, k0, k1):
    assert abs(bessel_k0(z) - k0) <= 1e-13 * abs(k0)
    assert abs(bessel_k1(z) - k1) <= 1e-13 * abs(k1)


@pytest.mark.parametrize("method", list(BesselMethod))
def test_forced_methods_agree_where_valid(method):
    z = np.array([0.8 + 0.5j, 1.5 - 0.2j, 3.0 + 2.0j])
    if method is BesselMethod.ASYMPTOTIC_LARGE:
        z = z * 30
    k0, k1 = bessel_k01e(z, BesselEvalMethod(tag=method))
    assert np.allclose(k0, special.kve(0, z), rtol=1e-12, atol=0)
    assert np.allclose(k1, special.kve(1, z), rtol=1e-12, atol=0)


def test_real_axis_matches_scipy():
    x = np.geomspace(1e-6, 700, 200)
    k0, k1 = bessel_k01e(x)
    assert np.allclose(k0.real, special.k0e(x), rtol=2e-14, atol=0)
    assert np.allclose(k1.real, special.k1e(x), rtol=2e-14, atol=0)


def test_rejects_branch_cut():
    with pytest.raises(ValueError):
        bessel_k0(-1.0)
    with pytest.raises(ValueError):
        bessel_k0(0.0)


finite_z = st.complex_numbers(min_magnitude=1e-4, max_magnitude=200, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(np.angle(z)) < 3.0
)


@settings(max_examples=150, deadline=None)
@given(finite_z)
def test_backends_agree(z):
    from sausage import _accel

    saved = _accel.USE_NUMBA
    try:
        _accel.USE_NUMBA = True
        a = bessel_k01e(z)
        _accel.USE_NUMBA = False
        b = bessel_k01e(z)
    finally:
        _accel.USE_NUMBA = saved
    for x, y in zip(a, b):
        assert abs(x - y) <= 1e-13 * abs(y)


@settings(max_examples=150, deadline=None)
@given(finite_z)
def test_conjugate_symmetry_and_scipy(z):
    k0, k1 = bessel_k01e(np.array([z, np.conj(z)]))
    assert abs(k0[1] - np.conj(k0[0])) <= 1e-14 * abs(k0[0])
    assert abs(k0[0] - special.kve(0, z)) <= 1e-12 * abs(k0[0])
    assert abs(k1[0] - special.kve(1, z)) <= 1e-12 * abs(k1[0])


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(0, 30))
def test_heat_kernel(t, rho):
    p = specfun.heat_kernel_radial(t, rho)
    assert p == pytest.approx(math.exp(-rho * rho / (2 * t)) / (2 * math.pi * t), rel=1e-14, abs=1e-300)
    assert specfun.heat_kernel(t, complex(rho, 0)) == pytest.approx(p, rel=1e-14, abs=1e-300)
