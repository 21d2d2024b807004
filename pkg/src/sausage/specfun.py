"""Special functions: Euler's constant, zeta at integers, 1/Gamma(1-x),
modified Bessel functions K0 and K1 of complex argument, and the planar heat
kernel.

Branch conventions: logarithms and square roots are principal, with the cut on
the closed negative real axis.  K0 and K1 are evaluated by one of three
methods chosen by ``|z|``:

* ``|z| <= 2``: ascending series,
* ``2 < |z| <= 20``: integral representation (rotated to follow ``arg z``),
  falling back to the series when ``z`` is too close to the cut for the
  quadrature to resolve,
* ``|z| > 20``: Hankel asymptotic expansion, summed to its smallest term.

All Bessel evaluations go through the exponentially scaled forms
``e^z K_nu(z)`` so that large arguments neither overflow nor underflow.
"""

from __future__ import annotations

import cmath
import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit

EULER_GAMMA = 0.57721566490153286061
KAPPA = 2.0 * math.exp(-2.0 * EULER_GAMMA)

# Gauss-Hermite nodes on the positive half-line for the integral representation.
_GH_X, _GH_W = np.polynomial.hermite.hermgauss(80)
_GH_X, _GH_W = _GH_X[40:].copy(), _GH_W[40:].copy()

SERIES_MAX_TERMS = 60
SERIES_RTOL = 1e-17

METHOD_AUTO = 0
METHOD_SERIES = 1
METHOD_INTEGRAL = 2
METHOD_ASYMPTOTIC = 3


class BesselMethod(enum.Enum):
    SERIES_SMALL = "series"
    INTEGRAL_REP = "integral"
    ASYMPTOTIC_LARGE = "asymptotic"


@dataclass(frozen=True)
class BesselEvalMethod:
    """Method selection for K0/K1: ``tag`` forces one method, ``None`` picks by ``|z|``."""

    tag: BesselMethod | None = None
    crossover_small: float = 2.0
    crossover_large: float = 20.0

    def __post_init__(self):
        if not 0 < self.crossover_small < self.crossover_large:
            raise ValueError("need 0 < crossover_small < crossover_large")

    @property
    def code(self) -> int:
        return {
            None: METHOD_AUTO,
            BesselMethod.SERIES_SMALL: METHOD_SERIES,
            BesselMethod.INTEGRAL_REP: METHOD_INTEGRAL,
            BesselMethod.ASYMPTOTIC_LARGE: METHOD_ASYMPTOTIC,
        }[self.tag]


DEFAULT_METHOD = BesselEvalMethod()


def euler_gamma() -> float:
    return EULER_GAMMA


# Bernoulli numbers B2..B12 for the Euler-Maclaurin tail.
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)


@functools.lru_cache(maxsize=None)
def zeta_int(n: int) -> float:
    """Riemann zeta at an integer ``n >= 2``.

    Direct sum of the first 15 terms plus an Euler-Maclaurin tail; the
    neglected remainder is below 1e-20 for every ``n >= 2``.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"zeta_int needs an integer n >= 2, got {n!r}")
    n = int(n)
    cut = 16
    total = math.fsum(k ** (-n) for k in range(1, cut))
    tail = cut ** (1 - n) / (n - 1) + 0.5 * cut ** (-n)
    rising = float(n)  # n (n+1) ... (n + 2j - 2)
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        tail += b / fact * rising * cut ** (-n - 2 * j + 1)
        rising *= (n + 2 * j - 1) * (n + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return total + tail


def recip_gamma_one_minus(x: float) -> float:
    """``1/Gamma(1-x)`` for ``x <= 1``; exactly 0 at ``x = 1``."""
    if x > 1:
        raise ValueError("recip_gamma_one_minus is defined here for x <= 1")
    if x == 1:
        return 0.0
    return math.exp(-math.lgamma(1.0 - x))


def log_recip_gamma_series(x: float, n_terms: int = 40) -> float:
    """Truncated power series of ``log(1/Gamma(1-x))`` about 0, valid for |x| < 1."""
    return -EULER_GAMMA * x - math.fsum(zeta_int(k) * x**k / k for k in range(2, n_terms + 1))


# ---------------------------------------------------------------------------
# Bessel K0/K1, scalar kernels (compiled by numba when enabled)


@njit(cache=True)
def _k01e_series(z):
    h = 0.5 * z
    g = -cmath.log(h) - EULER_GAMMA
    q = h * h
    t0 = 1.0 + 0.0j
    t1 = 1.0 + 0.0j
    harm = 0.0
    s0 = g
    s1 = -(g + 0.5) * 0.5
    for k in range(1, SERIES_MAX_TERMS):
        harm += 1.0 / k
        t0 *= q / (k * k)
        t1 *= q / (k * (k + 1))
        a0 = t0 * (harm + g)
        a1 = -0.5 * t1 * (g + harm + 0.5 / (k + 1))
        s0 += a0
        s1 += a1
        if abs(a0) <= SERIES_RTOL * abs(s0) and abs(a1) <= SERIES_RTOL * abs(s1):
            break
    e = cmath.exp(z)
    return s0 * e, (1.0 / z + z * s1) * e


@njit(cache=True)
def _k01e_integral(z, xs, ws):
    a = abs(z)
    th = cmath.phase(z)
    c = cmath.exp(-1j * th) / a
    pre = 2.0 * cmath.exp(-0.5j * th) / math.sqrt(a)
    s0 = 0.0j
    s1 = 0.0j
    for i in range(xs.shape[0]):
        x2 = xs[i] * xs[i]
        r = cmath.sqrt(2.0 + x2 * c)
        s0 += ws[i] / r
        s1 += ws[i] * x2 * r
    return pre * s0, pre * s1


@njit(cache=True)
def _kve_asymptotic(z, mu):
    term = 1.0 + 0.0j
    s = term
    for k in range(1, 200):
        new = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        if abs(new) >= abs(term):
            break
        term = new
        s += term
        if abs(term) <= SERIES_RTOL * abs(s):
            break
    return cmath.sqrt(math.pi / (2.0 * z)) * s


@njit(cache=True)
def _integral_ok(z):
    # nearest singularity of the quadrature integrand must stay clear of the real axis
    return math.sqrt(2.0 * abs(z)) * math.cos(0.5 * cmath.phase(z)) >= 1.3


@njit(cache=True)
def _k01e_scalar(z, method, small, large, xs, ws):
    if method == METHOD_AUTO:
        a = abs(z)
        if a <= small:
            method = METHOD_SERIES
        elif a <= large:
            method = METHOD_INTEGRAL if _integral_ok(z) else METHOD_SERIES
        else:
            method = METHOD_ASYMPTOTIC
    if method == METHOD_SERIES:
        return _k01e_series(z)
    if method == METHOD_INTEGRAL:
        return _k01e_integral(z, xs, ws)
    return _kve_asymptotic(z, 0.0), _kve_asymptotic(z, 4.0)


@njit(cache=True)
def _k01e_numba(z, method, small, large, xs, ws):
    n = z.shape[0]
    k0 = np.empty(n, dtype=np.complex128)
    k1 = np.empty(n, dtype=np.complex128)
    for i in range(n):
        k0[i], k1[i] = _k01e_scalar(z[i], method, small, large, xs, ws)
    return k0, k1


# ---------------------------------------------------------------------------
# Bessel K0/K1, vectorised numpy path


def _series_np(z):
    h = 0.5 * z
    g = -np.log(h) - EULER_GAMMA
    q = h * h
    t0 = np.ones_like(z)
    t1 = np.ones_like(z)
    s0 = g.copy()
    s1 = -(g + 0.5) * 0.5
    harm = 0.0
    for k in range(1, SERIES_MAX_TERMS):
        harm += 1.0 / k
        t0 = t0 * q / (k * k)
        t1 = t1 * q / (k * (k + 1))
        a0 = t0 * (harm + g)
        a1 = -0.5 * t1 * (g + harm + 0.5 / (k + 1))
        s0 = s0 + a0
        s1 = s1 + a1
        if np.all(np.abs(a0) <= SERIES_RTOL * np.abs(s0)) and np.all(np.abs(a1) <= SERIES_RTOL * np.abs(s1)):
            break
    e = np.exp(z)
    return s0 * e, (1.0 / z + z * s1) * e


def _integral_np(z):
    a = np.abs(z)[:, None]
    th = np.angle(z)[:, None]
    c = np.exp(-1j * th) / a
    x2 = _GH_X**2
    r = np.sqrt(2.0 + x2 * c)
    pre = (2.0 * np.exp(-0.5j * th) / np.sqrt(a))[:, 0]
    return pre * (r**-1 @ _GH_W), pre * ((x2 * r) @ _GH_W)


def _asymptotic_np(z, mu):
    term = np.ones_like(z)
    s = term.copy()
    live = np.ones(z.shape, dtype=bool)
    for k in range(1, 200):
        new = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        live &= np.abs(new) < np.abs(term)
        term = np.where(live, new, term)
        s = s + np.where(live, term, 0.0)
        live &= np.abs(term) > SERIES_RTOL * np.abs(s)
        if not live.any():
            break
    return np.sqrt(np.pi / (2.0 * z)) * s


def _k01e_numpy(z, method, small, large):
    k0 = np.empty_like(z)
    k1 = np.empty_like(z)
    a = np.abs(z)
    if method == METHOD_AUTO:
        ok = np.sqrt(2.0 * a) * np.cos(0.5 * np.angle(z)) >= 1.3
        mid = (a > small) & (a <= large)
        groups = {
            METHOD_SERIES: (a <= small) | (mid & ~ok),
            METHOD_INTEGRAL: mid & ok,
            METHOD_ASYMPTOTIC: a > large,
        }
    else:
        groups = {method: np.ones(z.shape, dtype=bool)}
    for m, sel in groups.items():
        if not sel.any():
            continue
        zz = z[sel]
        if m == METHOD_SERIES:
            r0, r1 = _series_np(zz)
        elif m == METHOD_INTEGRAL:
            r0, r1 = _integral_np(zz)
        else:
            r0, r1 = _asymptotic_np(zz, 0.0), _asymptotic_np(zz, 4.0)
        k0[sel] = r0
        k1[sel] = r1
    return k0, k1


def _check_domain(z):
    bad = (z == 0) | ((z.imag == 0) & (z.real <= 0))
    if bad.any():
        raise ValueError("K0/K1 undefined at 0 and on the negative real axis (principal branch)")


def bessel_k01e(z, method: BesselEvalMethod = DEFAULT_METHOD):
    """Scaled pair ``(e^z K0(z), e^z K1(z))`` for scalar or array ``z``.

    The returned arrays are complex with the shape of ``z``.  Raises
    ``ValueError`` if any element lies on the closed negative real axis.
    """
    zz = np.asarray(z, dtype=np.complex128)
    shape = zz.shape
    flat = np.ascontiguousarray(zz.reshape(-1))
    _check_domain(flat)
    if _accel.USE_NUMBA:
        k0, k1 = _k01e_numba(flat, method.code, method.crossover_small, method.crossover_large, _GH_X, _GH_W)
    else:
        k0, k1 = _k01e_numpy(flat, method.code, method.crossover_small, method.crossover_large)
    return k0.reshape(shape), k1.reshape(shape)


def _unwrap(z, value):
    return complex(value) if np.ndim(z) == 0 else value


def bessel_k0e(z, method: BesselEvalMethod = DEFAULT_METHOD):
    return _unwrap(z, bessel_k01e(z, method)[0])


def bessel_k1e(z, method: BesselEvalMethod = DEFAULT_METHOD):
    return _unwrap(z, bessel_k01e(z, method)[1])


def bessel_k0(z, method: BesselEvalMethod = DEFAULT_METHOD):
    """K0 on the principal branch, for complex (or real positive) ``z``."""
    zz = np.asarray(z, dtype=np.complex128)
    return _unwrap(z, bessel_k01e(zz, method)[0] * np.exp(-zz))


def bessel_k1(z, method: BesselEvalMethod = DEFAULT_METHOD):
    """K1 on the principal branch; ``z K1(z) -> 1`` as ``z -> 0``."""
    zz = np.asarray(z, dtype=np.complex128)
    return _unwrap(z, bessel_k01e(zz, method)[1] * np.exp(-zz))


def heat_kernel(t: float, z) -> float:
    """Planar heat kernel ``(2 pi t)^-1 exp(-|z|^2 / 2t)``.

    ``z`` may be a 2-vector (or array of them along the last axis) or a
    complex number standing for the point ``(Re z, Im z)``.
    """
    if t <= 0:
        raise ValueError("heat_kernel needs t > 0")
    if np.iscomplexobj(z):
        r2 = np.abs(z) ** 2
    else:
        zz = np.asarray(z, dtype=float)
        r2 = np.sum(zz * zz, axis=-1) if zz.ndim else zz * zz
    return np.exp(-r2 / (2.0 * t)) / (2.0 * np.pi * t)


def heat_kernel_radial(t: float, rho):
    """Heat kernel at distance ``rho`` from the origin."""
    if t <= 0:
        raise ValueError("heat_kernel needs t > 0")
    rho = np.asarray(rho, dtype=float)
    return np.exp(-rho * rho / (2.0 * t)) / (2.0 * np.pi * t)
