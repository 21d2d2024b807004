"""Laplace inversion of the sausage transforms and the theory evaluators.

The growth rate ``m(t) = d/dt E[Area(S_t)]`` of the unit-radius sausage has
Laplace transform

    F_m(lam) = 2 pi K1(w) / (w K0(w)),   w = sqrt(2 lam),

and ``2 pi N(kappa t)`` inverts ``2 pi kappa^-1 b(lam/kappa)`` with
``b(z) = 1/(z-1) - 1/(z log z)``.  The difference of the two transforms,
divided by ``2 pi``, is ``phi``; it is analytic off the negative real axis
(the apparent pole at ``kappa`` cancels) and the correction
``m - 2 pi N(kappa t)`` is its Fourier integral along the imaginary axis.

Two independent inversions are provided:

``talbot``
    fixed Talbot contour applied to the full transform,
``fourier``
    ``2 pi N(kappa t)`` by quadrature plus ``2 Re int_0^inf phi(iu) e^{itu} du``
    with the slowly decaying part of ``phi`` integrated in closed form.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .ramanujan import n_direct
from .specfun import EULER_GAMMA, KAPPA, bessel_k01e, heat_kernel_radial

TWO_PI = 2.0 * math.pi


class InversionError(RuntimeError):
    """Inversion did not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InversionMethod(enum.Enum):
    TALBOT_FIXED = "talbot"
    FOURIER_CORRECTION = "fourier"


@dataclass(frozen=True)
class InversionConfig:
    """Contour and quadrature parameters.

    Parameters
    ----------
    method : InversionMethod or str
    nodes : int
        Talbot node count.  In double precision about 24 is optimal; more
        nodes only add roundoff from the ``exp(r t)`` growth.
    t_scale : float
        Multiplier on the Talbot contour radius ``2 nodes / (5 t)``.
    tail_cut : float
        Fourier route: the integral splits at ``U = tail_cut / max(t, 1)``.
    tol : float
        Relative error estimate above which :class:`InversionError` is raised.
    """

    method: InversionMethod = InversionMethod.TALBOT_FIXED
    nodes: int = 24
    t_scale: float = 1.0
    tail_cut: float = 1.0
    tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "method", InversionMethod(self.method))
        if int(self.nodes) != self.nodes or self.nodes < 16:
            raise ValueError("nodes must be an integer >= 16")
        if not (self.tol > 0 and self.t_scale > 0 and self.tail_cut > 0):
            raise ValueError("tol, t_scale and tail_cut must be positive")


DEFAULT_CONFIG = InversionConfig()


# ----------------------------------------------------------------------------
# Fixed Talbot
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TalbotResult:
    value: float
    error_estimate: float
    imag_residue: float = 0.0


def _talbot_sum(F, t, nodes, t_scale, two_sided=False, exponent=None):
    r = 2.0 * nodes / (5.0 * t) * t_scale
    theta = np.arange(1, nodes) * (math.pi / nodes)
    cot = 1.0 / np.tan(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    ex = (lambda z: np.zeros(np.shape(z))) if exponent is None else exponent
    apex = np.array([r + 0j])
    f0 = complex(np.asarray(F(apex))[0] * np.exp(r * t + ex(apex))[0])
    terms = np.exp(t * s + ex(s)) * np.asarray(F(s)) * (1.0 + 1j * sigma)
    value = (r / nodes) * (0.5 * f0.real + np.sum(terms.real))
    if not two_sided:
        return value, 0.0
    # the lower half of the contour, evaluated independently
    sc = np.conj(s)
    lower = np.exp(t * sc + ex(sc)) * np.asarray(F(sc)) * (1.0 - 1j * sigma)
    full = (r / (2 * nodes)) * (f0 + np.sum(terms) + np.sum(lower))
    return value, abs(full.imag)


def talbot_invert(
    F, t: float, nodes: int = 24, t_scale: float = 1.0, check_imag: bool = False, exponent=None
) -> TalbotResult:
    """Invert the Laplace transform ``F`` at ``t > 0`` on the fixed Talbot contour.

    ``F`` must accept a complex array.  A transform of the form
    ``exp(E(lam)) F(lam)`` may pass ``E`` as ``exponent``; it is added to
    ``lam t`` before exponentiating, so neither factor over- or underflows.
    The error estimate is the change when the node count drops by 8.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    value, imag = _talbot_sum(F, t, nodes, t_scale, two_sided=check_imag, exponent=exponent)
    coarse, _ = _talbot_sum(F, t, nodes - 8, t_scale, exponent=exponent)
    return TalbotResult(value=value, error_estimate=abs(value - coarse), imag_residue=imag)


# ----------------------------------------------------------------------------
# Transforms
# ----------------------------------------------------------------------------

def rate_transform(lam):
    """2 pi K1(w) / (w K0(w)), w = sqrt(2 lam)."""
    w = np.sqrt(2.0 * np.asarray(lam, dtype=complex))
    k0, k1 = bessel_k01e(w)
    return TWO_PI * k1 / (k0 * w)


def f0_transform(lam):
    """-K0(w) + K1(w)^2 / K0(w), w = sqrt(2 lam)."""
    w = np.sqrt(2.0 * np.asarray(lam, dtype=complex))
    k0, k1 = bessel_k01e(w)
    return np.exp(-w) * (k1 * k1 / k0 - k0)


def n_transform(lam):
    """Laplace transform of N(kappa t): kappa^-1 (1/(z-1) - 1/(z log z)), z = lam/kappa."""
    return _bracket(np.asarray(lam, dtype=complex) / KAPPA) / KAPPA


# Taylor coefficients of 1/e - 1/((1+e) log(1+e)) in powers of e
_BRACKET_TAYLOR = np.array([1 / 2, -5 / 12, 3 / 8, -251 / 720, 95 / 288, -19087 / 60480, 5257 / 17280])
_NEAR_KAPPA = 1e-3
_SMALL_Z = 0.25


def _bracket(zeta):
    zeta = np.asarray(zeta, dtype=complex)
    e = zeta - 1.0
    near = np.abs(e) < _NEAR_KAPPA
    out = np.empty_like(zeta)
    far = ~near
    zf = zeta[far]
    out[far] = 1.0 / (zf - 1.0) - 1.0 / (zf * np.log(zf))
    out[near] = np.polynomial.polynomial.polyval(e[near], _BRACKET_TAYLOR)
    return out


def _phi_small(z):
    """phi for small |z| via the K0/K1 ascending series, arranged so that the
    1/z poles cancel analytically."""
    q = z / 2.0
    g = -0.5 * np.log(z / KAPPA)
    a0m = np.zeros_like(z)  # (1 - A0) / (2z)
    b0 = np.zeros_like(z)  # B0 / (2z)
    a1 = np.zeros_like(z)
    b1 = np.zeros_like(z)
    qk = np.ones_like(z)  # q^k
    fk = 1.0  # k!
    h = 0.0  # H_k
    for k in range(0, 40):
        if k > 0:
            fk *= k
            h += 1.0 / k
        c0 = 1.0 / (fk * fk)
        c1 = 1.0 / (fk * fk * (k + 1))
        a1 = a1 + qk * c1
        b1 = b1 + qk * c1 * (h + 0.5 / (k + 1))
        if k >= 1:
            a0m = a0m - 0.25 * qkm1 * c0
            b0 = b0 + 0.25 * qkm1 * c0 * h
        qkm1 = qk
        qk = qk * q
        if np.all(np.abs(qk) * c0 < 1e-18):
            break
    num = g * a0m - b0 - 0.5 * g * (g * a1 + b1)
    den = g * (g * (1.0 + 2.0 * z * (-a0m)) + 2.0 * z * b0)  # g (g A0 + B0)
    return num / den - 1.0 / (z - KAPPA)


def phi(z):
    """The correction transform

        phi(z) = K1(w)/(w K0(w)) - kappa^-1 [1/(z/kappa - 1) - 1/((z/kappa) log(z/kappa))],

    ``w = sqrt(2z)``, on the plane slit along the closed negative real axis.

    ``phi(0) = 1/kappa - 1/2`` is the continuous extension at the origin.
    Near ``z = kappa`` the bracket is replaced by its Taylor series.
    """
    zz = np.asarray(z, dtype=complex)
    flat = zz.reshape(-1)
    if np.any((flat.imag == 0) & (flat.real < 0)):
        raise ValueError("phi is undefined on the negative real axis")
    out = np.empty_like(flat)
    zero = flat == 0
    small = (np.abs(flat) <= _SMALL_Z) & ~zero
    big = ~(small | zero)
    out[zero] = 1.0 / KAPPA - 0.5
    if small.any():
        out[small] = _phi_small(flat[small])
    if big.any():
        zb = flat[big]
        out[big] = rate_transform(zb) / TWO_PI - n_transform(zb)
    out = out.reshape(zz.shape)
    return complex(out) if np.ndim(z) == 0 else out


def phi_large_u(u):
    """Three-term behaviour of phi(iu) for large u:
    1/sqrt(2iu) - 3/(4iu) + 1/(iu log(iu/kappa))."""
    z = 1j * np.asarray(u, dtype=complex)
    return 1.0 / np.sqrt(2.0 * z) - 0.75 / z + 1.0 / (z * np.log(z / KAPPA))


# ----------------------------------------------------------------------------
# Fourier route for the correction
# ----------------------------------------------------------------------------

_QAW = dict(limit=2000, epsabs=1e-14, epsrel=1e-12)


def _fourier_re(f, t, a, b):
    """Re int_a^b f(u) e^{itu} du for complex-valued f (b may be inf)."""
    fr = lambda u: complex(f(u)).real
    fi = lambda u: complex(f(u)).imag
    if math.isinf(b):
        c, ec = integrate.quad(fr, a, b, weight="cos", wvar=t, limlst=200, epsabs=1e-14)[:2]
        s, es = integrate.quad(fi, a, b, weight="sin", wvar=t, limlst=200, epsabs=1e-14)[:2]
    else:
        c, ec = integrate.quad(fr, a, b, weight="cos", wvar=t, **_QAW)[:2]
        s, es = integrate.quad(fi, a, b, weight="sin", wvar=t, **_QAW)[:2]
    return c - s, ec + es


def _ray(g, t):
    """int_0^inf g(y) dy for a complex integrand decaying like exp(-t y)."""
    scale = 1.0 / t
    out, err = 0j, 0.0
    for a, b in ((0.0, 4 * scale), (4 * scale, 40 * scale), (40 * scale, 800 * scale)):
        re = integrate.quad(lambda y: g(y).real, a, b, **_QAW)
        im = integrate.quad(lambda y: g(y).imag, a, b, **_QAW)
        out += complex(re[0], im[0])
        err += re[1] + im[1]
    return out, err


def correction_fourier(t: float, tail_cut: float = 1.0):
    """``m(t) - 2 pi N(kappa t) = 2 Re int_0^inf phi(iu) e^{itu} du``.

    The integral is split at ``U``.  On ``[U, inf)`` the three explicit
    large-u terms of ``phi`` are integrated exactly:

    * ``1/sqrt(2iu)`` through Fresnel integrals,
    * ``1/(iu)`` through the sine and cosine integrals,
    * ``1/(iu log(iu/kappa))`` along the ray ``u = U + iy`` (Cauchy),

    and the remainder, ``O(u^{-3/2})``, numerically.  Returns
    ``(value, error_estimate)``.
    """
    U = tail_cut / max(t, 1.0)
    f = lambda u: phi(1j * u)
    head, e_head = _fourier_re(f, t, 0.0, U)

    S, C = special.fresnel(math.sqrt(2.0 * t * U / math.pi))
    i_half = (2j) ** -0.5 * math.sqrt(TWO_PI / t) * ((0.5 - C) + 1j * (0.5 - S))
    si, ci = special.sici(t * U)
    i_inv = 1j * ci + (math.pi / 2 - si)
    g = lambda y: cmath.exp(-t * y) / ((U + 1j * y) * cmath.log((1j * U - y) / KAPPA))
    i_log, e_log = _ray(g, t)
    i_log *= cmath.exp(1j * t * U)
    # remainder O(u^-3/2): also along the ray u = U + iy, where e^{itu} = e^{itU} e^{-ty}
    rem_f = lambda y: cmath.exp(-t * y) * (complex(phi(1j * (U + 1j * y))) - complex(phi_large_u(U + 1j * y)))
    rem, e_rem = _ray(rem_f, t)
    rem = (1j * cmath.exp(1j * t * U) * rem).real

    total = head + (i_half - 0.75 * i_inv + i_log).real + rem
    err = e_head + e_rem + e_log
    return 2.0 * total, 2.0 * err


# ----------------------------------------------------------------------------
# Growth rate and areas
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class RateResult:
    """``m = leading + correction`` with ``leading = 2 pi N(kappa t)``."""

    t: float
    m: float
    leading: float
    correction: float
    method: InversionMethod
    error_estimate: float = 0.0


def _resolve(cfg):
    if cfg is None:
        return DEFAULT_CONFIG
    if isinstance(cfg, (str, InversionMethod)):
        return InversionConfig(method=cfg)
    return cfg


def rate_m(t: float, cfg: InversionConfig | None = None) -> RateResult:
    """Growth rate ``m(t;1)`` of the expected unit-radius sausage area."""
    cfg = _resolve(cfg)
    if not t > 0:
        raise ValueError("t must be positive")
    leading = TWO_PI * n_direct(KAPPA * t)
    if cfg.method is InversionMethod.TALBOT_FIXED:
        res = talbot_invert(rate_transform, t, cfg.nodes, cfg.t_scale)
        m, err = res.value, res.error_estimate
        correction = m - leading
    else:
        correction, err = correction_fourier(t, cfg.tail_cut)
        m = leading + correction
    if not err <= cfg.tol * abs(m):
        raise InversionError(f"rate_m({t}): error estimate {err:.3g} exceeds tol", achieved=err)
    return RateResult(t=float(t), m=m, leading=leading, correction=correction, method=cfg.method, error_estimate=err)


def rate_m_scaled(t: float, r: float, cfg: InversionConfig | None = None) -> float:
    """m(t; r) = m(t / r^2; 1)."""
    if not (t > 0 and r > 0):
        raise ValueError("t and r must be positive")
    return rate_m(t / (r * r), cfg).m


def small_t_rate(t: float) -> float:
    """sqrt(2 pi / t) + (pi/2) e^{-t}, the short-time form of m(t;1)."""
    if not 0 < t <= 1:
        raise ValueError("small_t_rate needs 0 < t <= 1")
    return math.sqrt(TWO_PI / t) + 0.5 * math.pi * math.exp(-t)


def _rate_minus_singular(u, cfg):
    return rate_m(u, cfg).m - math.sqrt(TWO_PI / u)


def free_area_theory(t: float, r: float = 1.0, cfg: InversionConfig | None = None) -> float:
    """E[Area(S_t^{(r)})] = pi r^2 + r^2 int_0^{t/r^2} m(u;1) du.

    The ``sqrt(2 pi / u)`` singularity of ``m`` at 0 is integrated exactly;
    the bounded remainder is integrated adaptively (in ``log u`` beyond 1).
    """
    cfg = _resolve(cfg)
    if not (t > 0 and r > 0):
        raise ValueError("t and r must be positive")
    T = t / (r * r)
    total = 2.0 * math.sqrt(TWO_PI * T)
    opts = dict(epsabs=1e-10, epsrel=1e-10, limit=200)
    total += integrate.quad(_rate_minus_singular, 0.0, min(T, 1.0), args=(cfg,), **opts)[0]
    if T > 1.0:
        f = lambda s: _rate_minus_singular(math.exp(s), cfg) * math.exp(s)
        total += integrate.quad(f, 0.0, math.log(T), **opts)[0]
    return r * r * (math.pi + total)


def free_area_talbot(t: float, r: float = 1.0, nodes: int = 24) -> float:
    """Same quantity from one inversion of ``(pi + F_m(lam)) / lam``."""
    T = t / (r * r)
    res = talbot_invert(lambda lam: (math.pi + rate_transform(lam)) / lam, T, nodes)
    return r * r * res.value


def f0_zero(t: float, cfg: InversionConfig | None = None) -> float:
    """F0(t, 0): inverse Laplace transform of ``-K0(w) + K1(w)^2/K0(w)``."""
    cfg = _resolve(cfg)
    res = talbot_invert(f0_transform, t, cfg.nodes, cfg.t_scale)
    if not res.error_estimate <= max(cfg.tol * abs(res.value), 1e-14):
        raise InversionError(f"f0_zero({t}): error estimate {res.error_estimate:.3g}", achieved=res.error_estimate)
    return res.value


def f0_residual(t: float, cfg: InversionConfig | None = None) -> float:
    """F0(t,0) - N(kappa t) + pi p_t(1)."""
    return f0_zero(t, cfg) - n_direct(KAPPA * t) + math.pi * float(heat_kernel_radial(t, 1.0))


def bridge_area_f0(t: float, r: float = 1.0, cfg: InversionConfig | None = None) -> float:
    """E[Area | B_t = 0] with F(t,0;1) replaced by F0(t,0): r^2 (2 pi T F0(T,0) + pi), T = t/r^2.

    The replacement costs ``O(1)`` in area.
    """
    T = t / (r * r)
    return r * r * (TWO_PI * T * f0_zero(T, cfg) + math.pi)


def bridge_exact_transform(lam, n_terms: int = 30):
    """Laplace transform of F(t, 0; 1), summed over angular modes.

    Expanding the resolvent kernel with Graf's addition theorem and the
    killed harmonic measure of the unit disc in Fourier modes gives

        sum_{n in Z} (I_n(w) / K_n(w)) [K_{n-1}(w) K_{n+1}(w) - K_n(w)^2],

    ``w = sqrt(2 lam)``.  The ``n = 0`` term with ``I_0`` replaced by 1 is the
    transform of F0.  Terms are evaluated in exponentially scaled form.
    """
    w = np.sqrt(2.0 * np.asarray(lam, dtype=complex))
    k = [special.kve(n, w) for n in range(n_terms + 2)]
    total = special.ive(0, w) / k[0] * (k[1] * k[1] - k[0] * k[0])
    with np.errstate(all="ignore"):
        for n in range(1, n_terms + 1):
            term = 2.0 * special.ive(n, w) / k[n] * (k[n - 1] * k[n + 1] - k[n] * k[n])
            total = total + np.where(np.isfinite(term), term, 0.0)
    return total * np.exp(w.real - w)


def bridge_area_exact(t: float, r: float = 1.0, cfg: InversionConfig | None = None) -> float:
    """E[Area(S_t^{(r)}) | B_t = 0] from the full mode sum (no O(1) truncation)."""
    cfg = _resolve(cfg)
    if not (t > 0 and r > 0):
        raise ValueError("t and r must be positive")
    T = t / (r * r)
    res = talbot_invert(bridge_exact_transform, T, cfg.nodes, cfg.t_scale)
    return r * r * (TWO_PI * T * res.value + math.pi)


BRIDGE_M_DEFAULT = 4.0


@dataclass(frozen=True)
class BridgePrediction:
    value: float
    leading: float
    second: float
    uncertainty: float


def bridge_area_prediction(t: float, x, r: float = 1.0, M: float = BRIDGE_M_DEFAULT) -> BridgePrediction:
    """Explicit terms of the conditional sausage area given ``B_t = x``.

    Computed in the unit-radius frame ``T = t/r^2, y = x/r`` and rescaled::

        r^2 [2 pi T N(kappa T) + pi y^2 / (log T)^2 * log(T / max(y^2, 1))]

    The unknown ``O(1)`` terms are dropped; ``uncertainty`` is
    ``r^2 pi y^2 / (log T)^2`` (the size of the unknown constant in the second
    term) and excludes the additive ``O(1)``.
    """
    if not (t > 0 and r > 0):
        raise ValueError("t and r must be positive")
    x2 = float(np.sum(np.square(np.asarray(x, dtype=float)))) if np.ndim(x) else float(x) ** 2
    T, y2 = t / (r * r), x2 / (r * r)
    if T <= math.e:
        raise ValueError("need t / r^2 > e")
    if y2 > M * M * T:
        raise ValueError(f"|x| = {math.sqrt(x2):g} exceeds M sqrt(t) with M = {M:g}")
    L = math.log(T)
    leading = TWO_PI * T * n_direct(KAPPA * T)
    band = math.pi * y2 / (L * L)
    second = band * math.log(T / max(y2, 1.0))
    s = r * r
    return BridgePrediction(value=s * (leading + second), leading=s * leading, second=s * second, uncertainty=s * band)


def bridge_area_theory(t: float, x, r: float = 1.0, M: float = BRIDGE_M_DEFAULT) -> float:
    """Leading-order prediction of E[Area(S_t^{(r)}) | B_t = x]; see :func:`bridge_area_prediction`."""
    return bridge_area_prediction(t, x, r, M).value


def large_t_correction(t: float) -> float:
    """4 pi / (t (log t)^3), the stated large-time size of m(t;1) - 2 pi N(kappa t)."""
    L = math.log(t)
    return 4.0 * math.pi / (t * L**3)


__all__ = [
    "EULER_GAMMA",
    "KAPPA",
    "InversionConfig",
    "InversionError",
    "InversionMethod",
    "RateResult",
    "TalbotResult",
    "bridge_area_exact",
    "bridge_area_f0",
    "bridge_exact_transform",
    "bridge_area_prediction",
    "bridge_area_theory",
    "correction_fourier",
    "f0_residual",
    "f0_transform",
    "f0_zero",
    "free_area_talbot",
    "free_area_theory",
    "large_t_correction",
    "n_transform",
    "phi",
    "phi_large_u",
    "rate_m",
    "rate_m_scaled",
    "rate_transform",
    "small_t_rate",
    "talbot_invert",
]
