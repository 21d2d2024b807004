"""Ramanujan's function

    N(lam) = int_0^inf exp(-lam u) / ((log u)^2 + pi^2) du / u,   lam >= 0,

its derivative, its running integral and Bouwkamp's certified representation.

Every quadrature here works on the line ``v = log u``, where the integrand is
``exp(-lam e^v) / (v^2 + pi^2)``: algebraic decay to the left, double
exponential decay to the right.  The left tail beyond ``v* - 40`` (``v* =
-log lam``) is integrated in closed form through ``arctan``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

PI2 = math.pi**2
_LEFT = 40.0  # exp(-40) ~ 4e-18
_RIGHT = 4.5  # exp(-e^4.5) ~ 1e-39
_QUAD = dict(epsabs=1e-16, epsrel=1e-13, limit=400)

BOUWKAMP_S_FLOOR = 0.5
BOUWKAMP_S_CAP = 60.0


class NMethod(enum.Enum):
    DIRECT_QUADRATURE = "direct"
    BOUWKAMP = "bouwkamp"
    EXPANSION = "expansion"


@dataclass(frozen=True)
class NEvalReport:
    value: float
    method: NMethod
    error_bound: float
    s: float | None = None

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")


def _arctan_tail(a: float) -> float:
    """int_{-inf}^a dv / (v^2 + pi^2)."""
    return 0.5 + math.atan(a / math.pi) / math.pi


def _check_lambda(lam, strict=False):
    if not np.isfinite(lam) or lam < 0 or (strict and lam == 0):
        raise ValueError(f"lambda must be {'positive' if strict else 'nonnegative'}, got {lam!r}")


def n_direct(lam: float) -> float:
    """N(lam) by quadrature, absolute accuracy ~1e-14."""
    _check_lambda(lam)
    if lam == 0:
        return 1.0
    c = -math.log(lam)
    # N = int_{-inf}^{c} dv/(v^2+pi^2) + int_{-inf}^{c} expm1(-lam e^v)/(v^2+pi^2) dv
    #     + int_c^inf exp(-lam e^v)/(v^2+pi^2) dv
    # lam e^v is written exp(v - c) so that subnormal lam cannot overflow e^v
    left = integrate.quad(lambda v: math.expm1(-math.exp(v - c)) / (v * v + PI2), c - _LEFT, c, **_QUAD)[0]
    right = integrate.quad(lambda v: math.exp(-math.exp(v - c)) / (v * v + PI2), c, c + _RIGHT, **_QUAD)[0]
    return _arctan_tail(c) + left + right


def n_prime(lam: float) -> float:
    """N'(lam) = -int_0^inf exp(-lam u) / ((log u)^2 + pi^2) du  (always negative)."""
    _check_lambda(lam, strict=True)
    c = -math.log(lam)
    f = lambda v: math.exp(v - c - math.exp(v - c)) / (v * v + PI2)
    total = integrate.quad(f, c - _LEFT, c, **_QUAD)[0] + integrate.quad(f, c, c + _RIGHT, **_QUAD)[0]
    return -total / lam


def n_laplace_closed_form(lam: float) -> float:
    """int_0^inf N(t) e^{-lam t} dt = 1/(lam - 1) - 1/(lam log lam)."""
    if not lam > 0 or lam == 1:
        raise ValueError("closed form needs lam > 0 and lam != 1 (removable point)")
    return 1.0 / (lam - 1.0) - 1.0 / (lam * math.log(lam))


def n_running_integral(t: float, alpha: float) -> float:
    """int_0^t N(alpha s) ds.

    Uses Fubini: with ``L = alpha t``,
    ``int_0^L N = int (1 - exp(-L e^v)) e^{-v} / (v^2 + pi^2) dv``,
    a single smooth integral (integrand -> L/(v^2+pi^2) on the left).
    """
    if not (t > 0 and alpha > 0):
        raise ValueError("n_running_integral needs t > 0 and alpha > 0")
    big = alpha * t
    c = -math.log(big)

    def f(v):
        y = math.exp(v - c)
        h = -math.expm1(-y) / y if y > 1e-300 else 1.0
        return (h - 1.0) / (v * v + PI2)

    # int big*h(big e^v)/(v^2+pi^2): split off the h == 1 part on the left
    left = big * (_arctan_tail(c) + integrate.quad(f, c - _LEFT, c, **_QUAD)[0])
    right = integrate.quad(
        lambda v: -math.expm1(-math.exp(v - c)) * big * math.exp(c - v) / (v * v + PI2), c, c + 80.0, **_QUAD
    )[0]
    return (left + right) / alpha


def bouwkamp_optimal_s(lam: float) -> float:
    """Minimiser of Gamma(s) lam^-s, i.e. the root of digamma(s) = log lam, clipped to [0.5, 60]."""
    target = math.log(lam)
    lo, hi = BOUWKAMP_S_FLOOR, BOUWKAMP_S_CAP
    if special.digamma(lo) >= target:
        return lo
    if special.digamma(hi) <= target:
        return hi
    return optimize.brentq(lambda s: special.digamma(s) - target, lo, hi, xtol=1e-12)


def n_bouwkamp(lam: float, s: float | str = "auto") -> NEvalReport:
    """N(lam) = int_0^s lam^-x / Gamma(1-x) dx + theta Gamma(s) / (pi^2 lam^s), |theta| <= 1."""
    if not lam > 1:
        raise ValueError("Bouwkamp's representation needs lam > 1")
    if s == "auto":
        s = bouwkamp_optimal_s(lam)
    s = float(s)
    if not s > 0:
        raise ValueError("s must be positive")
    loglam = math.log(lam)
    f = lambda x: special.rgamma(1.0 - x) * math.exp(-x * loglam)
    zeros = [float(k) for k in range(1, int(math.ceil(s)))]
    value = integrate.quad(f, 0.0, s, points=zeros or None, epsabs=1e-15, epsrel=1e-13, limit=400)[0]
    bound = math.exp(math.lgamma(s) - s * loglam) / PI2
    return NEvalReport(value=value, method=NMethod.BOUWKAMP, error_bound=bound, s=s)

