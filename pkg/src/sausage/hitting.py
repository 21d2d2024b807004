"""First hitting time of the disc of radius ``r`` centred at the origin.

For a start at distance ``rho > r`` the hitting-time density ``q(rho, t; r)``
has Laplace transform ``K0(rho w) / K0(r w)``, ``w = sqrt(2 lam)``, and the
distribution function has transform ``K0(rho w) / (lam K0(r w))``.  Everything
depends on ``|z|`` only and obeys ``q(rho, t; r) = q(rho/r, t/r^2; 1) / r^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .inversion import DEFAULT_CONFIG, InversionConfig, InversionError, talbot_invert
from .specfun import EULER_GAMMA, KAPPA, bessel_k01e, heat_kernel_radial

# c with q(z,t) <= c p_{t+1}(z) on |z| in [2, 50], t in [2, 1e3]: the maximum
# of q / p_{t+1} over a 25 x 25 log grid is 6.319 at |z| = 3.91, t = 2.
DENSITY_BOUND_CONSTANT = 6.4


@dataclass(frozen=True)
class HittingQuery:
    rho: float
    t: float
    r: float = 1.0

    def __post_init__(self):
        rho = self.rho
        if np.ndim(rho):
            rho = float(np.hypot(*np.asarray(rho, dtype=float)))
        elif isinstance(rho, complex):
            rho = abs(rho)
        object.__setattr__(self, "rho", float(rho))
        if not (self.r > 0 and self.t > 0):
            raise ValueError("t and r must be positive")
        if not self.rho > self.r:
            raise ValueError("the start must lie strictly outside the disc (rho > r)")


def _ratio_transform(rho, r, scale_by_lam=False):
    """K0(rho w)/K0(r w) without its factor exp(-(rho - r) w)."""

    def F(lam):
        w = np.sqrt(2.0 * np.asarray(lam, dtype=complex))
        out = bessel_k01e(rho * w)[0] / bessel_k01e(r * w)[0]
        return out / lam if scale_by_lam else out

    return F


def _decay(rho, r):
    return lambda lam: -(rho - r) * np.sqrt(2.0 * np.asarray(lam, dtype=complex))


def _contour_scale(query, cfg):
    # push the contour out to the saddle of exp(lam t - (rho - r) sqrt(2 lam))
    a = query.rho - query.r
    saddle = a * a / (2.0 * query.t**2)
    return cfg.t_scale * max(1.0, saddle / (2.0 * cfg.nodes / (5.0 * query.t)))


def _invert(query, cfg, cdf=False):
    return talbot_invert(
        _ratio_transform(query.rho, query.r, cdf),
        query.t,
        cfg.nodes,
        _contour_scale(query, cfg),
        exponent=_decay(query.rho, query.r),
    )


def q_exact(query: HittingQuery, cfg: InversionConfig | None = None) -> float:
    """Hitting-time density q(rho, t; r) by fixed-Talbot inversion.

    For starts far outside the diffusive range the contour is enlarged to
    pass near the saddle point, which keeps the relative accuracy even when
    q is astronomically small.
    """
    cfg = cfg or DEFAULT_CONFIG
    res = _invert(query, cfg)
    scale = 1.0 / query.t  # q is of order 1/t at most
    if not res.error_estimate <= max(cfg.tol * abs(res.value), 1e-8 * scale):
        raise InversionError(
            f"q_exact(rho={query.rho}, t={query.t}): error estimate {res.error_estimate:.3g}",
            achieved=res.error_estimate,
        )
    return res.value


def hitting_cdf(query: HittingQuery, cfg: InversionConfig | None = None) -> float:
    """P_z[sigma < t] by inversion of K0(rho w) / (lam K0(r w))."""
    cfg = cfg or DEFAULT_CONFIG
    return _invert(query, cfg, cdf=True).value


class Regime(enum.Enum):
    BULK = "bulk"  # |z|^2 < 4 t log log t: explicit main term plus small error
    FAR = "far"  # |z|^2 >= 4 t log log t: q itself is O(1/(t (log t)^3))


@dataclass(frozen=True)
class QAsymptotic:
    """Large-time form of the hitting density.

    ``value = main + correction``; ``correction`` is the ``2 gamma`` term,
    present only when ``|z|^2 < t``.  ``error_scale`` is the order of the
    neglected remainder in the unit-radius frame, rescaled.
    """

    value: float
    main: float
    correction: float
    regime: Regime
    error_scale: float


def q_asymptotic(query: HittingQuery) -> QAsymptotic:
    """Explicit large-t approximation of q(rho, t; r)."""
    T = query.t / query.r**2
    z = query.rho / query.r
    if not KAPPA * T > 1.0 or T <= math.e:
        raise ValueError("asymptotic form needs log(kappa t / r^2) > 0 and log log(t / r^2) > 0")
    z2 = z * z
    L = math.log(T)
    main = math.log(0.5 * KAPPA * z2) / (math.log(KAPPA * T) ** 2 * T) * math.exp(-z2 / (2.0 * T))
    corr = 2.0 * EULER_GAMMA * math.log(T / z2) / (T * L**3) if z2 < T else 0.0
    if z2 < 4.0 * T * math.log(L):
        regime = Regime.BULK
        err = abs(math.log(max(T / z2, 2.0))) / (T * L**3)
    else:
        regime = Regime.FAR
        err = 1.0 / (T * L**3)
    s = 1.0 / query.r**2
    return QAsymptotic(value=s * (main + corr), main=s * main, correction=s * corr, regime=regime, error_scale=s * err)


def check_density_bound(query: HittingQuery, c: float = DENSITY_BOUND_CONSTANT, cfg=None) -> bool:
    """Whether q(z, t) <= c p_{t+1}(z) (unit disc, |z| > 1, t > 1)."""
    if query.r != 1.0 or query.t <= 1.0:
        raise ValueError("the density bound is stated for r = 1 and t > 1")
    return q_exact(query, cfg) <= c * float(heat_kernel_radial(query.t + 1.0, query.rho))


def density_bound_ratio(query: HittingQuery, shift: float = 1.0, cfg=None) -> float:
    """q(z, t) / p_{t+shift}(z)."""
    return q_exact(query, cfg) / float(heat_kernel_radial(query.t + shift, query.rho))


def hitting_cdf_bound(query: HittingQuery) -> float:
    """sqrt(2e/pi) min(sqrt(t)/(|z|-1), 1) exp(-(|z|-1)^2 / 2t), in the unit-radius frame."""
    T = query.t / query.r**2
    d = query.rho / query.r - 1.0
    return math.sqrt(2.0 * math.e / math.pi) * min(math.sqrt(T) / d, 1.0) * math.exp(-d * d / (2.0 * T))


def rate_from_density(t: float, cfg: InversionConfig | None = None) -> float:
    """2 pi int_1^inf q(rho, t) rho d rho for the unit disc (equals m(t;1))."""
    f = lambda rho: q_exact(HittingQuery(rho, t), cfg) * rho if rho > 1.0 else 0.0
    hi = 1.0 + 40.0 * math.sqrt(t)
    edges = [1.0, 1.0 + 0.1 * math.sqrt(t), 1.0 + math.sqrt(t), 1.0 + 4 * math.sqrt(t), hi]
    total = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-9, limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
    return 2.0 * math.pi * total
