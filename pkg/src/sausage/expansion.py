"""Asymptotic expansions of N(alpha t) in inverse powers of ``log t``.

Coefficient convention
----------------------
The generating functions are

    1 / (Gamma(1-x) alpha^x)           = sum_n a_n(alpha) x^n / n!
    1 / ((1-x) Gamma(1-x) alpha^x)     = sum_n b_n(alpha) x^n / n!

and the asymptotic series use ``a_n`` and ``b_n`` themselves (not divided by
``n!``)::

    N(alpha t)                    ~ (1/L)       sum a_n / L^n
    int_0^t N(alpha s) ds         ~ (t/L)       sum b_n / L^n
    int_0^t -alpha s N'(alpha s)  ~ (t/L^2)     sum (n+1) b_n / L^n

with ``L = log t``.  Both generating functions are exponentials of explicit
power series built from the Weierstrass product of ``1/Gamma``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .specfun import EULER_GAMMA, zeta_int

N_MAX_CAP = 30


@dataclass(frozen=True)
class PowerSeries:
    """Truncated formal power series ``sum_n coeffs[n] x^n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ValueError("a power series needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order) + 1
        return PowerSeries(self.coeffs[:n] + other.coeffs[:n])

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order) + 1
        return PowerSeries(np.convolve(self.coeffs[:n], other.coeffs[:n])[:n])

    def derivative(self) -> "PowerSeries":
        if self.order == 0:
            return PowerSeries([0.0])
        return PowerSeries(self.coeffs[1:] * np.arange(1, self.order + 1))

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)


def series_exp(p: PowerSeries) -> PowerSeries:
    """exp(p) to the order of ``p``; needs ``p[0] == 0``.

    With ``E = exp(p)``, ``E' = p' E`` gives
    ``n E_n = sum_{k=1}^n k p_k E_{n-k}``.
    """
    c = p.coeffs
    if c[0] != 0.0:
        raise ValueError("series_exp needs a zero constant term")
    e = np.zeros_like(c)
    e[0] = 1.0
    k = np.arange(c.size)
    for n in range(1, c.size):
        e[n] = np.dot(k[1 : n + 1] * c[1 : n + 1], e[n - 1 :: -1][:n]) / n
    return PowerSeries(e)


def series_log(p: PowerSeries) -> PowerSeries:
    """log(p) to the order of ``p``; needs ``p[0] == 1``.

    Inverse of :func:`series_exp`: ``n L_n = n p_n - sum_{k=1}^{n-1} k L_k p_{n-k}``.
    """
    c = p.coeffs
    if c[0] != 1.0:
        raise ValueError("series_log needs a unit constant term")
    out = np.zeros_like(c)
    for n in range(1, c.size):
        acc = n * c[n]
        for k in range(1, n):
            acc -= k * out[k] * c[n - k]
        out[n] = acc / n
    return PowerSeries(out)


@dataclass(frozen=True)
class ExpansionCoefficients:
    alpha: float
    a: np.ndarray
    b: np.ndarray
    n_max: int


def _check(alpha, n_max):
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not (0 <= int(n_max) <= N_MAX_CAP) or int(n_max) != n_max:
        raise ValueError(f"n_max must be an integer in [0, {N_MAX_CAP}]")


def _factorials(n_max):
    return np.array([math.factorial(n) for n in range(n_max + 1)], dtype=float)


def a_coeffs(alpha: float, n_max: int) -> np.ndarray:
    """a_n(alpha) for n = 0..n_max.

    ``a_n = n! [x^n] exp(-(gamma + log alpha) x - sum_{k>=2} zeta(k) x^k / k)``.
    """
    _check(alpha, n_max)
    p = np.zeros(n_max + 1)
    if n_max >= 1:
        p[1] = -(EULER_GAMMA + math.log(alpha))
    for k in range(2, n_max + 1):
        p[k] = -zeta_int(k) / k
    return series_exp(PowerSeries(p)).coeffs * _factorials(n_max)


def b_coeffs(alpha: float, n_max: int) -> np.ndarray:
    """b_n(alpha) for n = 0..n_max.

    Folding ``1/(1-x) = exp(sum x^k/k)`` into the exponent gives
    ``b_n = n! [x^n] exp((1 - gamma - log alpha) x - sum_{k>=2} (zeta(k)-1) x^k / k)``.
    """
    _check(alpha, n_max)
    p = np.zeros(n_max + 1)
    if n_max >= 1:
        p[1] = 1.0 - EULER_GAMMA - math.log(alpha)
    for k in range(2, n_max + 1):
        p[k] = -(zeta_int(k) - 1.0) / k
    return series_exp(PowerSeries(p)).coeffs * _factorials(n_max)


def expansion_coefficients(alpha: float, n_max: int) -> ExpansionCoefficients:
    return ExpansionCoefficients(alpha=float(alpha), a=a_coeffs(alpha, n_max), b=b_coeffs(alpha, n_max), n_max=int(n_max))


class ExpansionKind(enum.Enum):
    N = "N"
    MEAN_INTEGRAL = "MeanIntegral"
    DERIVATIVE_INTEGRAL = "DerivativeIntegral"


@dataclass(frozen=True)
class ExpansionValue:
    """Truncated sum together with the truncation bookkeeping.

    ``n_terms`` terms (indices ``0..n_terms-1``) were summed; ``omitted`` is
    the magnitude of term ``n_terms`` (nan if no further coefficient was
    available).
    """

    value: float
    n_terms: int
    omitted: float


def eval_expansion(t: float, coeffs, kind="N", n_terms: int | None = None) -> ExpansionValue:
    """Evaluate one of the three asymptotic series at ``t``.

    Parameters
    ----------
    t : float
        Must exceed 1.
    coeffs : array_like
        ``a`` for ``kind="N"``, ``b`` for the two integral kinds.
    kind : {"N", "MeanIntegral", "DerivativeIntegral"} or ExpansionKind
    n_terms : int, optional
        Fixed truncation.  By default the series is cut just before its
        smallest-magnitude term (optimal truncation).
    """
    kind = ExpansionKind(kind.value if isinstance(kind, ExpansionKind) else kind)
    if not t > 1:
        raise ValueError("eval_expansion needs t > 1")
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        raise ValueError("empty coefficient vector")
    L = math.log(t)
    n = np.arange(c.size)
    if kind is ExpansionKind.N:
        pref, c = 1.0 / L, c
    elif kind is ExpansionKind.MEAN_INTEGRAL:
        pref, c = t / L, c
    else:
        pref, c = t / L**2, (n + 1) * c
    terms = pref * c / L**n
    if n_terms is None:
        if terms.size == 1:
            k = 1
        else:
            k = 1 + int(np.argmin(np.abs(terms[1:])))
    else:
        k = int(n_terms)
        if not 1 <= k <= terms.size:
            raise ValueError("n_terms out of range")
    omitted = float(abs(terms[k])) if k < terms.size else math.nan
    return ExpansionValue(value=float(np.sum(terms[:k])), n_terms=k, omitted=omitted)
