"""Programmatic acceptance checks.

Each ``criterion_<k>`` function runs one check at its stated tolerance and
returns a :class:`CriterionResult`.  ``run_suite("quick")`` runs the analytic
checks, ``run_suite("full")`` adds the three Monte Carlo comparisons.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from . import expansion, hitting, inversion, montecarlo, ramanujan
from .specfun import EULER_GAMMA, KAPPA, zeta_int


@dataclass
class CriterionResult:
    cid: int
    title: str
    passed: bool
    measured: dict
    tolerance: str
    seconds: float = 0.0
    mc: bool = False

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.cid:2d}: {self.title} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return asdict(self)


_REGISTRY = {}


def _criterion(cid, title, mc=False):
    def deco(fn):
        def run(**kw):
            t0 = time.perf_counter()
            passed, measured, tol = fn(**kw)
            return CriterionResult(cid, title, bool(passed), measured, tol, time.perf_counter() - t0, mc)

        run.cid, run.mc, run.__name__, run.__doc__ = cid, mc, fn.__name__, fn.__doc__
        _REGISTRY[cid] = run
        return run

    return deco


def _laplace_quadrature(lam):
    f = lambda t: ramanujan.n_direct(t) * math.exp(-lam * t)
    opts = dict(epsabs=1e-13, epsrel=1e-11, limit=400)
    return integrate.quad(f, 0.0, 1.0, **opts)[0] + integrate.quad(f, 1.0, np.inf, **opts)[0]


@_criterion(1, "N(0) = 1")
def criterion_1():
    v = ramanujan.n_direct(0.0)
    return abs(v - 1.0) <= 1e-10, {"N(0)": v}, "abs 1e-10"


@_criterion(2, "Laplace transform of N matches its closed form")
def criterion_2():
    errs = {}
    for lam in (1.5, 2.0, math.e, 5.0, 10.0):
        exact = ramanujan.n_laplace_closed_form(lam)
        errs[f"{lam:.6g}"] = abs(_laplace_quadrature(lam) - exact) / abs(exact)
    return max(errs.values()) <= 1e-6, errs, "rel 1e-6"


@_criterion(3, "expansion coefficients, substitution rules, convolution identity")
def criterion_3():
    g, z2, z3 = EULER_GAMMA, zeta_int(2), zeta_int(3)
    printed = np.array([1.0, -g, g * g - z2, 3 * g * z2 - g**3 - 2 * z3])
    a1 = expansion.a_coeffs(1.0, 8)
    worst = {"printed": float(np.max(np.abs(a1[:4] - printed)))}
    fact = np.array([math.factorial(n) for n in range(9)], dtype=float)
    for alpha in (0.5, KAPPA, 2.0):
        # gamma -> gamma + log(alpha) is multiplication of the generating function by exp(-x log alpha)
        shift = np.array([(-math.log(alpha)) ** k for k in range(9)]) / fact
        a_sub = np.convolve(a1 / fact, shift)[:9] * fact
        a = expansion.a_coeffs(alpha, 8)
        b = expansion.b_coeffs(alpha, 8)
        worst[f"a_sub({alpha:.4g})"] = float(np.max(np.abs(a - a_sub)))
        worst[f"b_conv({alpha:.4g})"] = float(np.max(np.abs(b / fact - np.cumsum(a / fact))))
    return max(worst.values()) <= 1e-12, worst, "abs 1e-12"


@_criterion(4, "Bouwkamp evaluator within its certified bound")
def criterion_4():
    worst = -math.inf
    rows = {}
    for lam in np.geomspace(2.0 * (1 + 1e-9), 1e8, 33):
        rep = ramanujan.n_bouwkamp(lam)
        excess = abs(rep.value - ramanujan.n_direct(lam)) - rep.error_bound
        rows[f"{lam:.4g}"] = excess
        worst = max(worst, excess)
    return worst <= 1e-10, {"max(|diff| - bound)": worst}, "|diff| <= bound + 1e-10"


@_criterion(5, "Talbot and Fourier inversions of m(t;1) agree")
def criterion_5():
    errs = {}
    for t in (0.01, 1.0, 100.0, 1e4):
        a = inversion.rate_m(t, "talbot").m
        b = inversion.rate_m(t, "fourier").m
        errs[f"{t:g}"] = abs(a - b) / abs(a)
    return max(errs.values()) <= 1e-6, errs, "rel 1e-6"


@_criterion(6, "small-t law: remainder shrinks by 2.5-4.5 per decade")
def criterion_6():
    ts = (1e-2, 1e-3, 1e-4)
    res = [abs(inversion.rate_m(t).m - inversion.small_t_rate(t)) for t in ts]
    ratios = [res[0] / res[1], res[1] / res[2]]
    ok = all(2.5 <= q <= 4.5 for q in ratios)
    return ok, {"residuals": res, "ratios": ratios}, "ratio in [2.5, 4.5]"


@_criterion(7, "large-t correction scaled by t (log t)^3 / 4pi")
def criterion_7():
    vals = {}
    for t in (1e3, 1e4, 1e5, 1e6):
        r = inversion.rate_m(t)
        vals[f"{t:g}"] = r.correction * t * math.log(t) ** 3 / (4 * math.pi)
    v = list(vals.values())
    ok = all(0.4 < x < 2.5 for x in v) and abs(v[-1] - 1) < abs(v[0] - 1)
    return ok, vals, "in (0.4, 2.5), closer to 1 at 1e6 than at 1e3"


@_criterion(8, "rate equals the radial integral of the hitting density")
def criterion_8():
    errs = {}
    for t in (10.0, 100.0):
        errs[f"{t:g}"] = abs(hitting.rate_from_density(t) / inversion.rate_m(t).m - 1)
    return max(errs.values()) <= 1e-4, errs, "rel 1e-4"


@_criterion(9, "hitting density asymptotics at |z| = sqrt(t)")
def criterion_9():
    dev = {}
    for t in (1e4, 1e5, 1e6):
        q = hitting.HittingQuery(math.sqrt(t), t)
        dev[f"{t:g}"] = abs(hitting.q_asymptotic(q).value / hitting.q_exact(q) - 1)
    d = list(dev.values())
    return d[0] <= 0.15 and d[1] < d[0] and d[2] < d[1], dev, "<= 0.15 at 1e4, decreasing"


@_criterion(13, "F0(t,0) - N(kappa t) + pi p_t(1) is O(1/(t (log t)^2))")
def criterion_13():
    vals = {}
    for t in (1e2, 1e3, 1e4, 1e5):
        vals[f"{t:g}"] = inversion.f0_residual(t) * t * math.log(t) ** 2
    v = np.abs(list(vals.values()))
    last_change = abs(v[-1] - v[-2]) / v[-2]
    ok = bool(np.all(np.isfinite(v)) and v.max() <= 2 * v.min() and last_change < 0.05)
    return ok, {"scaled": vals, "last_decade_change": last_change}, "max/min <= 2, last decade change < 5%"


@_criterion(10, "Monte Carlo hitting probabilities under the CDF bound", mc=True)
def criterion_10(seed=2024, n_paths=100_000, n_steps=1000, threads=None):
    rows = {}
    ok = True
    for rho, t in ((5.0, 1.0), (10.0, 4.0), (3.0, 9.0)):
        est = montecarlo.estimate_hitting_prob(rho, t, 1.0, n_paths, n_steps, seed=seed, threads=threads)
        bound = hitting.hitting_cdf_bound(hitting.HittingQuery(rho, t))
        rows[f"({rho:g},{t:g})"] = {"mc": est.mean, "stderr": est.stderr, "bound": bound}
        ok &= est.mean <= bound + 3 * est.stderr
    return ok, rows, "mc <= bound + 3 stderr"


@_criterion(11, "free sausage area: Monte Carlo vs theory at t = 100", mc=True)
def criterion_11(seed=2024, n_paths=2000, n_steps=100_000, threads=None):
    est = montecarlo.estimate_free_area(100.0, 1.0, n_paths, n_steps, 0.1, seed=seed, threads=threads, levels=(4, 2, 1))
    theory = inversion.free_area_theory(100.0, 1.0)
    tol = max(3 * est.stderr, 0.03 * theory)
    m = {"mc": est.mean, "stderr": est.stderr, "theory": theory, "levels": [lv.mean for lv in est.levels]}
    return abs(est.mean - theory) <= tol, m, "max(3 stderr, 3%)"


@_criterion(12, "bridge sausage area: Monte Carlo vs F0 prediction, and x-dependence sign", mc=True)
def criterion_12(seed=2024, n_paths=2000, n_steps=100_000, threads=None, n_paths_offset=500):
    t = 100.0
    est0 = montecarlo.estimate_bridge_area(t, (0.0, 0.0), 1.0, n_paths, n_steps, 0.1, seed=seed, threads=threads, levels=(4, 2, 1))
    pred = inversion.bridge_area_f0(t)
    tol = max(3 * est0.stderr, 0.05 * pred)
    near = abs(est0.mean - pred) <= tol
    estx = montecarlo.estimate_bridge_area(
        t, (math.sqrt(t), 0.0), 1.0, n_paths_offset, n_steps, 0.1, seed=seed + 1, threads=threads, levels=(4, 2, 1)
    )
    diff = estx.mean - est0.mean
    sd = math.hypot(estx.stderr, est0.stderr)
    m = {
        "mc_x0": est0.mean,
        "stderr_x0": est0.stderr,
        "f0_prediction": pred,
        "exact_x0": inversion.bridge_area_exact(t),
        "rel_dev": abs(est0.mean - pred) / pred,
        "mc_x_sqrt_t": estx.mean,
        "stderr_x_sqrt_t": estx.stderr,
        "difference_sigmas": diff / sd,
    }
    return near and diff > 3 * sd, m, "max(3 stderr, 5%); difference > 3 sigma"


QUICK = (1, 2, 3, 4, 5, 6, 7, 8, 9, 13)
FULL = tuple(range(1, 14))


def get(cid: int):
    return _REGISTRY[cid]


def run_suite(suite: str = "quick", seed: int = 2024, threads=None, echo=None):
    """Run the selected criteria in ID order; ``echo`` receives each result line."""
    ids = QUICK if suite == "quick" else FULL
    out = []
    for cid in sorted(ids):
        fn = _REGISTRY[cid]
        kw = {"seed": seed, "threads": threads} if fn.mc else {}
        try:
            res = fn(**kw)
        except Exception as exc:  # a crashing check is a failed check
            res = CriterionResult(cid, fn.__name__, False, {"error": repr(exc)}, "", 0.0, fn.mc)
        out.append(res)
        if echo:
            echo(res.line())
    return out
