"""Monte Carlo estimates of sausage areas and disc hitting probabilities.

Every path ``i`` draws from its own counter-based Philox stream keyed by
``(seed, stream_id=i)``, so results do not depend on how paths are spread
over worker threads.  Per-path statistics are written into a preallocated
array and reduced in path order.

Areas are computed by rasterisation: the number of grid cells of side
``grid_h`` whose centres lie within ``r`` of the sampled polyline, times
``grid_h^2``.  The polyline sausage misses area the Brownian sausage covers
between sample points; :func:`estimate_free_area` and
:func:`estimate_bridge_area` can remove this bias by extrapolating the
per-path area in ``sqrt(ds)`` over sub-sampled copies of each path.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._mc_kernels import HIT_SEGMENT_BRIDGE, covered_cells, first_hit

DEFAULT_BUDGET = 10**9  # path-steps per estimate
MAX_SEED = 2**64


class BudgetExceeded(ValueError):
    """n_paths * n_steps exceeds the configured budget."""


class PathKind(enum.Enum):
    FREE = "free"
    BRIDGE = "bridge"


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for v in (self.seed, self.stream_id):
            if int(v) != v or not 0 <= v < MAX_SEED:
                raise ValueError("seed and stream_id must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=(int(self.seed) << 64) | int(self.stream_id)))


@dataclass(frozen=True)
class PathSample:
    t_end: float
    n_steps: int
    positions: np.ndarray = field(repr=False)
    kind: PathKind = PathKind.FREE
    target: tuple | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.shape != (self.n_steps + 1, 2):
            raise ValueError("positions must have shape (n_steps + 1, 2)")
        object.__setattr__(self, "positions", pos)

    def subsample(self, factor: int) -> "PathSample":
        """Every ``factor``-th point (``n_steps`` must be divisible by ``factor``)."""
        if self.n_steps % factor:
            raise ValueError("n_steps not divisible by the sub-sampling factor")
        return PathSample(self.t_end, self.n_steps // factor, self.positions[::factor], self.kind, self.target)


def _as_point(x):
    if isinstance(x, complex):
        return np.array([x.real, x.imag])
    p = np.asarray(x, dtype=float)
    if p.ndim == 0:
        return np.array([float(p), 0.0])
    if p.shape != (2,):
        raise ValueError("a planar point needs two coordinates")
    return p


def _free_positions(t, n_steps, gen):
    ds = t / n_steps
    pos = np.empty((n_steps + 1, 2))
    pos[0] = 0.0
    np.cumsum(gen.standard_normal((n_steps, 2)) * math.sqrt(ds), axis=0, out=pos[1:])
    return pos


def sample_free_path(t: float, n_steps: int, rng: RngSpec) -> PathSample:
    """Planar Brownian motion from the origin on ``n_steps`` equal steps."""
    if not t > 0 or n_steps < 1:
        raise ValueError("need t > 0 and n_steps >= 1")
    return PathSample(float(t), int(n_steps), _free_positions(t, n_steps, rng.generator()))


def sample_bridge_path(t: float, x, n_steps: int, rng: RngSpec) -> PathSample:
    """Brownian bridge from the origin to ``x`` over ``[0, t]``:
    ``B_s - (s/t)(B_t - x)`` applied to a free path."""
    if not t > 0 or n_steps < 1:
        raise ValueError("need t > 0 and n_steps >= 1")
    x = _as_point(x)
    pos = _free_positions(t, n_steps, rng.generator())
    frac = (np.arange(n_steps + 1) / n_steps)[:, None]
    pos -= frac * (pos[-1] - x)
    pos[-1] = x
    return PathSample(float(t), int(n_steps), pos, PathKind.BRIDGE, (float(x[0]), float(x[1])))


def sausage_area(path: PathSample, r: float, grid_h: float) -> float:
    """Area of the union of radius-``r`` discs along the polyline ``path``."""
    if not (r > 0 and grid_h > 0):
        raise ValueError("r and grid_h must be positive")
    if grid_h > r / 8.0:
        raise ValueError("grid_h must not exceed r / 8")
    p = path.positions
    return covered_cells(p[:, 0], p[:, 1], r, grid_h) * grid_h * grid_h


# ----------------------------------------------------------------------------
# Estimators
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelEstimate:
    n_steps: int
    mean: float
    stderr: float


@dataclass(frozen=True)
class AreaEstimate:
    """Sample mean and standard error of a per-path statistic.

    With Richardson extrapolation, ``mean``/``stderr`` refer to the
    extrapolated per-path values and ``levels`` holds the raw statistics at
    each step count.
    """

    mean: float
    stderr: float
    n_paths: int
    grid_h: float
    n_steps: int
    levels: tuple = ()
    extrapolated: bool = False
    seed: int | None = None


def _stats(x):
    x = np.asarray(x, dtype=float)
    sd = float(np.std(x, ddof=1)) if x.size > 1 else math.nan
    return float(np.mean(x)), sd / math.sqrt(x.size)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("SAUSAGE_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise ValueError("threads must be positive")
    return int(threads)


def _run_paths(worker, n_paths, width, threads):
    """``out[i] = worker(i)`` for every path, in any order, reduced in path order."""
    out = np.empty((n_paths, width))
    threads = resolve_threads(threads)

    def chunk(lo, hi):
        for i in range(lo, hi):
            out[i] = worker(i)

    if threads == 1:
        chunk(0, n_paths)
    else:
        edges = np.linspace(0, n_paths, threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            for f in [pool.submit(chunk, a, b) for a, b in zip(edges[:-1], edges[1:])]:
                f.result()
    return out


def _check_budget(n_paths, n_steps, budget):
    if n_paths < 2:
        raise ValueError("need at least two paths for a standard error")
    if n_paths * n_steps > budget:
        raise BudgetExceeded(f"n_paths * n_steps = {n_paths * n_steps:.3g} exceeds budget {budget:.3g}")


def richardson_weights(ds: np.ndarray) -> np.ndarray:
    """Weights ``w`` with ``sum w_k A_k`` the intercept of the least-squares
    fit ``A_k = A_0 + c sqrt(ds_k)``."""
    X = np.column_stack([np.ones_like(ds), np.sqrt(ds)])
    return np.linalg.pinv(X)[0]


def _area_estimate(sampler, t, r, n_paths, n_steps, grid_h, seed, threads, budget, levels):
    _check_budget(n_paths, n_steps, budget)
    factors = tuple(sorted(set(int(f) for f in (levels or (1,))), reverse=True))
    if any(n_steps % f for f in factors):
        raise ValueError("n_steps must be divisible by every sub-sampling factor")

    def worker(i):
        path = sampler(RngSpec(seed, i))
        return [sausage_area(path.subsample(f), r, grid_h) for f in factors]

    areas = _run_paths(worker, n_paths, len(factors), threads)
    lev = tuple(LevelEstimate(n_steps // f, *_stats(areas[:, k])) for k, f in enumerate(factors))
    if len(factors) >= 2:
        w = richardson_weights(np.array([t * f / n_steps for f in factors]))
        mean, err = _stats(areas @ w)
        extrap = True
    else:
        mean, err = lev[0].mean, lev[0].stderr
        extrap = False
    return AreaEstimate(mean, err, n_paths, grid_h, n_steps, lev, extrap, seed)


def estimate_free_area(
    t: float,
    r: float,
    n_paths: int,
    n_steps: int,
    grid_h: float,
    seed: int = 0,
    threads: int | None = None,
    budget: int = DEFAULT_BUDGET,
    levels: tuple | None = None,
) -> AreaEstimate:
    """Mean area of the free sausage ``S_t^{(r)}``.

    Parameters
    ----------
    levels : tuple of int, optional
        Sub-sampling factors, e.g. ``(4, 2, 1)``; with two or more the mean is
        extrapolated to ``ds -> 0`` in ``sqrt(ds)`` path by path.
    """
    sampler = lambda rng: sample_free_path(t, n_steps, rng)
    return _area_estimate(sampler, t, r, n_paths, n_steps, grid_h, seed, threads, budget, levels)


def estimate_bridge_area(
    t: float,
    x,
    r: float,
    n_paths: int,
    n_steps: int,
    grid_h: float,
    seed: int = 0,
    threads: int | None = None,
    budget: int = DEFAULT_BUDGET,
    levels: tuple | None = None,
) -> AreaEstimate:
    """Mean sausage area of the Brownian bridge from 0 to ``x`` over ``[0, t]``."""
    x = _as_point(x)
    sampler = lambda rng: sample_bridge_path(t, x, n_steps, rng)
    return _area_estimate(sampler, t, r, n_paths, n_steps, grid_h, seed, threads, budget, levels)


@dataclass(frozen=True)
class HitEstimate:
    mean: float
    stderr: float
    n_paths: int
    n_steps: int
    seed: int | None = None


def hit_times(
    rho: float,
    t: float,
    r: float,
    n_paths: int,
    n_steps: int,
    seed: int = 0,
    threads: int | None = None,
    budget: int = DEFAULT_BUDGET,
    mode: int = HIT_SEGMENT_BRIDGE,
) -> np.ndarray:
    """Per-path first-hit step index (``-1`` for no hit by ``t``) from ``(rho, 0)``."""
    if not rho > r:
        raise ValueError("rho must exceed r")
    _check_budget(n_paths, n_steps, budget)
    ds = t / n_steps

    def worker(i):
        gen = RngSpec(seed, i).generator()
        pos = _free_positions(t, n_steps, gen)
        pos[:, 0] += rho
        u = gen.random(n_steps)
        return first_hit(pos[:, 0], pos[:, 1], r, ds, u, mode)

    return _run_paths(worker, n_paths, 1, threads)[:, 0].astype(np.int64)


def estimate_hitting_prob(
    rho: float,
    t: float,
    r: float,
    n_paths: int,
    n_steps: int,
    seed: int = 0,
    threads: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> HitEstimate:
    """Fraction of paths from ``(rho, 0)`` that enter the disc ``|z| <= r`` by ``t``."""
    k = hit_times(rho, t, r, n_paths, n_steps, seed, threads, budget)
    mean, err = _stats(k >= 0)
    return HitEstimate(mean, err, n_paths, n_steps, seed)
