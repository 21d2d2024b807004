"""Numba vs numpy timings for the hot kernels.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Both backends
are switched in-process through ``sausage._accel.USE_NUMBA``; each kernel is
called once per backend before timing so numba compilation is excluded.
Results are also checked for equality across backends.
"""

import argparse
import timeit

import numpy as np

from sausage import _accel
from sausage._mc_kernels import HIT_SEGMENT_BRIDGE, covered_cells, first_hit
from sausage.montecarlo import RngSpec, sample_free_path
from sausage.specfun import bessel_k01e


def _cases():
    rng = np.random.default_rng(7)
    z = (rng.uniform(0.01, 40, 20_000) * np.exp(1j * rng.uniform(-2.5, 2.5, 20_000))).astype(complex)
    free = sample_free_path(100.0, 100_000, RngSpec(1)).positions
    hit = sample_free_path(100.0, 100_000, RngSpec(2)).positions + np.array([30.0, 0.0])
    u = rng.random(100_000)
    return {
        "bessel_k01e (2e4 complex points)": lambda: bessel_k01e(z),
        "covered_cells (1e5 steps, h=0.1)": lambda: covered_cells(free[:, 0], free[:, 1], 1.0, 0.1),
        "first_hit (1e5 steps)": lambda: first_hit(hit[:, 0], hit[:, 1], 1.0, 1e-3, u, HIT_SEGMENT_BRIDGE),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.allclose(x, y, rtol=1e-12, atol=0) for x, y in zip(a, b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    saved = _accel.USE_NUMBA
    print(f"{'kernel':36s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}  equal")
    try:
        for name, fn in _cases().items():
            best, out = {}, {}
            for flag in (True, False):
                _accel.USE_NUMBA = flag
                out[flag] = fn()  # warm-up, includes JIT compilation
                best[flag] = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
            print(
                f"{name:36s} {best[True]:11.2f} {best[False]:11.2f} "
                f"{best[False] / best[True]:8.1f}  {_same(out[True], out[False])}"
            )
    finally:
        _accel.USE_NUMBA = saved


if __name__ == "__main__":
    main()
