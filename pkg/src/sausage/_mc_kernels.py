"""Hot loops of the Monte Carlo harness: capsule rasterisation and first-hit
detection.  Each kernel has a numba version and a numpy version that produce
identical integers.
"""

from __future__ import annotations

import math

import numpy as np

from . import _accel
from ._accel import njit

# hit-detection modes
HIT_ENDPOINT = 0
HIT_SEGMENT = 1
HIT_SEGMENT_BRIDGE = 2


# ----------------------------------------------------------------------------
# Grid geometry shared by both paths
# ----------------------------------------------------------------------------

def grid_frame(px, py, r, h):
    """Origin and shape of a grid anchored at multiples of ``h`` covering the
    ``r``-neighbourhood of the points, with two spare cells on every side."""
    pad = r + 2.0 * h
    x0 = math.floor((px.min() - pad) / h) * h
    y0 = math.floor((py.min() - pad) / h) * h
    nx = int(math.ceil((px.max() + pad - x0) / h)) + 1
    ny = int(math.ceil((py.max() + pad - y0) / h)) + 1
    return x0, y0, nx, ny


@njit(cache=True, nogil=True)
def _row_interval(yc, ax, ay, bx, by, r):
    """x-extent of the capsule around segment AB on the horizontal line y = yc."""
    lo = math.inf
    hi = -math.inf
    r2 = r * r
    e = yc - ay
    if e * e <= r2:
        d = math.sqrt(r2 - e * e)
        lo = min(lo, ax - d)
        hi = max(hi, ax + d)
    e = yc - by
    if e * e <= r2:
        d = math.sqrt(r2 - e * e)
        lo = min(lo, bx - d)
        hi = max(hi, bx + d)
    dx = bx - ax
    dy = by - ay
    L2 = dx * dx + dy * dy
    if L2 > 0.0:
        L = math.sqrt(L2)
        ux = dx / L
        uy = dy / L
        eta = yc - ay
        slo = -math.inf
        shi = math.inf
        # along-segment coordinate xi*ux + eta*uy in [0, L]
        if ux != 0.0:
            a1 = -eta * uy / ux
            a2 = (L - eta * uy) / ux
            slo = max(slo, min(a1, a2))
            shi = min(shi, max(a1, a2))
        elif not (0.0 <= eta * uy <= L):
            shi = -math.inf
        # normal coordinate -xi*uy + eta*ux in [-r, r]
        if uy != 0.0:
            b1 = (eta * ux - r) / uy
            b2 = (eta * ux + r) / uy
            slo = max(slo, min(b1, b2))
            shi = min(shi, max(b1, b2))
        elif abs(eta * ux) > r:
            shi = -math.inf
        if slo <= shi:
            lo = min(lo, ax + slo)
            hi = max(hi, ax + shi)
    return lo, hi


@njit(cache=True, nogil=True)
def _covered_cells_nb(px, py, r, h, x0, y0, nx, ny):
    diff = np.zeros((ny, nx + 1), dtype=np.int32)
    n = px.size
    nseg = max(n - 1, 1)
    for k in range(nseg):
        ax = px[k]
        ay = py[k]
        kb = k + 1 if n > 1 else k
        bx = px[kb]
        by = py[kb]
        j0 = int(math.ceil((min(ay, by) - r - y0) / h - 0.5))
        j1 = int(math.floor((max(ay, by) + r - y0) / h - 0.5))
        for j in range(j0, j1 + 1):
            yc = y0 + (j + 0.5) * h
            lo, hi = _row_interval(yc, ax, ay, bx, by, r)
            if lo <= hi:
                i0 = int(math.ceil((lo - x0) / h - 0.5))
                i1 = int(math.floor((hi - x0) / h - 0.5))
                if i0 <= i1:
                    diff[j, i0] += 1
                    diff[j, i1 + 1] -= 1
    count = 0
    for j in range(ny):
        run = 0
        for i in range(nx):
            run += diff[j, i]
            if run > 0:
                count += 1
    return count


def _covered_cells_np(px, py, r, h, x0, y0, nx, ny):
    n = px.size
    if n == 1:
        ax = bx = px
        ay = by = py
    else:
        ax, bx, ay, by = px[:-1], px[1:], py[:-1], py[1:]
    j0 = np.ceil((np.minimum(ay, by) - r - y0) / h - 0.5).astype(np.int64)
    j1 = np.floor((np.maximum(ay, by) + r - y0) / h - 0.5).astype(np.int64)
    K = int((j1 - j0).max()) + 1
    jj = j0[:, None] + np.arange(K)[None, :]
    valid = jj <= j1[:, None]
    yc = y0 + (jj + 0.5) * h
    r2 = r * r
    lo = np.full(jj.shape, np.inf)
    hi = np.full(jj.shape, -np.inf)
    with np.errstate(invalid="ignore", divide="ignore"):
        for cx, cy in ((ax, ay), (bx, by)):
            e = yc - cy[:, None]
            inside = e * e <= r2
            d = np.sqrt(np.where(inside, r2 - e * e, 0.0))
            lo = np.where(inside, np.minimum(lo, cx[:, None] - d), lo)
            hi = np.where(inside, np.maximum(hi, cx[:, None] + d), hi)
        dx = (bx - ax)[:, None]
        dy = (by - ay)[:, None]
        L2 = dx * dx + dy * dy
        L = np.sqrt(L2)
        ux = dx / L
        uy = dy / L
        eta = yc - ay[:, None]
        slo = np.full(jj.shape, -np.inf)
        shi = np.full(jj.shape, np.inf)
        a1 = -eta * uy / ux
        a2 = (L - eta * uy) / ux
        nzx = ux != 0.0
        slo = np.where(nzx, np.maximum(slo, np.minimum(a1, a2)), slo)
        shi = np.where(nzx, np.minimum(shi, np.maximum(a1, a2)), shi)
        shi = np.where(~nzx & ~((0.0 <= eta * uy) & (eta * uy <= L)), -np.inf, shi)
        b1 = (eta * ux - r) / uy
        b2 = (eta * ux + r) / uy
        nzy = uy != 0.0
        slo = np.where(nzy, np.maximum(slo, np.minimum(b1, b2)), slo)
        shi = np.where(nzy, np.minimum(shi, np.maximum(b1, b2)), shi)
        shi = np.where(~nzy & (np.abs(eta * ux) > r), -np.inf, shi)
        strip = (L2 > 0.0) & (slo <= shi)
        lo = np.where(strip, np.minimum(lo, ax[:, None] + slo), lo)
        hi = np.where(strip, np.maximum(hi, ax[:, None] + shi), hi)
        keep = valid & (lo <= hi)
        i0 = np.ceil((lo - x0) / h - 0.5)
        i1 = np.floor((hi - x0) / h - 0.5)
    keep &= i0 <= i1
    rows = jj[keep]
    diff = np.zeros((ny, nx + 1), dtype=np.int32)
    np.add.at(diff, (rows, i0[keep].astype(np.int64)), 1)
    np.add.at(diff, (rows, i1[keep].astype(np.int64) + 1), -1)
    return int(np.count_nonzero(np.cumsum(diff[:, :nx], axis=1) > 0))


def covered_cells(px, py, r, h):
    """Number of grid cells (centres on the lattice ``(x0 + (i+1/2)h, y0 + (j+1/2)h)``)
    within distance ``r`` of the polyline through ``(px, py)``."""
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    x0, y0, nx, ny = grid_frame(px, py, r, h)
    if _accel.USE_NUMBA:
        return int(_covered_cells_nb(px, py, float(r), float(h), x0, y0, nx, ny))
    return _covered_cells_np(px, py, float(r), float(h), x0, y0, nx, ny)


# ----------------------------------------------------------------------------
# First hit of the disc |z| <= r
# ----------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _first_hit_nb(px, py, r, ds, u, mode):
    r2 = r * r
    n = px.size - 1
    for k in range(n):
        ax = px[k]
        ay = py[k]
        bx = px[k + 1]
        by = py[k + 1]
        if bx * bx + by * by <= r2:
            return k
        if mode == 0:
            continue
        dx = bx - ax
        dy = by - ay
        L2 = dx * dx + dy * dy
        if L2 > 0.0:
            s = -(ax * dx + ay * dy) / L2
            if 0.0 < s < 1.0:
                cx = ax + s * dx
                cy = ay + s * dy
                if cx * cx + cy * cy <= r2:
                    return k
        if mode == 2:
            d1 = math.sqrt(ax * ax + ay * ay) - r
            d2 = math.sqrt(bx * bx + by * by) - r
            if u[k] < math.exp(-2.0 * d1 * d2 / ds):
                return k
    return -1


def _first_hit_np(px, py, r, ds, u, mode):
    ax, ay, bx, by = px[:-1], py[:-1], px[1:], py[1:]
    r2 = r * r
    hit = bx * bx + by * by <= r2
    if mode >= 1:
        dx = bx - ax
        dy = by - ay
        L2 = dx * dx + dy * dy
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(L2 > 0.0, -(ax * dx + ay * dy) / L2, 0.0)
        cx = ax + s * dx
        cy = ay + s * dy
        hit |= (s > 0.0) & (s < 1.0) & (cx * cx + cy * cy <= r2)
    if mode == 2:
        d1 = np.sqrt(ax * ax + ay * ay) - r
        d2 = np.sqrt(bx * bx + by * by) - r
        hit |= u < np.exp(-2.0 * d1 * d2 / ds)
    idx = np.flatnonzero(hit)
    return int(idx[0]) if idx.size else -1


def first_hit(px, py, r, ds, u=None, mode=HIT_SEGMENT_BRIDGE):
    """Index ``k`` of the first step ``k -> k+1`` on which the path meets the
    disc ``|z| <= r`` (``-1`` if it never does).

    ``mode`` selects the test: endpoints only, endpoint or segment-circle
    intersection, or additionally the Brownian-bridge crossing probability
    ``exp(-2 d1 d2 / ds)`` between two outside endpoints (needs ``u``).
    """
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    if u is None:
        if mode == HIT_SEGMENT_BRIDGE:
            raise ValueError("bridge correction needs uniforms")
        u = np.zeros(max(px.size - 1, 0))
    u = np.ascontiguousarray(u, dtype=np.float64)
    if _accel.USE_NUMBA:
        return int(_first_hit_nb(px, py, float(r), float(ds), u, int(mode)))
    return _first_hit_np(px, py, float(r), float(ds), u, int(mode))
