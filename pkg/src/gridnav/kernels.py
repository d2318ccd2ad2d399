"""Hot loops: beam raycasting, scan clustering, segment traversal.

All grid-space kernels work in *cell units*: a global coordinate ``x`` (mm)
maps to ``u = x / r + 0.5`` so that ``floor(u)`` is the grid index of the
half-up rounding ``floor(x / r + 1/2)``.

Each kernel has a numba implementation and a numpy implementation with
identical semantics. The module-level names (``raycast``, ``cluster_labels``,
``traverse``) dispatch to numba unless ``GRIDNAV_DISABLE_JIT`` is set.
"""
import math

import numpy as np

from ._jit import HAVE_NUMBA, USE_NUMBA, njit

TIE_EPS = 1e-9


# --------------------------------------------------------------------------
# raycast


def _raycast_scalar(occ, ox, oy, dx, dy, max_t):
    h, w = occ.shape
    n = dx.shape[0]
    out_t = np.empty(n, dtype=np.float64)
    out_hit = np.zeros(n, dtype=np.bool_)
    ix0 = int(math.floor(ox))
    iy0 = int(math.floor(oy))
    for k in range(n):
        ddx = dx[k]
        ddy = dy[k]
        ix = ix0
        iy = iy0
        sx = 0
        sy = 0
        tmx = math.inf
        tmy = math.inf
        tdx = math.inf
        tdy = math.inf
        if ddx > 0.0:
            sx = 1
            tmx = (ix + 1 - ox) / ddx
            tdx = 1.0 / ddx
        elif ddx < 0.0:
            sx = -1
            tmx = (ox - ix) / -ddx
            tdx = -1.0 / ddx
        if ddy > 0.0:
            sy = 1
            tmy = (iy + 1 - oy) / ddy
            tdy = 1.0 / ddy
        elif ddy < 0.0:
            sy = -1
            tmy = (oy - iy) / -ddy
            tdy = -1.0 / ddy
        t_hit = max_t
        hit = False
        while True:
            if tmx < tmy - TIE_EPS:
                t = tmx
                if t > max_t:
                    break
                ix += sx
                tmx += tdx
                if 0 <= ix < w and 0 <= iy < h and occ[iy, ix]:
                    hit = True
            elif tmy < tmx - TIE_EPS:
                t = tmy
                if t > max_t:
                    break
                iy += sy
                tmy += tdy
                if 0 <= ix < w and 0 <= iy < h and occ[iy, ix]:
                    hit = True
            else:
                # corner crossing: both edge neighbours count as touched
                t = tmx
                if t > max_t:
                    break
                ax = ix + sx
                ay = iy + sy
                if 0 <= ax < w and 0 <= iy < h and occ[iy, ax]:
                    hit = True
                if 0 <= ix < w and 0 <= ay < h and occ[ay, ix]:
                    hit = True
                if 0 <= ax < w and 0 <= ay < h and occ[ay, ax]:
                    hit = True
                ix = ax
                iy = ay
                tmx += tdx
                tmy += tdy
            if hit:
                t_hit = t
                break
        out_t[k] = t_hit
        out_hit[k] = hit
    return out_t, out_hit


def raycast_numpy(occ, ox, oy, dx, dy, max_t):
    """Vectorised over beams: every iteration advances all live beams one cell."""
    h, w = occ.shape
    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    n = dx.shape[0]
    ix = np.full(n, math.floor(ox), dtype=np.int64)
    iy = np.full(n, math.floor(oy), dtype=np.int64)
    sx = np.sign(dx).astype(np.int64)
    sy = np.sign(dy).astype(np.int64)
    with np.errstate(divide="ignore", invalid="ignore"):
        tmx = np.where(dx > 0, (ix + 1 - ox) / dx, np.where(dx < 0, (ox - ix) / -dx, np.inf))
        tmy = np.where(dy > 0, (iy + 1 - oy) / dy, np.where(dy < 0, (oy - iy) / -dy, np.inf))
        tdx = np.where(dx != 0, 1.0 / np.abs(dx), np.inf)
        tdy = np.where(dy != 0, 1.0 / np.abs(dy), np.inf)
    out_t = np.full(n, float(max_t))
    out_hit = np.zeros(n, dtype=bool)
    live = np.ones(n, dtype=bool)

    def occupied(cx, cy):
        inside = (cx >= 0) & (cx < w) & (cy >= 0) & (cy < h)
        res = np.zeros(cx.shape, dtype=bool)
        res[inside] = occ[cy[inside], cx[inside]]
        return res

    while live.any():
        idx = np.flatnonzero(live)
        a, b = tmx[idx], tmy[idx]
        xs = a < b - TIE_EPS
        ys = (~xs) & (b < a - TIE_EPS)
        tie = ~(xs | ys)
        t = np.where(ys, b, a)
        done = t > max_t
        live[idx[done]] = False
        go = ~done
        idx, xs, ys, tie, t = idx[go], xs[go], ys[go], tie[go], t[go]

        cx, cy = ix[idx], iy[idx]
        nx = cx + np.where(xs | tie, sx[idx], 0)
        ny = cy + np.where(ys | tie, sy[idx], 0)
        hit = occupied(nx, ny)
        hit |= tie & (occupied(nx, cy) | occupied(cx, ny))

        ix[idx] = nx
        iy[idx] = ny
        tmx[idx] += np.where(xs | tie, tdx[idx], 0.0)
        tmy[idx] += np.where(ys | tie, tdy[idx], 0.0)

        hit_idx = idx[hit]
        out_t[hit_idx] = t[hit]
        out_hit[hit_idx] = True
        live[hit_idx] = False
    return out_t, out_hit


# --------------------------------------------------------------------------
# clustering


def _cluster_labels_scalar(x, y, rho, keep, lam, sin_step):
    n = x.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    label = -1
    prev = -1
    gap = False
    for i in range(n):
        if not keep[i]:
            gap = True
            continue
        if prev < 0 or gap:
            label += 1
        else:
            d = math.hypot(x[i] - x[prev], y[i] - y[prev])
            if d > lam * rho[i] * sin_step:
                label += 1
        labels[i] = label
        prev = i
        gap = False
    return labels


def cluster_labels_numpy(x, y, rho, keep, lam, sin_step):
    labels = np.full(len(x), -1, dtype=np.int64)
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        return labels
    d = np.hypot(np.diff(x[idx]), np.diff(y[idx]))
    split = (d > lam * rho[idx[1:]] * sin_step) | (np.diff(idx) > 1)
    labels[idx] = np.concatenate(([0], np.cumsum(split)))
    return labels


# --------------------------------------------------------------------------
# segment traversal


def _traverse_scalar(x0, y0, x1, y1):
    """Cells touched by the segment (x0,y0)-(x1,y1), with entry parameter in [0,1]."""
    ix = int(math.floor(x0))
    iy = int(math.floor(y0))
    ex = int(math.floor(x1))
    ey = int(math.floor(y1))
    cap = 4 * (abs(ex - ix) + abs(ey - iy)) + 4
    cells = np.empty((cap, 2), dtype=np.int64)
    ts = np.empty(cap, dtype=np.float64)
    cells[0, 0] = ix
    cells[0, 1] = iy
    ts[0] = 0.0
    n = 1
    ddx = x1 - x0
    ddy = y1 - y0
    sx = 0
    sy = 0
    tmx = math.inf
    tmy = math.inf
    tdx = math.inf
    tdy = math.inf
    if ddx > 0.0:
        sx = 1
        tmx = (ix + 1 - x0) / ddx
        tdx = 1.0 / ddx
    elif ddx < 0.0:
        sx = -1
        tmx = (x0 - ix) / -ddx
        tdx = -1.0 / ddx
    if ddy > 0.0:
        sy = 1
        tmy = (iy + 1 - y0) / ddy
        tdy = 1.0 / ddy
    elif ddy < 0.0:
        sy = -1
        tmy = (y0 - iy) / -ddy
        tdy = -1.0 / ddy
    while n < cap - 3:
        if tmx < tmy - TIE_EPS:
            if tmx > 1.0:
                break
            ix += sx
            cells[n, 0] = ix
            cells[n, 1] = iy
            ts[n] = tmx
            n += 1
            tmx += tdx
        elif tmy < tmx - TIE_EPS:
            if tmy > 1.0:
                break
            iy += sy
            cells[n, 0] = ix
            cells[n, 1] = iy
            ts[n] = tmy
            n += 1
            tmy += tdy
        else:
            if tmx > 1.0:
                break
            cells[n, 0] = ix + sx
            cells[n, 1] = iy
            cells[n + 1, 0] = ix
            cells[n + 1, 1] = iy + sy
            ix += sx
            iy += sy
            cells[n + 2, 0] = ix
            cells[n + 2, 1] = iy
            ts[n] = tmx
            ts[n + 1] = tmx
            ts[n + 2] = tmx
            n += 3
            tmx += tdx
            tmy += tdy
    return cells[:n].copy(), ts[:n].copy()


def _make_free_cells(trav):
    def free_cells(w, h, ox, oy, dx, dy, t):
        """Cells each ray passes through before its end ``t`` (cell units).

        Returns a (w, h) boolean grid. Each ray stops just short of ``t`` so
        the struck cell itself is never marked.
        """
        out = np.zeros((w, h), dtype=np.bool_)
        for k in range(dx.shape[0]):
            tk = t[k] - 1e-6
            if tk <= 0.0:
                continue
            cells, _ = trav(ox, oy, ox + dx[k] * tk, oy + dy[k] * tk)
            for i in range(cells.shape[0]):
                cx = cells[i, 0]
                cy = cells[i, 1]
                if 0 <= cx < w and 0 <= cy < h:
                    out[cx, cy] = True
        return out

    return free_cells


raycast_jit = njit(_raycast_scalar) if HAVE_NUMBA else None
cluster_labels_jit = njit(_cluster_labels_scalar) if HAVE_NUMBA else None
traverse_jit = njit(_traverse_scalar) if HAVE_NUMBA else None
traverse_py = _traverse_scalar

free_cells_py = _make_free_cells(traverse_py)
free_cells_jit = njit(_make_free_cells(traverse_jit)) if HAVE_NUMBA else None

if USE_NUMBA:
    raycast = raycast_jit
    cluster_labels = cluster_labels_jit
    traverse = traverse_jit
    free_cells = free_cells_jit
else:
    raycast = raycast_numpy
    cluster_labels = cluster_labels_numpy
    traverse = traverse_py
    free_cells = free_cells_py

BACKEND = "numba" if USE_NUMBA else "numpy"
