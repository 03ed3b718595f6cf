"""Pure numpy fallback implementations of the hot kernels.

Kept arithmetically identical to the compiled versions in _speedups.pyx:
the same operations in the same order on float64 values, so both backends
produce bitwise-identical escape masks and meshes.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from . import _tables as T

BACKEND = "pure"


def julia_bounded(z0r, z0i, cr: float, ci: float, max_iter: int, radius: float) -> np.ndarray:
    """Per-point flags (uint8) for whether the orbit of z0 under z^2 + c
    stays within the escape radius for max_iter iterations.

    |z_n| is checked for n = 0 .. max_iter; non-finite points count as
    escaped at step 0.
    """
    z0r = np.asarray(z0r, dtype=np.float64)
    shape = z0r.shape
    zr = z0r.ravel().copy()
    zi = np.asarray(z0i, dtype=np.float64).ravel().copy()
    r2 = radius * radius
    bounded = np.ones(zr.size, dtype=np.uint8)
    alive = np.arange(zr.size)
    for n in range(max_iter + 1):
        with np.errstate(all="ignore"):
            m = zr * zr + zi * zi
            ok = m <= r2  # False for nan, matching the scalar escape test
        if not ok.all():
            bounded[alive[~ok]] = 0
            zr, zi, alive = zr[ok], zi[ok], alive[ok]
        if n == max_iter or alive.size == 0:
            break
        with np.errstate(all="ignore"):
            zr, zi = zr * zr - zi * zi + cr, 2.0 * zr * zi + ci
    return bounded.reshape(shape)


def mandelbrot_bounded(cr, ci, max_iter: int, radius: float) -> np.ndarray:
    """Membership flags for the critical orbit (z0 = 0) over a grid of c."""
    cr = np.asarray(cr, dtype=np.float64)
    shape = cr.shape
    cr_f = cr.ravel()
    ci_f = np.asarray(ci, dtype=np.float64).ravel()
    zr = np.zeros_like(cr_f)
    zi = np.zeros_like(ci_f)
    r2 = radius * radius
    bounded = np.ones(cr_f.size, dtype=np.uint8)
    alive = np.arange(cr_f.size)
    for n in range(max_iter + 1):
        with np.errstate(all="ignore"):
            m = zr * zr + zi * zi
            ok = m <= r2
        if not ok.all():
            bounded[alive[~ok]] = 0
            zr, zi, alive = zr[ok], zi[ok], alive[ok]
            cr_f, ci_f = cr_f[ok], ci_f[ok]
        if n == max_iter or alive.size == 0:
            break
        with np.errstate(all="ignore"):
            zr, zi = zr * zr - zi * zi + cr_f, 2.0 * zr * zi + ci_f
    return bounded.reshape(shape)


def march_volume(
    values: np.ndarray, xs: np.ndarray, ys: np.ndarray, zs: np.ndarray, iso: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Extract the isosurface of a (layers, height, width) uint8 grid.

    Sample (k, j, i) sits at (xs[i], ys[j], zs[k]).  Returns (vertices,
    triangles); vertices lie on grid edges and are welded exactly by edge
    identity.  Face ambiguities are resolved by the asymptotic decider, so
    the surface is consistent across neighboring cells.
    """
    vol = np.ascontiguousarray(values, dtype=np.uint8)
    L, H, W = vol.shape
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    zs = np.asarray(zs, dtype=np.float64)
    if len(xs) != W or len(ys) != H or len(zs) != L:
        raise ValueError("coordinate array lengths must match the grid shape")

    inside = vol > iso
    b = inside.astype(np.uint8)
    # per-cell 8-bit corner code, vectorized over the whole grid
    code = (
        b[:-1, :-1, :-1]
        | (b[:-1, :-1, 1:] << 1)
        | (b[:-1, 1:, 1:] << 2)
        | (b[:-1, 1:, :-1] << 3)
        | (b[1:, :-1, :-1] << 4)
        | (b[1:, :-1, 1:] << 5)
        | (b[1:, 1:, 1:] << 6)
        | (b[1:, 1:, :-1] << 7)
    )
    active = np.argwhere((code != 0) & (code != 255))  # (k, j, i), lexicographic

    corner_off = T.CORNER_OFFSETS
    face_corners = T.FACE_CORNERS
    face_slots = T.FACE_SLOT_EDGES
    face_rev = T.FACE_REVERSE
    segments = T.SEGMENTS
    seg_joined = T.SEGMENTS_JOINED
    edge_axis = T.EDGE_AXIS
    edge_base = T.EDGE_BASE
    edge_faces = T.EDGE_FACES

    plane = H * W
    grid = L * plane

    vert_ids: dict = {}
    verts: list = []
    tris: list = []

    for k, j, i in active:
        vals = [0.0] * 8
        bits = [0] * 8
        for b8 in range(8):
            di, dj, dk = corner_off[b8]
            v = float(vol[k + dk, j + dj, i + di])
            vals[b8] = v
            bits[b8] = 1 if v > iso else 0

        succ = {}
        for f in range(6):
            fc = face_corners[f]
            fcode = (
                bits[fc[0]] | (bits[fc[1]] << 1) | (bits[fc[2]] << 2) | (bits[fc[3]] << 3)
            )
            if fcode == 0 or fcode == 15:
                continue
            if fcode == 5 or fcode == 10:
                a = vals[fc[0]]
                bb = vals[fc[1]]
                c = vals[fc[2]]
                d = vals[fc[3]]
                joined = (a * c - bb * d) / (a + c - bb - d) > iso
                segs = seg_joined[0 if fcode == 5 else 1] if joined else segments[fcode]
            else:
                segs = segments[fcode]
            for s in range(2):
                sa, sb = segs[s]
                if sa < 0:
                    break
                ea = face_slots[f][sa]
                eb = face_slots[f][sb]
                if face_rev[f]:
                    ea, eb = eb, ea
                succ[int(ea)] = int(eb)

        seen = 0
        for start in range(12):
            if start not in succ or (seen >> start) & 1:
                continue
            loop = []
            e = start
            while True:
                seen |= 1 << e
                loop.append(e)
                e = succ[e]
                if e == start:
                    break
            vids = []
            for e in loop:
                axis = int(edge_axis[e])
                di, dj, dk = edge_base[e]
                gi, gj, gk = int(i + di), int(j + dj), int(k + dk)
                key = axis * grid + gk * plane + gj * W + gi
                vid = vert_ids.get(key)
                if vid is None:
                    v0 = float(vol[gk, gj, gi])
                    if axis == 0:
                        v1 = float(vol[gk, gj, gi + 1])
                        t = (iso - v0) / (v1 - v0)
                        pos = (xs[gi] + t * (xs[gi + 1] - xs[gi]), ys[gj], zs[gk])
                    elif axis == 1:
                        v1 = float(vol[gk, gj + 1, gi])
                        t = (iso - v0) / (v1 - v0)
                        pos = (xs[gi], ys[gj] + t * (ys[gj + 1] - ys[gj]), zs[gk])
                    else:
                        v1 = float(vol[gk + 1, gj, gi])
                        t = (iso - v0) / (v1 - v0)
                        pos = (xs[gi], ys[gj], zs[gk] + t * (zs[gk + 1] - zs[gk]))
                    vid = len(verts)
                    verts.append(pos)
                    vert_ids[key] = vid
                vids.append(vid)

            n = len(loop)
            if n == 3:
                tris.append((vids[0], vids[1], vids[2]))
                continue
            apex = -1
            for a in range(n):
                safe = True
                for m in range(2, n - 1):
                    if edge_faces[loop[a]] & edge_faces[loop[(a + m) % n]]:
                        safe = False
                        break
                if safe:
                    apex = a
                    break
            if apex >= 0:
                for m in range(1, n - 1):
                    tris.append(
                        (vids[apex], vids[(apex + m) % n], vids[(apex + m + 1) % n])
                    )
            else:
                sx = sy = sz = 0.0
                for vid in vids:
                    px, py, pz = verts[vid]
                    sx += px
                    sy += py
                    sz += pz
                centroid = len(verts)
                verts.append((sx / n, sy / n, sz / n))
                for m in range(n):
                    tris.append((centroid, vids[m], vids[(m + 1) % n]))

    vertices = np.array(verts, dtype=np.float64).reshape(-1, 3)
    triangles = np.array(tris, dtype=np.int64).reshape(-1, 3)
    return vertices, triangles
