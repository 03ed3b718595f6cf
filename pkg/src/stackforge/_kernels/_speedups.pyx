# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  pure.py is the reference implementation; the
arithmetic here mirrors it operation for operation so both backends return
bitwise-identical results."""

import numpy as np

cimport numpy as cnp
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from . import _tables as T

cnp.import_array()

BACKEND = "compiled"

cdef cnp.int8_t[:, ::1] _CORNER_OFF = np.ascontiguousarray(T.CORNER_OFFSETS)
cdef cnp.int8_t[::1] _EDGE_AXIS = np.ascontiguousarray(T.EDGE_AXIS)
cdef cnp.int8_t[:, ::1] _EDGE_BASE = np.ascontiguousarray(T.EDGE_BASE)
cdef cnp.int8_t[:, ::1] _FACE_CORNERS = np.ascontiguousarray(T.FACE_CORNERS)
cdef cnp.int8_t[:, ::1] _FACE_SLOTS = np.ascontiguousarray(T.FACE_SLOT_EDGES)
cdef cnp.int8_t[::1] _FACE_REV = np.ascontiguousarray(T.FACE_REVERSE)
cdef cnp.int8_t[:, :, ::1] _SEGMENTS = np.ascontiguousarray(T.SEGMENTS)
cdef cnp.int8_t[:, :, ::1] _SEG_JOINED = np.ascontiguousarray(T.SEGMENTS_JOINED)
cdef cnp.int16_t[::1] _EDGE_FACES = np.ascontiguousarray(T.EDGE_FACES)


def julia_bounded(z0r, z0i, double cr, double ci, int max_iter, double radius):
    """See pure.julia_bounded."""
    z0r_arr = np.ascontiguousarray(z0r, dtype=np.float64)
    shape = z0r_arr.shape
    cdef double[::1] xr = z0r_arr.ravel()
    cdef double[::1] xi = np.ascontiguousarray(z0i, dtype=np.float64).ravel()
    out = np.ones(xr.shape[0], dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef double r2 = radius * radius
    cdef Py_ssize_t p, n_pts = xr.shape[0]
    cdef int n
    cdef double zr, zi, m, tmp
    for p in range(n_pts):
        zr = xr[p]
        zi = xi[p]
        for n in range(max_iter + 1):
            m = zr * zr + zi * zi
            if not (m <= r2):
                o[p] = 0
                break
            if n == max_iter:
                break
            tmp = zr * zr - zi * zi + cr
            zi = 2.0 * zr * zi + ci
            zr = tmp
    return out.reshape(shape)


def mandelbrot_bounded(cr, ci, int max_iter, double radius):
    """See pure.mandelbrot_bounded."""
    cr_arr = np.ascontiguousarray(cr, dtype=np.float64)
    shape = cr_arr.shape
    cdef double[::1] cre = cr_arr.ravel()
    cdef double[::1] cim = np.ascontiguousarray(ci, dtype=np.float64).ravel()
    out = np.ones(cre.shape[0], dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef double r2 = radius * radius
    cdef Py_ssize_t p, n_pts = cre.shape[0]
    cdef int n
    cdef double zr, zi, m, tmp, ccr, cci
    for p in range(n_pts):
        zr = 0.0
        zi = 0.0
        ccr = cre[p]
        cci = cim[p]
        for n in range(max_iter + 1):
            m = zr * zr + zi * zi
            if not (m <= r2):
                o[p] = 0
                break
            if n == max_iter:
                break
            tmp = zr * zr - zi * zi + ccr
            zi = 2.0 * zr * zi + cci
            zr = tmp
    return out.reshape(shape)


def march_volume(values, xs, ys, zs, double iso):
    """See pure.march_volume."""
    vol_arr = np.ascontiguousarray(values, dtype=np.uint8)
    cdef unsigned char[:, :, ::1] vol = vol_arr
    cdef Py_ssize_t L = vol.shape[0], H = vol.shape[1], W = vol.shape[2]
    cdef double[::1] cx = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] cy = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] cz = np.ascontiguousarray(zs, dtype=np.float64)
    if cx.shape[0] != W or cy.shape[0] != H or cz.shape[0] != L:
        raise ValueError("coordinate array lengths must match the grid shape")

    cdef long long plane = H * W
    cdef long long grid = L * plane
    cdef unordered_map[long long, long long] vert_ids
    cdef vector[double] verts
    cdef vector[long long] tris

    cdef Py_ssize_t i, j, k, gi, gj, gk
    cdef int b8, f, s, e, start, m, axis, n_loop, amb, a_idx, apex, safe
    cdef int fcode, code8, joined
    cdef int sa, sb, ea, eb
    cdef int seen
    cdef double vals[8]
    cdef int bits[8]
    cdef int succ[12]
    cdef int loop[12]
    cdef long long vids[12]
    cdef double a, bb, c, d, v0, v1, t, sx, sy, sz
    cdef long long key, vid, centroid

    for k in range(L - 1):
        for j in range(H - 1):
            for i in range(W - 1):
                code8 = 0
                for b8 in range(8):
                    v0 = <double> vol[k + _CORNER_OFF[b8, 2],
                                      j + _CORNER_OFF[b8, 1],
                                      i + _CORNER_OFF[b8, 0]]
                    vals[b8] = v0
                    if v0 > iso:
                        bits[b8] = 1
                        code8 |= 1 << b8
                    else:
                        bits[b8] = 0
                if code8 == 0 or code8 == 255:
                    continue

                for e in range(12):
                    succ[e] = -1
                for f in range(6):
                    fcode = (bits[_FACE_CORNERS[f, 0]]
                             | (bits[_FACE_CORNERS[f, 1]] << 1)
                             | (bits[_FACE_CORNERS[f, 2]] << 2)
                             | (bits[_FACE_CORNERS[f, 3]] << 3))
                    if fcode == 0 or fcode == 15:
                        continue
                    joined = 0
                    if fcode == 5 or fcode == 10:
                        a = vals[_FACE_CORNERS[f, 0]]
                        bb = vals[_FACE_CORNERS[f, 1]]
                        c = vals[_FACE_CORNERS[f, 2]]
                        d = vals[_FACE_CORNERS[f, 3]]
                        joined = (a * c - bb * d) / (a + c - bb - d) > iso
                    for s in range(2):
                        if joined:
                            amb = 0 if fcode == 5 else 1
                            sa = _SEG_JOINED[amb, s, 0]
                            sb = _SEG_JOINED[amb, s, 1]
                        else:
                            sa = _SEGMENTS[fcode, s, 0]
                            sb = _SEGMENTS[fcode, s, 1]
                        if sa < 0:
                            break
                        ea = _FACE_SLOTS[f, sa]
                        eb = _FACE_SLOTS[f, sb]
                        if _FACE_REV[f]:
                            ea, eb = eb, ea
                        succ[ea] = eb

                seen = 0
                for start in range(12):
                    if succ[start] < 0 or (seen >> start) & 1:
                        continue
                    n_loop = 0
                    e = start
                    while True:
                        seen |= 1 << e
                        loop[n_loop] = e
                        n_loop += 1
                        e = succ[e]
                        if e == start:
                            break
                    for m in range(n_loop):
                        e = loop[m]
                        axis = _EDGE_AXIS[e]
                        gi = i + _EDGE_BASE[e, 0]
                        gj = j + _EDGE_BASE[e, 1]
                        gk = k + _EDGE_BASE[e, 2]
                        key = axis * grid + gk * plane + gj * W + gi
                        if vert_ids.count(key):
                            vid = vert_ids[key]
                        else:
                            v0 = <double> vol[gk, gj, gi]
                            if axis == 0:
                                v1 = <double> vol[gk, gj, gi + 1]
                                t = (iso - v0) / (v1 - v0)
                                verts.push_back(cx[gi] + t * (cx[gi + 1] - cx[gi]))
                                verts.push_back(cy[gj])
                                verts.push_back(cz[gk])
                            elif axis == 1:
                                v1 = <double> vol[gk, gj + 1, gi]
                                t = (iso - v0) / (v1 - v0)
                                verts.push_back(cx[gi])
                                verts.push_back(cy[gj] + t * (cy[gj + 1] - cy[gj]))
                                verts.push_back(cz[gk])
                            else:
                                v1 = <double> vol[gk + 1, gj, gi]
                                t = (iso - v0) / (v1 - v0)
                                verts.push_back(cx[gi])
                                verts.push_back(cy[gj])
                                verts.push_back(cz[gk] + t * (cz[gk + 1] - cz[gk]))
                            vid = verts.size() / 3 - 1
                            vert_ids[key] = vid
                        vids[m] = vid

                    if n_loop == 3:
                        tris.push_back(vids[0])
                        tris.push_back(vids[1])
                        tris.push_back(vids[2])
                        continue
                    apex = -1
                    for a_idx in range(n_loop):
                        safe = 1
                        for m in range(2, n_loop - 1):
                            if _EDGE_FACES[loop[a_idx]] & _EDGE_FACES[loop[(a_idx + m) % n_loop]]:
                                safe = 0
                                break
                        if safe:
                            apex = a_idx
                            break
                    if apex >= 0:
                        for m in range(1, n_loop - 1):
                            tris.push_back(vids[apex])
                            tris.push_back(vids[(apex + m) % n_loop])
                            tris.push_back(vids[(apex + m + 1) % n_loop])
                    else:
                        sx = 0.0
                        sy = 0.0
                        sz = 0.0
                        for m in range(n_loop):
                            vid = vids[m]
                            sx += verts[3 * vid]
                            sy += verts[3 * vid + 1]
                            sz += verts[3 * vid + 2]
                        centroid = <long long> (verts.size() / 3)
                        verts.push_back(sx / n_loop)
                        verts.push_back(sy / n_loop)
                        verts.push_back(sz / n_loop)
                        for m in range(n_loop):
                            tris.push_back(centroid)
                            tris.push_back(vids[m])
                            tris.push_back(vids[(m + 1) % n_loop])

    vertices = np.empty((verts.size() / 3, 3), dtype=np.float64)
    triangles = np.empty((tris.size() / 3, 3), dtype=np.int64)
    cdef double[:, ::1] vo = vertices
    cdef long long[:, ::1] to = triangles
    cdef Py_ssize_t idx
    for idx in range(<Py_ssize_t> (verts.size() / 3)):
        vo[idx, 0] = verts[3 * idx]
        vo[idx, 1] = verts[3 * idx + 1]
        vo[idx, 2] = verts[3 * idx + 2]
    for idx in range(<Py_ssize_t> (tris.size() / 3)):
        to[idx, 0] = tris[3 * idx]
        to[idx, 1] = tris[3 * idx + 1]
        to[idx, 2] = tris[3 * idx + 2]
    return vertices, triangles
