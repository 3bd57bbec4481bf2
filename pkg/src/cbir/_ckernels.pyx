# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pixel kernels. Mirrors ``cbir._kernels_py`` function by function."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _clamp(Py_ssize_t v, Py_ssize_t hi) nogil:
    if v < 0:
        return 0
    if v > hi:
        return hi
    return v


def convolve3(img, kernel):
    cdef double[:, ::1] src = np.ascontiguousarray(img, dtype=np.float64)
    cdef double[:, ::1] k = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t x, y, i, j
    cdef double acc, kv
    with nogil:
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for i in range(3):
                    for j in range(3):
                        kv = k[i, j]
                        if kv != 0.0:
                            acc = acc + kv * src[_clamp(y + i - 1, h - 1), _clamp(x + j - 1, w - 1)]
                out[y, x] = acc
    return out_arr


def chamfer34(init):
    out_arr = np.array(init, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] d = out_arr
    cdef Py_ssize_t h = d.shape[0], w = d.shape[1]
    cdef Py_ssize_t x, y
    cdef double v
    with nogil:
        for y in range(h):
            for x in range(w):
                v = d[y, x]
                if x > 0 and d[y, x - 1] + 3.0 < v:
                    v = d[y, x - 1] + 3.0
                if y > 0:
                    if d[y - 1, x] + 3.0 < v:
                        v = d[y - 1, x] + 3.0
                    if x > 0 and d[y - 1, x - 1] + 4.0 < v:
                        v = d[y - 1, x - 1] + 4.0
                    if x + 1 < w and d[y - 1, x + 1] + 4.0 < v:
                        v = d[y - 1, x + 1] + 4.0
                d[y, x] = v
        for y in range(h - 1, -1, -1):
            for x in range(w - 1, -1, -1):
                v = d[y, x]
                if x + 1 < w and d[y, x + 1] + 3.0 < v:
                    v = d[y, x + 1] + 3.0
                if y + 1 < h:
                    if d[y + 1, x] + 3.0 < v:
                        v = d[y + 1, x] + 3.0
                    if x + 1 < w and d[y + 1, x + 1] + 4.0 < v:
                        v = d[y + 1, x + 1] + 4.0
                    if x > 0 and d[y + 1, x - 1] + 4.0 < v:
                        v = d[y + 1, x - 1] + 4.0
                d[y, x] = v
    return out_arr


cdef void _accumulate(const Py_ssize_t[:, ::1] q, cnp.int64_t[:, :, ::1] out,
                      Py_ssize_t plane, Py_ssize_t dx, Py_ssize_t dy) noexcept nogil:
    cdef Py_ssize_t h = q.shape[0], w = q.shape[1]
    cdef Py_ssize_t ys = 0 if dy >= 0 else -dy
    cdef Py_ssize_t ye = h - dy if dy >= 0 else h
    cdef Py_ssize_t xs = 0 if dx >= 0 else -dx
    cdef Py_ssize_t xe = w - dx if dx >= 0 else w
    cdef Py_ssize_t x, y
    for y in range(ys, ye):
        for x in range(xs, xe):
            out[q[y, x], q[y + dy, x + dx], plane] += 1


def cooccurrence_counts(q, int levels, int dx, int dy):
    cdef const Py_ssize_t[:, ::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    out_arr = np.zeros((levels, levels, 1), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] out = out_arr
    with nogil:
        _accumulate(qv, out, 0, dx, dy)
    return out_arr[:, :, 0].copy()


def correlogram_counts(q, int levels, distances):
    cdef const Py_ssize_t[:, ::1] qv = np.ascontiguousarray(q, dtype=np.intp)
    cdef Py_ssize_t nd = len(distances)
    out_arr = np.zeros((levels, levels, nd), dtype=np.int64)
    cdef cnp.int64_t[:, :, ::1] out = out_arr
    cdef Py_ssize_t k, d, dx, dy
    for k in range(nd):
        d = int(distances[k])
        with nogil:
            if d == 0:
                _accumulate(qv, out, k, 0, 0)
            else:
                for dy in range(-d, d + 1):
                    for dx in range(-d, d + 1):
                        if dx == d or dx == -d or dy == d or dy == -d:
                            _accumulate(qv, out, k, dx, dy)
    return out_arr
