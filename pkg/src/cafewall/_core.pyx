# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Hough kernels. Results match cafewall._fallback exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs

cnp.import_array()


def hough_vote(const int[:] xs, const int[:] ys, const double[:] cos_t,
               const double[:] sin_t, double rho_step, Py_ssize_t q):
    cdef Py_ssize_t n = xs.shape[0], nt = cos_t.shape[0], nr = 2 * q + 1
    cdef Py_ssize_t i, j
    cdef double c, s, off = q + 0.5
    acc_arr = np.zeros((nt, nr), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] acc = acc_arr
    for j in range(nt):
        c = cos_t[j]
        s = sin_t[j]
        for i in range(n):
            # argument is always positive, so the cast is a floor
            acc[j, <Py_ssize_t>((xs[i] * c + ys[i] * s) / rho_step + off)] += 1
    return np.ascontiguousarray(acc_arr.T)


def line_members(const int[:] xs, const int[:] ys, double c, double s,
                 double rho, double tol):
    cdef Py_ssize_t n = xs.shape[0], i, k = 0
    out_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] out = out_arr
    for i in range(n):
        if fabs(xs[i] * c + ys[i] * s - rho) <= tol:
            out[k] = i
            k += 1
    return out_arr[:k]


def line_members_batch(const int[:] xs, const int[:] ys, double c, double s,
                       const double[:] rhos, double tol):
    """Members of several lines sharing one angle; one projection per pixel.

    Lines are visited in rho order so each pixel only tests the lines near
    its projection. The search window is padded slightly; the exact
    ``fabs(...) <= tol`` test alone decides membership, as in the fallback.
    """
    cdef Py_ssize_t n = xs.shape[0], m = rhos.shape[0], i, k, lo, hi, mid
    cdef double v, pad = tol + 1e-6
    order_arr = np.argsort(np.asarray(rhos), kind="stable").astype(np.intp)
    cdef Py_ssize_t[::1] order = order_arr
    cdef double[::1] srt = np.ascontiguousarray(np.asarray(rhos)[order_arr], dtype=np.float64)
    cdef Py_ssize_t[::1] counts = np.zeros(m + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] first = np.empty(n, dtype=np.intp)
    cdef double[::1] proj = np.empty(n, dtype=np.float64)
    for i in range(n):
        v = xs[i] * c + ys[i] * s
        proj[i] = v
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) >> 1
            if srt[mid] < v - pad:
                lo = mid + 1
            else:
                hi = mid
        first[i] = lo
        k = lo
        while k < m and srt[k] <= v + pad:
            if fabs(v - srt[k]) <= tol:
                counts[k + 1] += 1
            k += 1
    offsets_arr = np.cumsum(counts)
    cdef Py_ssize_t[::1] offsets = offsets_arr
    flat_arr = np.empty(offsets[m], dtype=np.intp)
    cdef Py_ssize_t[::1] flat = flat_arr
    cdef Py_ssize_t[::1] fill = offsets_arr[:m].copy()
    for i in range(n):
        v = proj[i]
        k = first[i]
        while k < m and srt[k] <= v + pad:
            if fabs(v - srt[k]) <= tol:
                flat[fill[k]] = i
                fill[k] += 1
            k += 1
    outs = [None] * m
    for k in range(m):
        outs[order[k]] = flat_arr[offsets[k]:offsets[k + 1]]
    return outs


cdef inline cnp.int64_t _row_max(cnp.int64_t[:, ::1] h, Py_ssize_t r, Py_ssize_t nt):
    cdef cnp.int64_t m = h[r, 0]
    cdef Py_ssize_t c
    for c in range(1, nt):
        if h[r, c] > m:
            m = h[r, c]
    return m


def hough_peaks(const cnp.int64_t[:, :] acc_in, Py_ssize_t num_peaks,
                double threshold, Py_ssize_t nh_rho, Py_ssize_t nh_theta):
    cdef Py_ssize_t nr = acc_in.shape[0], nt = acc_in.shape[1]
    work_arr = np.array(acc_in, dtype=np.int64, order="C")
    cdef cnp.int64_t[:, ::1] h = work_arr
    rowmax_arr = work_arr.max(axis=1)
    cdef cnp.int64_t[::1] rowmax = rowmax_arr
    cdef Py_ssize_t r, c, br, bc, t, tt, rlo, rhi, rr, a, b
    cdef cnp.int64_t best
    cdef Py_ssize_t hr = nh_rho // 2, ht = nh_theta // 2
    peaks = []
    while len(peaks) < num_peaks:
        best = -1
        br = 0
        for r in range(nr):
            if rowmax[r] > best:
                best = rowmax[r]
                br = r
        if best <= 0 or best < threshold:
            break
        for c in range(nt):
            if h[br, c] == best:
                bc = c
                break
        peaks.append((br, bc))
        rlo = br - hr if br - hr > 0 else 0
        rhi = br + hr if br + hr < nr - 1 else nr - 1
        for t in range(bc - ht, bc + ht + 1):
            if 0 <= t < nt:
                tt = t
                a = rlo
                b = rhi
            else:
                # across the +-90 degree seam rho changes sign
                tt = t + nt if t < 0 else t - nt
                a = nr - 1 - rhi
                b = nr - 1 - rlo
            for rr in range(a, b + 1):
                h[rr, tt] = 0
        for rr in range(rlo, rhi + 1):
            rowmax[rr] = _row_max(h, rr, nt)
        if bc - ht < 0 or bc + ht >= nt:
            for rr in range(nr - 1 - rhi, nr - rlo):
                rowmax[rr] = _row_max(h, rr, nt)
    return peaks
