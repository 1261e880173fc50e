"""Pure numpy versions of the compiled Hough kernels in ``_core.pyx``."""

import numpy as np


def hough_vote(xs, ys, cos_t, sin_t, rho_step, q):
    nr, nt = 2 * q + 1, len(cos_t)
    acc = np.zeros((nr, nt), dtype=np.int64)
    x = xs.astype(np.float64)
    y = ys.astype(np.float64)
    off = q + 0.5
    for j in range(nt):
        b = ((x * cos_t[j] + y * sin_t[j]) / rho_step + off).astype(np.intp)
        acc[:, j] = np.bincount(b, minlength=nr)
    return acc


def line_members(xs, ys, c, s, rho, tol):
    proj = xs.astype(np.float64) * c + ys.astype(np.float64) * s
    return np.flatnonzero(np.abs(proj - rho) <= tol)


def line_members_batch(xs, ys, c, s, rhos, tol):
    proj = xs.astype(np.float64) * c + ys.astype(np.float64) * s
    return [np.flatnonzero(np.abs(proj - r) <= tol) for r in rhos]


def hough_peaks(acc, num_peaks, threshold, nh_rho, nh_theta):
    h = np.array(acc, dtype=np.int64)
    nr, nt = h.shape
    hr, ht = nh_rho // 2, nh_theta // 2
    peaks = []
    while len(peaks) < num_peaks:
        flat = int(np.argmax(h))
        r, c = divmod(flat, nt)
        best = h[r, c]
        if best <= 0 or best < threshold:
            break
        peaks.append((r, c))
        rlo, rhi = max(r - hr, 0), min(r + hr, nr - 1)
        for t in range(c - ht, c + ht + 1):
            if 0 <= t < nt:
                h[rlo:rhi + 1, t] = 0
            else:
                tt = t + nt if t < 0 else t - nt
                h[nr - 1 - rhi:nr - rlo, tt] = 0
    return peaks
