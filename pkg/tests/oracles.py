"""Independent reference implementations used only by the tests.

Nothing here imports the package's numerical code: each oracle recomputes
its answer from first principles with plain loops, so agreement with the
package is evidence rather than tautology.
"""

import math

import numpy as np


def direct_convolve_2d(image, kernel):
    """Brute-force 2-D correlation with edge-replicated borders.

    The kernel is centro-symmetric in every use, so correlation equals
    convolution.
    """
    image = np.asarray(image, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    half = k.shape[0] // 2
    padded = np.pad(image, half, mode="edge")
    h, w = image.shape
    out = np.zeros_like(image)
    for dy in range(k.shape[0]):
        for dx in range(k.shape[1]):
            out += k[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return out


def dog_weights(sigma_c, surround_ratio, window_ratio):
    """DoG weights built straight from the Gaussian formula, no package code."""
    size = int(math.floor(window_ratio * sigma_c + 1.5))
    if size % 2 == 0:
        size += 1
    half = size // 2
    out = np.zeros((size, size))
    for sigma, sign in ((sigma_c, 1.0), (surround_ratio * sigma_c, -1.0)):
        g = np.empty((size, size))
        for i in range(size):
            for j in range(size):
                r2 = (i - half) ** 2 + (j - half) ** 2
                g[i, j] = math.exp(-r2 / (2.0 * sigma * sigma))
        out += sign * g / g.sum()
    return out


def hough_votes_exhaustive(binary, rho_step=1.0, theta_step=1.0):
    """Per-pixel, per-angle vote counting with Python floats.

    Returns (counts dict keyed by (rho_index, theta_index), q, n_theta).
    """
    binary = np.asarray(binary, dtype=bool)
    h, w = binary.shape
    q = math.ceil(math.hypot(h - 1, w - 1) / rho_step)
    n_theta = int(round(180.0 / theta_step))
    counts = {}
    for y in range(h):
        for x in range(w):
            if not binary[y, x]:
                continue
            for t in range(n_theta):
                th = math.radians(-90.0 + t * theta_step)
                rho = x * math.cos(th) + y * math.sin(th)
                r = math.floor(rho / rho_step + q + 0.5)
                counts[(r, t)] = counts.get((r, t), 0) + 1
    return counts, q, n_theta


def strength_by_rules(fte, pmc):
    """Strength class by walking the rule list top to bottom."""
    if fte == 0.0 and pmc == "None":
        return "NoIllusion"
    if fte < 1.0:
        return "VeryWeak"
    if pmc == "None":
        # lines at the finest scale always give a PMC, so this only occurs
        # for hand-made inputs; treated as the weakest non-zero class
        return "VeryWeak"
    if pmc in ("L", "ML"):
        return "MediumLow"
    if pmc == "M":
        return "Medium"
    if pmc == "MH":
        return "MediumHigh"
    return "Strong"


def pmc_by_hand(h_means):
    """PMC from a {scale: mean or None} mapping, re-deriving the chain rule."""
    scales = sorted(h_means)
    if 4.0 not in h_means or h_means[4.0] is None:
        return "None", None
    top, prev = 4.0, h_means[4.0]
    for s in scales[scales.index(4.0) + 1:]:
        cur = h_means[s]
        if cur is None or cur - prev < 1.0 - 1e-9:
            break
        top, prev = s, cur
    labels = {4.0: "L", 8.0: "ML", 12.0: "M", 16.0: "MH"}
    return labels.get(top, "H"), top
