"""Straight-line Hough transform with peak suppression and gap filling.

Coordinates follow image convention: ``x`` is the column, ``y`` the row,
origin at the top-left pixel. A bin ``(rho, theta)`` holds the pixels on
``x*cos(theta) + y*sin(theta) = rho`` with theta in [-90, 90) degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

__all__ = [
    "HoughAccumulator",
    "HoughParams",
    "Peak",
    "LineSegment",
    "hough_transform",
    "hough_peaks",
    "hough_lines",
    "detect_lines",
    "default_nhood",
]


@dataclass(frozen=True)
class HoughParams:
    num_peaks: int = 1000
    threshold_frac: float = 0.5
    nhood: tuple[int, int] | None = None
    fill_gap: float = 40.0
    min_length: float = 450.0
    rho_step: float = 1.0
    theta_step: float = 1.0

    def __post_init__(self):
        if self.num_peaks < 1:
            raise ValueError("num_peaks must be >= 1")
        if not 0 < self.threshold_frac <= 1:
            raise ValueError("threshold_frac must lie in (0, 1]")
        if self.nhood is not None and any(n < 1 or n % 2 == 0 for n in self.nhood):
            raise ValueError(f"nhood components must be odd and positive, got {self.nhood}")
        if self.rho_step <= 0 or self.theta_step <= 0:
            raise ValueError("rho_step and theta_step must be > 0")

    @property
    def rho_tolerance(self) -> float:
        """Max distance from the bin's rho for a pixel to join its line."""
        return self.rho_step / 2 + 0.5


@dataclass
class HoughAccumulator:
    bins: np.ndarray  # (n_rho, n_theta) int64
    rho_step: float
    theta_step: float
    q: int  # rho index offset: rho = (index - q) * rho_step

    @property
    def rhos(self) -> np.ndarray:
        return (np.arange(self.bins.shape[0]) - self.q) * self.rho_step

    @property
    def thetas(self) -> np.ndarray:
        """Bin angles in degrees."""
        return -90.0 + np.arange(self.bins.shape[1]) * self.theta_step


@dataclass(frozen=True)
class Peak:
    rho_index: int
    theta_index: int
    rho: float
    theta: float
    votes: int


@dataclass(frozen=True)
class LineSegment:
    x1: int
    y1: int
    x2: int
    y2: int
    theta: float
    rho: float

    @property
    def p1(self) -> tuple[int, int]:
        return self.x1, self.y1

    @property
    def p2(self) -> tuple[int, int]:
        return self.x2, self.y2

    @property
    def length(self) -> float:
        return math.hypot(self.x2 - self.x1, self.y2 - self.y1)


def _theta_grid(theta_step: float) -> np.ndarray:
    n = int(round(180.0 / theta_step))
    return -90.0 + np.arange(n) * theta_step


def _foreground(binary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.nonzero(np.asarray(binary))
    return xs.astype(np.intc), ys.astype(np.intc)


def hough_transform(binary: np.ndarray, rho_step: float = 1.0, theta_step: float = 1.0) -> HoughAccumulator:
    binary = np.asarray(binary, dtype=bool)
    if binary.ndim != 2 or binary.size == 0:
        raise ValueError("binary must be a non-empty 2-D array")
    h, w = binary.shape
    diag = math.hypot(h - 1, w - 1)
    q = int(math.ceil(diag / rho_step))
    thetas = np.deg2rad(_theta_grid(theta_step))
    xs, ys = _foreground(binary)
    bins = kernels.hough_vote(xs, ys, np.cos(thetas), np.sin(thetas), float(rho_step), q)
    return HoughAccumulator(np.asarray(bins), rho_step, theta_step, q)


def default_nhood(shape: tuple[int, int]) -> tuple[int, int]:
    """Smallest odd sizes >= one fiftieth of each accumulator dimension."""
    out = []
    for n in shape:
        k = max(int(math.ceil(n / 50.0)), 1)
        out.append(k if k % 2 else k + 1)
    return out[0], out[1]


def hough_peaks(acc: HoughAccumulator, params: HoughParams = HoughParams()) -> list[Peak]:
    """Greedy maxima with neighbourhood suppression.

    Ties go to the smallest rho index, then the smallest theta index.
    """
    bins = acc.bins
    top = int(bins.max()) if bins.size else 0
    if top <= 0:
        return []
    nh = params.nhood or default_nhood(bins.shape)
    found = kernels.hough_peaks(
        np.ascontiguousarray(bins, dtype=np.int64),
        params.num_peaks,
        params.threshold_frac * top,
        nh[0],
        nh[1],
    )
    rhos, thetas = acc.rhos, acc.thetas
    return [Peak(r, c, float(rhos[r]), float(thetas[c]), int(bins[r, c])) for r, c in found]


def hough_lines(binary: np.ndarray, peaks: list[Peak], params: HoughParams = HoughParams()) -> list[LineSegment]:
    xs, ys = _foreground(binary)
    tol = params.rho_tolerance
    gap2 = params.fill_gap ** 2
    min2 = params.min_length ** 2
    by_theta: dict[float, list[int]] = {}
    for k, pk in enumerate(peaks):
        by_theta.setdefault(pk.theta, []).append(k)
    members: list[np.ndarray] = [None] * len(peaks)
    for theta, ks in by_theta.items():
        t = math.radians(theta)
        rhos = np.array([peaks[k].rho for k in ks], dtype=np.float64)
        for k, idx in zip(ks, kernels.line_members_batch(xs, ys, math.cos(t), math.sin(t), rhos, tol)):
            members[k] = idx

    segments: list[LineSegment] = []
    for pk, idx in zip(peaks, members):
        if len(idx) == 0:
            continue
        px, py = xs[idx].astype(np.int64), ys[idx].astype(np.int64)
        if np.ptp(py) > np.ptp(px):
            order = np.lexsort((px, py))
        else:
            order = np.lexsort((py, px))
        px, py = px[order], py[order]
        d2 = np.diff(px) ** 2 + np.diff(py) ** 2
        breaks = np.flatnonzero(d2 > gap2)
        starts = np.concatenate(([0], breaks + 1))
        ends = np.concatenate((breaks, [len(px) - 1]))
        for s, e in zip(starts, ends):
            if (px[e] - px[s]) ** 2 + (py[e] - py[s]) ** 2 >= min2:
                segments.append(
                    LineSegment(int(px[s]), int(py[s]), int(px[e]), int(py[e]), pk.theta, pk.rho)
                )
    return segments


def detect_lines(binary: np.ndarray, params: HoughParams = HoughParams()) -> list[LineSegment]:
    """Accumulate, find peaks and extract segments in one call."""
    acc = hough_transform(binary, params.rho_step, params.theta_step)
    return hough_lines(binary, hough_peaks(acc, params), params)
