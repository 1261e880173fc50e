"""Balanced Difference-of-Gaussians filtering and multiscale edge maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.ndimage import correlate1d

__all__ = [
    "DoGParams",
    "DoGKernel",
    "EdgeMapEntry",
    "EdgeMapStack",
    "ScaleError",
    "DEFAULT_SCALES",
    "EXTENDED_SCALES",
    "BINARIZE_THRESHOLD",
    "auto_scales",
    "window_size",
    "gaussian_kernel",
    "gaussian_kernel_1d",
    "dog_kernel",
    "log_kernel_reference",
    "convolve",
    "binarize",
    "build_edge_map_stack",
]

DEFAULT_SCALES = (4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0)
EXTENDED_SCALES = (32.0, 40.0, 48.0)

# Uniform regions come out of the balanced filter as +-1e-16 rounding noise
# rather than exact zeros; anything below this is not foreground.
BINARIZE_THRESHOLD = 1e-9


class ScaleError(ValueError):
    """A filter scale whose window does not fit inside the image."""


@dataclass(frozen=True)
class DoGParams:
    sigma_c: float
    surround_ratio: float = 2.0
    window_ratio: float = 8.0

    def __post_init__(self):
        if not self.sigma_c > 0:
            raise ValueError(f"sigma_c must be > 0, got {self.sigma_c}")
        if not self.surround_ratio > 1:
            raise ValueError(f"surround_ratio must be > 1, got {self.surround_ratio}")
        if not self.window_ratio >= 2:
            raise ValueError(f"window_ratio must be >= 2, got {self.window_ratio}")

    @property
    def sigma_s(self) -> float:
        return self.surround_ratio * self.sigma_c

    @property
    def size(self) -> int:
        return window_size(self.sigma_c, self.window_ratio)


@dataclass(frozen=True)
class DoGKernel:
    size: int
    weights: np.ndarray
    params: DoGParams


def window_size(sigma_c: float, window_ratio: float) -> int:
    """Side length ``h * sigma_c + 1``, rounded and forced odd."""
    size = int(math.floor(window_ratio * sigma_c + 1 + 0.5))
    if size % 2 == 0:
        size += 1
    return size


def auto_scales(base: float = 8.0, steps: int = 7) -> tuple[float, ...]:
    """Scales 0.5*base .. steps*0.5*base in increments of 0.5*base."""
    return tuple(0.5 * base * k for k in range(1, steps + 1))


def _check_size(size: int) -> int:
    if size < 1 or size % 2 != 1:
        raise ValueError(f"kernel size must be a positive odd integer, got {size}")
    return size


def gaussian_kernel_1d(sigma: float, size: int) -> np.ndarray:
    _check_size(size)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    """Sampled 2-D Gaussian renormalized to unit sum.

    The analytic 1/(2*pi*sigma^2) factor is dropped in favour of explicit
    renormalization, so truncation at the window edge never unbalances a DoG.
    """
    _check_size(size)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    r2 = x[None, :] ** 2 + x[:, None] ** 2
    g = np.exp(-r2 / (2.0 * sigma * sigma))
    return g / g.sum()


def dog_kernel(params: DoGParams) -> DoGKernel:
    size = params.size
    w = gaussian_kernel(params.sigma_c, size) - gaussian_kernel(params.sigma_s, size)
    return DoGKernel(size=size, weights=w, params=params)


def log_kernel_reference(sigma: float, size: int) -> np.ndarray:
    """Sampled Laplacian of Gaussian, mean-subtracted to zero total weight.

    Only used to cross-check that a DoG with surround ratio near 1.6
    approximates the LoG.
    """
    _check_size(size)
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    r2 = x[None, :] ** 2 + x[:, None] ** 2
    s2 = sigma * sigma
    w = (r2 - 2.0 * s2) / (2.0 * np.pi * s2**3) * np.exp(-r2 / (2.0 * s2))
    return w - w.mean()


def _smooth(image: np.ndarray, g: np.ndarray) -> np.ndarray:
    # symmetric kernel: correlation == convolution; "nearest" replicates edges
    tmp = correlate1d(image, g, axis=0, mode="nearest")
    return correlate1d(tmp, g, axis=1, mode="nearest")


def convolve(image: np.ndarray, params: DoGParams) -> np.ndarray:
    """Signed DoG response, same shape as ``image``."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.size == 0:
        raise ValueError("image must be a non-empty 2-D array")
    size = params.size
    center = _smooth(image, gaussian_kernel_1d(params.sigma_c, size))
    surround = _smooth(image, gaussian_kernel_1d(params.sigma_s, size))
    return center - surround


def binarize(response: np.ndarray, threshold: float = BINARIZE_THRESHOLD) -> np.ndarray:
    """ON-centre foreground: True where the response exceeds ``threshold``."""
    return np.asarray(response) > threshold


@dataclass(frozen=True)
class EdgeMapEntry:
    sigma_c: float
    response: np.ndarray
    binary: np.ndarray


@dataclass
class EdgeMapStack:
    entries: list[EdgeMapEntry] = field(default_factory=list)
    source_spec: object = None

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def scales(self) -> list[float]:
        return [e.sigma_c for e in self.entries]

    def at(self, sigma_c: float) -> EdgeMapEntry:
        for e in self.entries:
            if e.sigma_c == sigma_c:
                return e
        raise KeyError(sigma_c)


def build_edge_map_stack(
    image: np.ndarray,
    scales: Sequence[float] = DEFAULT_SCALES,
    surround_ratio: float = 2.0,
    window_ratio: float = 8.0,
    threshold: float = BINARIZE_THRESHOLD,
    source_spec=None,
) -> EdgeMapStack:
    scales = [float(s) for s in scales]
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be > 0")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise ValueError(f"scales must be strictly increasing: {scales}")
    image = np.asarray(image, dtype=np.float64)
    limit = min(image.shape)
    params = [DoGParams(s, surround_ratio, window_ratio) for s in scales]
    for p in params:
        if p.size > limit:
            raise ScaleError(
                f"scale {p.sigma_c:g} needs a {p.size}px window but the image "
                f"is only {image.shape[0]}x{image.shape[1]}"
            )
    stack = EdgeMapStack(source_spec=source_spec)
    for p in params:
        resp = convolve(image, p)
        stack.entries.append(EdgeMapEntry(p.sigma_c, resp, binarize(resp, threshold)))
    return stack
