"""Café Wall illusion stimuli, multiscale DoG edge maps and Hough tilt analysis."""

from ._backend import BACKEND

__version__ = "0.1.0"
