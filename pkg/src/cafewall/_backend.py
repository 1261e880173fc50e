"""Select the compiled Hough kernels when built, else the numpy fallback.

Set ``CAFEWALL_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _fallback

if os.environ.get("CAFEWALL_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _fallback
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
