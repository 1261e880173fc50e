"""Procedural Café Wall stimuli.

Every stimulus is a 2-D float64 array of relative luminance in [0, 1],
indexed ``[row, column]`` with the origin at the top-left corner.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "StimulusSpec",
    "StimulusError",
    "CANONICAL",
    "generate",
    "generate_cafe_wall",
    "generate_hollow_square",
    "generate_fig4_suite",
    "mortar_width_family",
    "mirror",
    "row_offsets",
    "save_png",
    "spec_to_text",
    "spec_from_text",
]

HOLLOW_BACKGROUND = 1.0
HOLLOW_OUTLINE = 0.0


class StimulusError(ValueError):
    """Raised for a stimulus spec that violates its invariants."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class StimulusSpec:
    rows: int = 3
    cols: int = 8
    tile_px: int = 200
    mortar_px: int = 8
    mortar_lum: float = 0.5
    tile_lum_dark: float = 0.0
    tile_lum_light: float = 1.0
    phase_shift: float = 0.5
    mirrored: bool = False
    hollow: bool = False
    # None means half the mortar width, so two abutting outlines match the mortar
    outline_px: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("rows", "cols", "tile_px"):
            if int(getattr(self, name)) < 1:
                raise StimulusError(name, "must be >= 1")
        if self.mortar_px < 0:
            raise StimulusError("mortar_px", "must be >= 0")
        for name in ("mortar_lum", "tile_lum_dark", "tile_lum_light"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise StimulusError(name, f"luminance {v} outside [0, 1]")
        if self.tile_lum_dark > self.tile_lum_light:
            raise StimulusError("tile_lum_dark", "must not exceed tile_lum_light")
        if not 0.0 <= self.phase_shift < 1.0:
            raise StimulusError("phase_shift", f"{self.phase_shift} outside [0, 1)")
        if self.outline_px is not None and not 1 <= self.outline_px <= self.tile_px / 2:
            raise StimulusError("outline_px", "must lie in [1, tile_px / 2]")
        if self.hollow and self.effective_outline_px < 1:
            raise StimulusError("outline_px", "hollow stimulus needs an outline >= 1px")

    @property
    def effective_outline_px(self) -> int:
        if self.outline_px is not None:
            return self.outline_px
        return int(math.floor(self.mortar_px / 2 + 0.5))

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width) of the generated image."""
        if self.hollow:
            return self.rows * self.tile_px, self.cols * self.tile_px
        return (
            self.rows * self.tile_px + (self.rows - 1) * self.mortar_px,
            self.cols * self.tile_px,
        )

    def replace(self, **changes) -> "StimulusSpec":
        return dataclasses.replace(self, **changes)


CANONICAL = StimulusSpec()


def row_offsets(spec: StimulusSpec) -> list[int]:
    """Horizontal offset in pixels of each tile row."""
    T = spec.tile_px
    out = []
    for r in range(spec.rows):
        off = math.floor((r * spec.phase_shift * T) % T + 0.5)
        out.append(off % T)
    return out


def mirror(image: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(image[:, ::-1])


def generate_cafe_wall(spec: StimulusSpec) -> np.ndarray:
    if spec.hollow:
        raise StimulusError("hollow", "use generate_hollow_square for hollow specs")
    height, width = spec.shape
    T, M = spec.tile_px, spec.mortar_px
    img = np.full((height, width), float(spec.mortar_lum))
    x = np.arange(width)
    for r, off in enumerate(row_offsets(spec)):
        # tiles wrap around the row so every phase keeps the same width
        parity = ((x - off) // T) % 2
        row = np.where(parity == 0, spec.tile_lum_dark, spec.tile_lum_light)
        y0 = r * (T + M)
        img[y0:y0 + T] = row
    if spec.mirrored:
        img = mirror(img)
    return img


def generate_hollow_square(spec: StimulusSpec) -> np.ndarray:
    if not spec.hollow:
        raise StimulusError("hollow", "generate_hollow_square needs hollow=True")
    height, width = spec.shape
    T, o = spec.tile_px, spec.effective_outline_px
    img = np.full((height, width), HOLLOW_BACKGROUND)
    x = np.arange(width)
    for r, off in enumerate(row_offsets(spec)):
        local = (x - off) % T
        vertical = (local < o) | (local >= T - o)
        y0 = r * T
        img[y0:y0 + T, vertical] = HOLLOW_OUTLINE
        img[y0:y0 + o] = HOLLOW_OUTLINE
        img[y0 + T - o:y0 + T] = HOLLOW_OUTLINE
    if spec.mirrored:
        img = mirror(img)
    return img


def generate(spec: StimulusSpec) -> np.ndarray:
    return generate_hollow_square(spec) if spec.hollow else generate_cafe_wall(spec)


def generate_fig4_suite() -> list[tuple[str, StimulusSpec]]:
    """The eighteen named variations, in presentation order.

    ``ML=0.50`` and ``MW=8`` are the same canonical wall under two names.
    """
    c = CANONICAL
    suite = [(f"ML={ml:.2f}", c.replace(mortar_lum=ml)) for ml in (0.0, 0.25, 0.5, 0.75, 1.0)]
    suite += [(f"MW={mw}", c.replace(mortar_px=mw)) for mw in (0, 4, 8, 16, 32, 64)]
    grey = dict(tile_lum_dark=0.25, tile_lum_light=0.75)
    suite += [(f"GreyTiles ML={ml:.2f}", c.replace(mortar_lum=ml, **grey)) for ml in (0.0, 0.5, 1.0)]
    suite += [
        ("Shift=1/3", c.replace(phase_shift=1 / 3)),
        ("Shift=1/5", c.replace(phase_shift=1 / 5)),
        ("Direction Change", c.replace(mirrored=True)),
        ("Hollow Square", c.replace(hollow=True)),
    ]
    return suite


def mortar_width_family(name: str) -> bool:
    """Whether a suite entry belongs to the mortar-width series."""
    return name.startswith("MW=")


def save_png(image: np.ndarray, path: str | Path) -> None:
    from PIL import Image

    data = np.floor(np.clip(image, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(data, mode="L").save(path)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(StimulusSpec)}


def spec_to_text(spec: StimulusSpec) -> str:
    lines = []
    for f in dataclasses.fields(spec):
        v = getattr(spec, f.name)
        lines.append(f"{f.name} = {'none' if v is None else repr(v)}")
    return "\n".join(lines) + "\n"


def _parse_value(name: str, raw: str):
    raw = raw.strip()
    kind = _FIELD_TYPES[name]
    if "bool" in kind:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise StimulusError(name, f"not a boolean: {raw!r}")
    if raw.lower() == "none" and "None" in kind:
        return None
    if "int" in kind:
        return int(raw)
    if "/" in raw:
        num, den = raw.split("/", 1)
        return float(num) / float(den)
    return float(raw)


def spec_from_text(text: str) -> StimulusSpec:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise StimulusError(f"line {lineno}", f"expected key = value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise StimulusError(key, "unknown stimulus field")
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            if isinstance(exc, StimulusError):
                raise
            raise StimulusError(key, f"cannot parse {raw!r}") from exc
    return StimulusSpec(**values)
