"""Orientation statistics of detected lines and the derived illusion features."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dogfilter import EdgeMapStack
from .hough import HoughParams, LineSegment, detect_lines

__all__ = [
    "BUCKETS",
    "BUCKET_REFERENCE",
    "PMC",
    "Strength",
    "STRENGTH_ORDER",
    "OrientationBucket",
    "TiltCell",
    "MeanTiltTable",
    "TiltFeatures",
    "FTE_SCALE",
    "PMC_STEP_DEG",
    "segment_angle",
    "bucket_of",
    "bucket_lines",
    "summarize",
    "mean_tilt_table",
    "persistence_scale",
    "extract_fte",
    "extract_pmc",
    "correct_pmc_for_mortar_width",
    "h_tilt_range",
    "classify_strength",
    "compute_features",
    "mixed_sign_rows",
]

BUCKETS = ("H", "V", "D1", "D2")
BUCKET_REFERENCE = {"H": 0.0, "V": 90.0, "D1": 45.0, "D2": -45.0}
HALF_WIDTH = 22.5
FTE_SCALE = 4.0
PMC_STEP_DEG = 1.0


class PMC(str, enum.Enum):
    """Persistence of mortar cues across scales."""

    NONE = "None"
    L = "L"
    ML = "ML"
    M = "M"
    MH = "MH"
    H = "H"


class Strength(str, enum.Enum):
    NO_ILLUSION = "NoIllusion"
    VERY_WEAK = "VeryWeak"
    MEDIUM_LOW = "MediumLow"
    MEDIUM = "Medium"
    MEDIUM_HIGH = "MediumHigh"
    STRONG = "Strong"


STRENGTH_ORDER = list(Strength)


def segment_angle(seg: LineSegment) -> float:
    """On-screen angle of a segment in degrees, in [-90, 90).

    Counter-clockwise positive as viewed (image y grows downward), derived
    from the bin angle: a normal at theta gives a line at 90 - theta.
    """
    return ((90.0 - seg.theta + 90.0) % 180.0) - 90.0


def bucket_of(angle: float) -> tuple[str, float]:
    """Bucket name and signed deviation from its reference.

    Intervals are half-open, [ref - 22.5, ref + 22.5), so 22.5 exactly is D1.
    """
    for name in ("H", "D1", "V", "D2"):
        dev = ((angle - BUCKET_REFERENCE[name] + 90.0) % 180.0) - 90.0
        if -HALF_WIDTH <= dev < HALF_WIDTH:
            return name, dev
    raise AssertionError(f"angle {angle} fell outside every bucket")


@dataclass
class OrientationBucket:
    reference: str
    segments: list[LineSegment] = field(default_factory=list)
    signed: list[float] = field(default_factory=list)

    @property
    def deviations(self) -> list[float]:
        return [abs(s) for s in self.signed]


def bucket_lines(segments: Iterable[LineSegment]) -> dict[str, OrientationBucket]:
    buckets = {name: OrientationBucket(name) for name in BUCKETS}
    for seg in segments:
        name, dev = bucket_of(segment_angle(seg))
        buckets[name].segments.append(seg)
        buckets[name].signed.append(dev)
    return buckets


@dataclass(frozen=True)
class TiltCell:
    """Statistics of one bucket at one scale; NaN means no lines."""

    n_lines: int
    mean_abs_tilt: float
    std_error: float
    mean_signed_tilt: float
    n_positive: int = 0
    n_negative: int = 0

    @property
    def present(self) -> bool:
        return self.n_lines > 0

    @property
    def std_error_flagged(self) -> bool:
        """True when the standard error is a placeholder (a single line)."""
        return self.n_lines == 1


def summarize(signed: Sequence[float]) -> TiltCell:
    n = len(signed)
    if n == 0:
        return TiltCell(0, math.nan, math.nan, math.nan)
    s = np.asarray(signed, dtype=np.float64)
    a = np.abs(s)
    se = float(a.std(ddof=1) / math.sqrt(n)) if n >= 2 else 0.0
    return TiltCell(
        n,
        float(a.mean()),
        se,
        float(s.mean()),
        int((s > 0).sum()),
        int((s < 0).sum()),
    )


@dataclass
class MeanTiltTable:
    scales: list[float]
    cells: dict[tuple[float, str], TiltCell]
    segments: dict[float, list[LineSegment]] = field(default_factory=dict, repr=False)

    def cell(self, scale: float, bucket: str = "H") -> TiltCell:
        return self.cells[(float(scale), bucket)]

    def h_mean(self, scale: float) -> float | None:
        """Mean absolute H tilt at ``scale``, None when absent."""
        key = (float(scale), "H")
        if key not in self.cells or not self.cells[key].present:
            return None
        return self.cells[key].mean_abs_tilt

    def bucket_segments(self, scale: float, bucket: str = "H") -> list[tuple[LineSegment, float]]:
        out = []
        for seg in self.segments.get(float(scale), []):
            name, dev = bucket_of(segment_angle(seg))
            if name == bucket:
                out.append((seg, dev))
        return out

    def __eq__(self, other):
        if not isinstance(other, MeanTiltTable):
            return NotImplemented
        if self.scales != other.scales or self.cells.keys() != other.cells.keys():
            return False
        for k, a in self.cells.items():
            b = other.cells[k]
            for x, y in zip(a.__dict__.values(), b.__dict__.values()):
                if not (x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y))):
                    return False
        return True


def table_from_segments(per_scale: dict[float, list[LineSegment]]) -> MeanTiltTable:
    scales = sorted(float(s) for s in per_scale)
    cells = {}
    for s in scales:
        buckets = bucket_lines(per_scale[s])
        for name in BUCKETS:
            cells[(s, name)] = summarize(buckets[name].signed)
    return MeanTiltTable(scales, cells, {float(s): list(v) for s, v in per_scale.items()})


def mean_tilt_table(stack: EdgeMapStack, hough_params: HoughParams = HoughParams()) -> MeanTiltTable:
    """Run the line detector on every binary map with one shared parameter set."""
    if len(stack) == 0:
        raise ValueError("edge map stack is empty")
    per_scale = {e.sigma_c: detect_lines(e.binary, hough_params) for e in stack}
    return table_from_segments(per_scale)


def persistence_scale(table: MeanTiltTable) -> float | None:
    """Last scale of the chain of >= 1 degree increases starting at scale 4.

    None when scale 4 has no H lines. A missing or non-increasing scale ends
    the chain.
    """
    scales = [s for s in table.scales if s >= FTE_SCALE]
    if not scales or scales[0] != FTE_SCALE or table.h_mean(FTE_SCALE) is None:
        return None
    best = FTE_SCALE
    prev = table.h_mean(FTE_SCALE)
    for s in scales[1:]:
        m = table.h_mean(s)
        if m is None or m - prev < PMC_STEP_DEG - 1e-9:
            break
        best, prev = s, m
    return best


def extract_fte(table: MeanTiltTable) -> float:
    if FTE_SCALE not in table.scales:
        raise ValueError(f"table has no scale {FTE_SCALE:g}; cannot read the foveal tilt")
    m = table.h_mean(FTE_SCALE)
    return 0.0 if m is None else m


def _pmc_from_scale(sigma: float | None) -> PMC:
    if sigma is None:
        return PMC.NONE
    if sigma <= 4:
        return PMC.L
    if sigma <= 8:
        return PMC.ML
    if sigma <= 12:
        return PMC.M
    if sigma <= 16:
        return PMC.MH
    return PMC.H


def extract_pmc(table: MeanTiltTable) -> PMC:
    return _pmc_from_scale(persistence_scale(table))


def correct_pmc_for_mortar_width(pmc: PMC, table: MeanTiltTable, mortar_px: float) -> PMC:
    """Grade persistence relative to the mortar width instead of absolute scale."""
    if mortar_px <= 0 or pmc is PMC.NONE:
        return pmc
    sigma = persistence_scale(table)
    if sigma is None:
        return pmc
    ratio = sigma / mortar_px
    if ratio < 1:
        return PMC.ML
    if ratio == 1:
        return PMC.M
    if ratio <= 2:
        return PMC.MH
    return PMC.H


def h_tilt_range(table: MeanTiltTable) -> tuple[float, float] | None:
    """(min, max) H mean over the persistence chain; None without one."""
    top = persistence_scale(table)
    if top is None:
        return None
    vals = [table.h_mean(s) for s in table.scales if FTE_SCALE <= s <= top]
    vals = [v for v in vals if v is not None]
    return (min(vals), max(vals))


def classify_strength(fte: float, pmc_corrected: PMC) -> Strength:
    pmc = PMC(pmc_corrected)
    if fte == 0.0 and pmc is PMC.NONE:
        return Strength.NO_ILLUSION
    if fte < 1.0:
        return Strength.VERY_WEAK
    return {
        PMC.NONE: Strength.VERY_WEAK,
        PMC.L: Strength.MEDIUM_LOW,
        PMC.ML: Strength.MEDIUM_LOW,
        PMC.M: Strength.MEDIUM,
        PMC.MH: Strength.MEDIUM_HIGH,
        PMC.H: Strength.STRONG,
    }[pmc]


@dataclass(frozen=True)
class TiltFeatures:
    fte: float
    pmc: PMC
    pmc_corrected: PMC
    h_range: tuple[float, float] | None
    strength: Strength
    persistence_scale: float | None = None


def compute_features(table: MeanTiltTable, mortar_px: float | None = None) -> TiltFeatures:
    """Features for one stimulus.

    ``mortar_px`` switches on the mortar-width correction; pass it only for
    the mortar-width series.
    """
    fte = extract_fte(table)
    pmc = extract_pmc(table)
    corrected = pmc if mortar_px is None else correct_pmc_for_mortar_width(pmc, table, mortar_px)
    return TiltFeatures(
        fte=fte,
        pmc=pmc,
        pmc_corrected=corrected,
        h_range=h_tilt_range(table),
        strength=classify_strength(fte, corrected),
        persistence_scale=persistence_scale(table),
    )


def mixed_sign_rows(
    table: MeanTiltTable, scale: float, row_centers: Sequence[float], radius: float
) -> list[float]:
    """Mortar positions whose nearby H lines include both tilt signs.

    A segment belongs to the row centre nearest its midpoint, provided the
    midpoint lies within ``radius`` pixels of it.
    """
    signs: dict[float, set[int]] = {}
    for seg, dev in table.bucket_segments(scale, "H"):
        if dev == 0:
            continue
        ym = (seg.y1 + seg.y2) / 2
        c = min(row_centers, key=lambda r: abs(r - ym))
        if abs(c - ym) <= radius:
            signs.setdefault(c, set()).add(1 if dev > 0 else -1)
    return sorted(c for c, s in signs.items() if len(s) == 2)
