"""Renderings, result tables and the strength summary.

Output layout under a root directory::

    <root>/<stimulus>/<scale>/{binary,response,overlay}.png
    <root>/<stimulus>/tilts.csv|json, features.json, params.json
    <root>/summary.csv|json
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .hough import LineSegment
from .tiltanalysis import (
    BUCKETS,
    PMC,
    STRENGTH_ORDER,
    MeanTiltTable,
    Strength,
    TiltCell,
    TiltFeatures,
)

__all__ = [
    "RunReport",
    "COLORMAP",
    "render_overlay",
    "render_colormap",
    "save_rgb",
    "table_to_csv",
    "table_from_csv",
    "table_to_json",
    "table_from_json",
    "features_to_dict",
    "summary_rows",
    "emit_summary",
    "summary_to_csv",
    "summary_from_csv",
    "write_report",
    "safe_name",
]

GREEN = (0, 255, 0)
BLUE = (0, 0, 255)


def _build_colormap() -> np.ndarray:
    # 255 entries, index 127 is zero. Positive half: white, yellow, red, dark
    # red. The negative half is the same ramp with red and blue swapped.
    t = np.arange(128) / 127.0
    knots = [0.0, 1 / 3, 2 / 3, 1.0]
    r = np.interp(t, knots, [1.0, 1.0, 1.0, 0.5])
    g = np.interp(t, knots, [1.0, 1.0, 0.0, 0.0])
    b = np.interp(t, knots, [1.0, 0.0, 0.0, 0.0])
    warm = np.floor(np.stack([r, g, b], axis=1) * 255 + 0.5).astype(np.uint8)
    cool = warm[:, ::-1]
    return np.concatenate([cool[:0:-1], warm], axis=0)


COLORMAP = _build_colormap()


def render_colormap(response: np.ndarray) -> np.ndarray:
    """Diverging RGB rendering, symmetric about zero at max |response|."""
    response = np.asarray(response, dtype=np.float64)
    peak = float(np.abs(response).max()) if response.size else 0.0
    if peak == 0.0:
        idx = np.full(response.shape, 127, dtype=np.intp)
    else:
        idx = np.floor(127 + 127 * response / peak + 0.5).astype(np.intp)
        # exact symmetry: negate around the centre instead of rounding twice
        neg = response < 0
        idx[neg] = 254 - np.floor(127 + 127 * (-response[neg]) / peak + 0.5).astype(np.intp)
    return COLORMAP[np.clip(idx, 0, 254)]


def _line_pixels(x1: int, y1: int, x2: int, y2: int) -> tuple[np.ndarray, np.ndarray]:
    n = max(abs(x2 - x1), abs(y2 - y1)) + 1
    xs = np.floor(np.linspace(x1, x2, n) + 0.5).astype(np.intp)
    ys = np.floor(np.linspace(y1, y2, n) + 0.5).astype(np.intp)
    return xs, ys


def render_overlay(binary: np.ndarray, segments: Sequence[LineSegment]) -> np.ndarray:
    """Binary map in black/white with segments in green; the longest in blue."""
    binary = np.asarray(binary, dtype=bool)
    rgb = np.repeat((binary * 255).astype(np.uint8)[..., None], 3, axis=2)
    if not segments:
        return rgb
    longest = max(range(len(segments)), key=lambda i: (segments[i].length, -i))
    h, w = binary.shape
    order = [i for i in range(len(segments)) if i != longest] + [longest]
    for i in order:
        s = segments[i]
        xs, ys = _line_pixels(s.x1, s.y1, s.x2, s.y2)
        ok = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
        rgb[ys[ok], xs[ok]] = BLUE if i == longest else GREEN
    return rgb


def save_rgb(rgb: np.ndarray, path: str | Path) -> None:
    from PIL import Image

    Image.fromarray(np.asarray(rgb, dtype=np.uint8), mode="RGB").save(path)


def save_binary(binary: np.ndarray, path: str | Path) -> None:
    from PIL import Image

    Image.fromarray((np.asarray(binary, dtype=bool) * 255).astype(np.uint8), mode="L").save(path)


# -- tables -----------------------------------------------------------------

_CELL_FIELDS = ("mean", "se", "n", "signed", "npos", "nneg")


def _cell_values(c: TiltCell) -> list:
    return [c.mean_abs_tilt, c.std_error, c.n_lines, c.mean_signed_tilt, c.n_positive, c.n_negative]


def _cell_from(values: dict) -> TiltCell:
    f = lambda v: math.nan if v is None or v == "" else float(v)
    return TiltCell(
        n_lines=int(values["n"]),
        mean_abs_tilt=f(values["mean"]),
        std_error=f(values["se"]),
        mean_signed_tilt=f(values["signed"]),
        n_positive=int(values["npos"]),
        n_negative=int(values["nneg"]),
    )


def table_to_csv(table: MeanTiltTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scale"] + [f"{b}_{f}" for b in BUCKETS for f in _CELL_FIELDS])
    for s in table.scales:
        row = [repr(s)]
        for b in BUCKETS:
            row += [repr(v) if isinstance(v, float) else str(v) for v in _cell_values(table.cell(s, b))]
        w.writerow(row)
    return buf.getvalue()


def table_from_csv(text: str) -> MeanTiltTable:
    rows = list(csv.DictReader(io.StringIO(text)))
    scales, cells = [], {}
    for row in rows:
        s = float(row["scale"])
        scales.append(s)
        for b in BUCKETS:
            cells[(s, b)] = _cell_from({f: row[f"{b}_{f}"] for f in _CELL_FIELDS})
    return MeanTiltTable(scales, cells)


def _json_num(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def table_to_json(table: MeanTiltTable) -> str:
    doc = {
        "scales": table.scales,
        "cells": [
            {"scale": s, "bucket": b, **dict(zip(_CELL_FIELDS, map(_json_num, _cell_values(table.cell(s, b)))))}
            for s in table.scales
            for b in BUCKETS
        ],
    }
    return json.dumps(doc, indent=2)


def table_from_json(text: str) -> MeanTiltTable:
    doc = json.loads(text)
    cells = {(float(c["scale"]), c["bucket"]): _cell_from(c) for c in doc["cells"]}
    return MeanTiltTable([float(s) for s in doc["scales"]], cells)


# -- reports ------------------------------------------------------------------


@dataclass
class RunReport:
    name: str
    spec: object
    table: MeanTiltTable
    features: TiltFeatures
    params: dict
    artifacts: dict[float, dict[str, str]] = field(default_factory=dict)


def features_to_dict(f: TiltFeatures) -> dict:
    return {
        "fte": f.fte,
        "pmc": f.pmc.value,
        "pmc_corrected": f.pmc_corrected.value,
        "h_range": list(f.h_range) if f.h_range else None,
        "strength": f.strength.value,
        "persistence_scale": f.persistence_scale,
    }


_SUMMARY_FIELDS = ("stimulus", "fte", "pmc", "pmc_corrected", "h_min", "h_max", "strength")


def summary_rows(reports: Sequence[RunReport]) -> list[dict]:
    rows = []
    for r in reports:
        f = r.features
        rows.append({
            "stimulus": r.name,
            "fte": f.fte,
            "pmc": f.pmc.value,
            "pmc_corrected": f.pmc_corrected.value,
            "h_min": f.h_range[0] if f.h_range else None,
            "h_max": f.h_range[1] if f.h_range else None,
            "strength": f.strength.value,
        })
    rank = {s.value: i for i, s in enumerate(STRENGTH_ORDER)}
    rows.sort(key=lambda row: (rank[row["strength"]], row["fte"], row["stimulus"]))
    return rows


def summary_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=_SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def summary_from_csv(text: str) -> list[dict]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        for k in ("fte", "h_min", "h_max"):
            row[k] = None if row[k] == "" else float(row[k])
        out.append(dict(row))
    return out


def emit_summary(reports: Sequence[RunReport], root: str | Path | None = None) -> list[dict]:
    """Summary rows sorted by strength class then FTE; written when ``root`` is given."""
    rows = summary_rows(reports)
    if root is not None:
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        (root / "summary.csv").write_text(summary_to_csv(rows))
        (root / "summary.json").write_text(json.dumps(rows, indent=2))
    return rows


def safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9=._-]+", "_", name.replace("/", "_"))


def format_summary(rows: Sequence[dict]) -> str:
    lines = [f"{'stimulus':<22}{'FTE':>6}  {'PMC':<5}{'PMC*':<5}{'H-range':<14}strength"]
    for r in rows:
        rng = "-" if r["h_min"] is None else f"{r['h_min']:.1f}-{r['h_max']:.1f}"
        lines.append(
            f"{r['stimulus']:<22}{r['fte']:>6.2f}  {r['pmc']:<5}{r['pmc_corrected']:<5}{rng:<14}{r['strength']}"
        )
    return "\n".join(lines)


def write_report(report: RunReport, root: str | Path, stack=None, images: bool = True) -> Path:
    """Write tables, features, parameters and (optionally) per-scale images."""
    from .stimulus import generate, save_png, spec_to_text

    out = Path(root) / safe_name(report.name)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tilts.csv").write_text(table_to_csv(report.table))
    (out / "tilts.json").write_text(table_to_json(report.table))
    (out / "features.json").write_text(json.dumps(features_to_dict(report.features), indent=2))
    (out / "params.json").write_text(json.dumps(report.params, indent=2, sort_keys=True))
    (out / "stimulus.txt").write_text(spec_to_text(report.spec))
    if images:
        save_png(generate(report.spec), out / "stimulus.png")
        if stack is not None:
            for e in stack:
                d = out / f"{e.sigma_c:g}"
                d.mkdir(exist_ok=True)
                save_binary(e.binary, d / "binary.png")
                save_rgb(render_colormap(e.response), d / "response.png")
                save_rgb(render_overlay(e.binary, report.table.segments.get(e.sigma_c, [])), d / "overlay.png")
                report.artifacts[e.sigma_c] = {
                    k: str(d / f"{k}.png") for k in ("binary", "response", "overlay")
                }
    return out
