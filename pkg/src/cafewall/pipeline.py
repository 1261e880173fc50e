"""Run configuration and the stimulus -> edge maps -> lines -> features chain."""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import BACKEND
from .dogfilter import (
    BINARIZE_THRESHOLD,
    EXTENDED_SCALES,
    DoGParams,
    ScaleError,
    auto_scales,
    build_edge_map_stack,
)
from .hough import HoughParams, default_nhood
from .report import RunReport, emit_summary, write_report
from .stimulus import (
    StimulusError,
    StimulusSpec,
    generate,
    generate_fig4_suite,
    mortar_width_family,
    spec_from_text,
)
from .tiltanalysis import compute_features, mean_tilt_table

__all__ = [
    "ConfigError",
    "RunConfig",
    "PARAM_SOURCES",
    "suite_by_name",
    "scales_for",
    "parameter_record",
    "analyze_stimulus",
    "run",
    "parse_config_text",
]

OUT_ENV = "CAFEWALL_OUT"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    stimuli: list[tuple[str, StimulusSpec]] = field(default_factory=list)
    scales: tuple[float, ...] | None = None  # None: auto from base_mortar
    base_mortar: float = 8.0
    extended_scales: bool = False
    surround_ratio: float = 2.0
    window_ratio: float = 8.0
    binarize_threshold: float = BINARIZE_THRESHOLD
    num_peaks: int = 1000
    threshold_frac: float = 0.5
    nhood: tuple[int, int] | None = None
    fill_gap: float = 40.0
    min_length: float = 450.0
    rho_step: float = 1.0
    theta_step: float = 1.0
    out_dir: str = field(default_factory=lambda: os.environ.get(OUT_ENV, "out"))
    workers: int = 1
    images: bool = True

    @property
    def hough_params(self) -> HoughParams:
        return HoughParams(
            num_peaks=self.num_peaks,
            threshold_frac=self.threshold_frac,
            nhood=self.nhood,
            fill_gap=self.fill_gap,
            min_length=self.min_length,
            rho_step=self.rho_step,
            theta_step=self.theta_step,
        )

    def base_scales(self) -> tuple[float, ...]:
        return tuple(self.scales) if self.scales is not None else auto_scales(self.base_mortar)


# Where each default comes from; "decision" marks values chosen here because
# the modelled pipeline leaves them open.
PARAM_SOURCES = {
    "scales": "published",
    "base_mortar": "published",
    "extended_scales": "published",
    "surround_ratio": "published",
    "window_ratio": "published",
    "binarize_threshold": "decision",
    "num_peaks": "published",
    "threshold_frac": "decision",
    "nhood": "decision",
    "fill_gap": "published",
    "min_length": "published",
    "rho_step": "decision",
    "theta_step": "decision",
    "rho_tolerance": "decision",
    "border": "decision",
    "pmc_step_deg": "published",
    "out_dir": "runtime",
    "workers": "runtime",
    "images": "runtime",
}


def suite_by_name() -> dict[str, StimulusSpec]:
    return dict(generate_fig4_suite())


def scales_for(spec: StimulusSpec, cfg: RunConfig) -> tuple[float, ...]:
    scales = cfg.base_scales()
    if cfg.extended_scales and not spec.hollow and spec.mortar_px >= 32:
        scales = tuple(sorted(set(scales) | set(EXTENDED_SCALES)))
    return scales


def parameter_record(cfg: RunConfig, spec: StimulusSpec | None = None) -> dict:
    """Every setting that affects the numbers, for exact re-runs."""
    shape = spec.shape if spec is not None else None
    nhood = cfg.nhood
    if nhood is None and shape is not None:
        q = math.ceil(math.hypot(shape[0] - 1, shape[1] - 1) / cfg.rho_step)
        nhood = default_nhood((2 * q + 1, int(round(180 / cfg.theta_step))))
    return {
        "scales": list(scales_for(spec, cfg) if spec is not None else cfg.base_scales()),
        "base_mortar": cfg.base_mortar,
        "extended_scales": cfg.extended_scales,
        "surround_ratio": cfg.surround_ratio,
        "window_ratio": cfg.window_ratio,
        "binarize_threshold": cfg.binarize_threshold,
        "num_peaks": cfg.num_peaks,
        "threshold_frac": cfg.threshold_frac,
        "nhood": list(nhood) if nhood is not None else "auto",
        "fill_gap": cfg.fill_gap,
        "min_length": cfg.min_length,
        "rho_step": cfg.rho_step,
        "theta_step": cfg.theta_step,
        "rho_tolerance": cfg.hough_params.rho_tolerance,
        "border": "replicate",
        "pmc_step_deg": 1.0,
        "backend": BACKEND,
    }


def check_scales(spec: StimulusSpec, cfg: RunConfig) -> None:
    limit = min(spec.shape)
    for s in scales_for(spec, cfg):
        size = DoGParams(s, cfg.surround_ratio, cfg.window_ratio).size
        if size > limit:
            raise ScaleError(f"scale {s:g} needs a {size}px window; image side is {limit}px")


def analyze_stimulus(name: str, spec: StimulusSpec, cfg: RunConfig, write: bool = False):
    """Full chain for one stimulus. Returns (report, edge map stack)."""
    image = generate(spec)
    stack = build_edge_map_stack(
        image,
        scales_for(spec, cfg),
        cfg.surround_ratio,
        cfg.window_ratio,
        cfg.binarize_threshold,
        source_spec=spec,
    )
    table = mean_tilt_table(stack, cfg.hough_params)
    mortar = spec.mortar_px if mortar_width_family(name) else None
    report = RunReport(name, spec, table, compute_features(table, mortar), parameter_record(cfg, spec))
    if write:
        write_report(report, cfg.out_dir, stack, images=cfg.images)
    return report, stack


def _worker(args) -> RunReport:
    name, spec, cfg = args
    report, _ = analyze_stimulus(name, spec, cfg, write=True)
    return report


def run(cfg: RunConfig) -> list[RunReport]:
    """Analyze every configured stimulus, write artifacts and the summary."""
    for name, spec in cfg.stimuli:
        check_scales(spec, cfg)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(n, s, cfg) for n, s in cfg.stimuli]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            reports = list(ex.map(_worker, jobs))
    else:
        reports = [_worker(j) for j in jobs]
    emit_summary(reports, cfg.out_dir)
    return reports


# -- config files -------------------------------------------------------------


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(x) for x in raw.replace(" ", "").split(",") if x)


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_PARSERS = {
    "scales": lambda r: None if r.strip().lower() == "auto" else _floats(r),
    "base_mortar": float,
    "extended_scales": _bool,
    "surround_ratio": float,
    "window_ratio": float,
    "binarize_threshold": float,
    "num_peaks": int,
    "threshold_frac": float,
    "nhood": lambda r: None if r.strip().lower() == "auto" else tuple(int(x) for x in _floats(r)),
    "fill_gap": float,
    "min_length": float,
    "rho_step": float,
    "theta_step": float,
    "out_dir": str.strip,
    "workers": int,
    "images": _bool,
}


def parse_config_text(text: str, cfg: RunConfig | None = None) -> RunConfig:
    """Apply ``key = value`` lines onto ``cfg``.

    ``stimulus = NAME`` (repeatable) selects suite entries, ``suite = fig4``
    selects all of them, and ``spec_file = PATH`` adds an inline spec file.
    """
    cfg = cfg or RunConfig()
    changes = {}
    stimuli = list(cfg.stimuli)
    known = suite_by_name()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        try:
            if key == "suite":
                if raw != "fig4":
                    raise ValueError(f"unknown suite {raw!r}")
                stimuli += list(known.items())
            elif key == "stimulus":
                if raw not in known:
                    raise ValueError(f"unknown stimulus {raw!r}")
                stimuli.append((raw, known[raw]))
            elif key == "spec_file":
                p = Path(raw)
                stimuli.append((p.stem, spec_from_text(p.read_text())))
            elif key in _PARSERS:
                changes[key] = _PARSERS[key](raw)
            else:
                raise ValueError("unknown key")
        except (ValueError, OSError) as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from exc
    cfg = dataclasses.replace(cfg, stimuli=stimuli, **changes)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    try:
        cfg.hough_params
        scales = cfg.base_scales()
        if any(s <= 0 for s in scales) or any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError(f"scales must be positive and strictly increasing: {scales}")
        DoGParams(1.0, cfg.surround_ratio, cfg.window_ratio)
        if cfg.workers < 1:
            raise ValueError("workers must be >= 1")
    except (ValueError, StimulusError) as exc:
        raise ConfigError(str(exc)) from exc


def describe_config(cfg: RunConfig) -> str:
    """``key = value  # source`` lines, loadable back as a config file."""
    rec = parameter_record(cfg)
    rec.pop("backend")
    rec["out_dir"] = cfg.out_dir
    rec["workers"] = cfg.workers
    rec["images"] = cfg.images
    lines = [f"# backend: {BACKEND}"]
    for k, v in rec.items():
        if isinstance(v, list):
            v = ",".join(f"{x:g}" if isinstance(x, float) else str(x) for x in v)
        src = PARAM_SOURCES.get(k, "decision")
        prefix = "# " if k in ("rho_tolerance", "border", "pmc_step_deg") else ""
        lines.append(f"{prefix}{k} = {v}  # {src}")
    for name, _ in cfg.stimuli:
        lines.append(f"stimulus = {name}")
    return "\n".join(lines) + "\n"
