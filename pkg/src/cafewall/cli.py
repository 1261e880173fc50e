"""Command line: ``cafewall generate | run | print-config``.

Exit codes: 0 success, 1 bad input, 2 failure while running a stage.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .dogfilter import ScaleError
from .pipeline import (
    ConfigError,
    RunConfig,
    describe_config,
    parse_config_text,
    run,
    suite_by_name,
    validate,
)
from .report import format_summary, safe_name, summary_rows
from .stimulus import StimulusError, generate, save_png, spec_from_text

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2


class _StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        super().__init__(f"stage '{stage}' failed: {type(exc).__name__}: {exc}")


def _scales_arg(raw: str):
    if raw.strip().lower() == "auto":
        return "auto"
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scale list {raw!r}")


def _add_selection(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value config file; flags override it")
    p.add_argument("--suite", choices=["fig4"], help="select the whole standard stimulus suite")
    p.add_argument("--stimulus", action="append", default=[], metavar="NAME", help="suite entry (repeatable)")
    p.add_argument("--spec-file", action="append", default=[], type=Path, metavar="PATH",
                   help="stimulus described as key = value lines (repeatable)")
    p.add_argument("--out", help="output directory (default $CAFEWALL_OUT or ./out)")


def _add_analysis(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scales", type=_scales_arg, help="comma separated centre sigmas, or 'auto'")
    p.add_argument("--base-mortar", type=float, help="mortar width the auto scales are built from")
    p.add_argument("--extended-scales", action="store_true", default=None,
                   help="also analyze sigma 32, 40, 48 for mortar widths >= 32")
    p.add_argument("--surround-ratio", type=float)
    p.add_argument("--window-ratio", type=float)
    p.add_argument("--binarize-threshold", type=float)
    p.add_argument("--num-peaks", type=int)
    p.add_argument("--threshold-frac", type=float)
    p.add_argument("--fill-gap", type=float)
    p.add_argument("--min-length", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-images", dest="images", action="store_false", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cafewall", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    g = sub.add_parser("generate", help="write stimulus PNGs")
    _add_selection(g)
    r = sub.add_parser("run", help="analyze stimuli and write tables, images and the summary")
    _add_selection(r)
    _add_analysis(r)
    c = sub.add_parser("print-config", help="show the effective configuration")
    _add_selection(c)
    _add_analysis(c)
    return ap


_FLAG_FIELDS = (
    "scales", "base_mortar", "extended_scales", "surround_ratio", "window_ratio",
    "binarize_threshold", "num_peaks", "threshold_frac", "fill_gap", "min_length",
    "workers", "images",
)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"config file: {exc}") from exc
        cfg = parse_config_text(text, cfg)
    changes = {}
    for name in _FLAG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            changes[name] = None if v == "auto" else v
    if args.out is not None:
        changes["out_dir"] = args.out
    stimuli = list(cfg.stimuli)
    known = suite_by_name()
    if args.suite:
        stimuli += list(known.items())
    for name in args.stimulus:
        if name not in known:
            raise ConfigError(f"unknown stimulus {name!r}; known: {', '.join(known)}")
        stimuli.append((name, known[name]))
    for path in args.spec_file:
        try:
            stimuli.append((path.stem, spec_from_text(path.read_text())))
        except OSError as exc:
            raise ConfigError(f"spec file: {exc}") from exc
    cfg = dataclasses.replace(cfg, stimuli=stimuli, **changes)
    validate(cfg)
    return cfg


def _cmd_generate(cfg: RunConfig) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, spec in cfg.stimuli:
        path = out / f"{safe_name(name)}.png"
        save_png(generate(spec), path)
        print(path)


def _cmd_run(cfg: RunConfig) -> None:
    try:
        reports = run(cfg)
    except (ScaleError, StimulusError):
        raise
    except OSError as exc:
        raise _StageError("output", exc) from exc
    except Exception as exc:  # noqa: BLE001 - reported with its stage
        raise _StageError("analysis", exc) from exc
    print(format_summary(summary_rows(reports)))
    print(f"results in {cfg.out_dir}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command != "print-config" and not cfg.stimuli:
            raise ConfigError("no stimuli selected; use --suite, --stimulus or --spec-file")
        if args.command == "print-config":
            sys.stdout.write(describe_config(cfg))
        elif args.command == "generate":
            _cmd_generate(cfg)
        else:
            _cmd_run(cfg)
    except StimulusError as exc:
        print(f"cafewall: invalid stimulus ({exc.field}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, ScaleError) as exc:
        print(f"cafewall: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _StageError as exc:
        print(f"cafewall: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"cafewall: stage 'output' failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
