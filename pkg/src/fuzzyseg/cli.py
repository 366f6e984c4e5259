"""Command-line front end.

    fuzzyseg induct   --model car.json --camera cam.json --out rules.json
    fuzzyseg extract  --mask scene.pgm --angle 0.0 --out scene.jsonl
    fuzzyseg classify --rules rules/*.json --scene scene.jsonl [--tau 0.5] [--overlay out.svg]
    fuzzyseg synth    --class personal_car --seed 42 --k 2 --out scene.jsonl
    fuzzyseg bench    --n 40 --k 2 --sigma 0.02 --drop 0.2 --seed 1

Exit status: 0 on success (an ambiguous classification is still a success),
1 for usage or parse errors, 2 for empty or degenerate input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import descriptors, model, preprocess, synth
from .config import Config
from .errors import (
    DegenerateModelSegment,
    DegenerateProjection,
    DegenerateSegment,
    EmptyInput,
    EmptyMask,
    EmptyScene,
    FuzzySegError,
)
from .pipeline import recognize
from .rulebase import induct, load_rulebase
from .svg import render_overlay

EXIT_OK, EXIT_USAGE, EXIT_EMPTY = 0, 1, 2
EMPTY_ERRORS = (EmptyScene, EmptyMask, EmptyInput, DegenerateModelSegment, DegenerateProjection, DegenerateSegment)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(args) -> Config:
    cfg = Config.load(args.config) if getattr(args, "config", None) else Config()
    if getattr(args, "tau", None) is not None:
        cfg = replace(cfg, tau=args.tau)
    if getattr(args, "normalize", False):
        cfg = replace(cfg, normalize_perfect_match=True)
    return cfg


def _resolve_model(name: str) -> model.VehicleModel3D:
    if name in model.CLASS_IDS and not Path(name).exists():
        return model.bundled_model(name)
    return model.load_model(name)


def _camera(path: str | None) -> model.CameraPose:
    return model.load_camera(path) if path else model.bundled_camera()


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _is_mask_file(path: str) -> bool:
    raw = Path(path).read_bytes()[:64]
    if raw.startswith(b"P5"):
        return True
    first = raw.split(b"\n", 1)[0].split()
    return len(first) == 2 and all(t.isdigit() for t in first)


def cmd_induct(args) -> int:
    cfg = _load_config(args)
    cm = model.project_model(_resolve_model(args.model), _camera(args.camera))
    _write(induct(cm, cfg.widths).dumps(), args.out)
    return EXIT_OK


def cmd_extract(args) -> int:
    mask = preprocess.load_mask(args.mask, binary=True if args.binary else None)
    segs = preprocess.extract_segments(mask, descriptors.FrameOrientation(args.angle))
    lines = "".join(json.dumps(s.to_record()) + "\n" for s in segs)
    _write(lines, args.out)
    return EXIT_OK


def _load_scene(args) -> tuple[list[descriptors.SegmentDescriptor], tuple[int, int] | None]:
    if _is_mask_file(args.scene):
        mask = preprocess.load_mask(args.scene, binary=True if args.binary else None)
        try:
            segs = preprocess.extract_segments(mask, descriptors.FrameOrientation(args.angle))
        except EmptyMask:
            raise EmptyScene("scene mask has no foreground pixels") from None
        return segs, (mask.width, mask.height)
    with open(args.scene, encoding="utf-8") as fh:
        return descriptors.read_jsonl(fh), None


def cmd_classify(args) -> int:
    cfg = _load_config(args)
    rulebases = [load_rulebase(p) for p in args.rules]
    es_prime, size = _load_scene(args)
    rec = recognize(es_prime, rulebases, cfg)
    out = rec.to_dict()
    sys.stdout.write(json.dumps(out, indent=1) + "\n")
    if args.overlay:
        Path(args.overlay).write_text(render_overlay(es_prime, rec, rulebases, size), encoding="utf-8")
    return EXIT_OK


def _bundled(classes):
    cam = model.bundled_camera()
    return {c: model.project_model(model.bundled_model(c), cam) for c in classes}


def cmd_synth(args) -> int:
    cm = _bundled([args.class_id])[args.class_id]
    scene = synth.generate_scene(cm, np.random.default_rng(args.seed), args.k, args.sigma, args.drop)
    if args.mask:
        labels = synth.scene_mask(scene, (args.height, args.width))
        Path(args.mask).write_text(preprocess.format_text_mask(preprocess.LabelMask(labels)), encoding="utf-8")
    _write("".join(json.dumps(s.to_record()) + "\n" for s in scene.fragments), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    classes = tuple(args.classes) if args.classes else model.CLASS_IDS
    unknown = [c for c in classes if c not in model.CLASS_IDS]
    if unknown:
        raise FuzzySegError(f"unknown class(es): {', '.join(unknown)}")
    models = _bundled(model.CLASS_IDS)
    rulebases = [induct(models[c], cfg.widths) for c in model.CLASS_IDS]
    settings = synth.BenchSettings(classes, args.n, args.k, args.sigma, args.drop, args.seed)
    report = synth.run_bench(models, rulebases, settings, cfg)
    _write(synth.format_report(report), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fuzzyseg", description="Fuzzy segment-based vehicle class recognition.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("induct", help="project a 3-D model and induce its rule base")
    s.add_argument("--model", required=True, help="model JSON file or bundled class name")
    s.add_argument("--camera", help="camera JSON file (default: bundled camera)")
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_induct)

    s = sub.add_parser("extract", help="connected-component descriptors from a mask")
    s.add_argument("--mask", required=True)
    s.add_argument("--angle", type=float, default=0.0, help="working-frame rotation in radians")
    s.add_argument("--binary", action="store_true", help="label 4-connected components of a text grid first")
    s.add_argument("--out")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("classify", help="classify one scene against rule bases")
    s.add_argument("--rules", nargs="+", required=True)
    s.add_argument("--scene", required=True, help="descriptor JSONL, text label grid or P5 PGM")
    s.add_argument("--angle", type=float, default=0.0)
    s.add_argument("--binary", action="store_true")
    s.add_argument("--tau", type=float)
    s.add_argument("--normalize", action="store_true", help="rescale scores so a perfect match is 1")
    s.add_argument("--config")
    s.add_argument("--overlay", help="write an SVG overlay here")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("synth", help="write one synthetic scene")
    s.add_argument("--class", dest="class_id", required=True, choices=model.CLASS_IDS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--sigma", type=float, default=0.0)
    s.add_argument("--drop", type=float, default=0.0)
    s.add_argument("--mask", help="also write a text label grid")
    s.add_argument("--width", type=int, default=1280)
    s.add_argument("--height", type=int, default=720)
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("bench", help="accuracy on synthetic scenes")
    s.add_argument("--classes", nargs="+")
    s.add_argument("--n", type=int, default=40, help="scenes per class")
    s.add_argument("--k", type=int, default=2, help="max fragments per segment")
    s.add_argument("--sigma", type=float, default=0.02, help="centroid jitter, fraction of model diagonal")
    s.add_argument("--drop", type=float, default=0.2, help="segment drop probability")
    s.add_argument("--seed", type=int, default=1)
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EMPTY_ERRORS as exc:
        print(f"fuzzyseg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (FuzzySegError, OSError, ValueError) as exc:
        print(f"fuzzyseg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
