"""Synthetic scenes built from projected class models, and the accuracy benchmark.

Each scene starts from the exact reference segments of one class; segments
are dropped (occlusion), shifted (placement noise) and cut into axis-aligned
pieces (over-segmentation).  All randomness comes from one seeded generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import Config
from .descriptors import SegmentDescriptor
from .errors import EmptyScene
from .model import ClassModel, polygon_descriptor
from .pipeline import recognize
from .rulebase import RuleBase

NO_DECISION = "none"


def clip_halfplane(poly: np.ndarray, axis: int, t: float, keep_below: bool) -> np.ndarray:
    """Clip a polygon to ``p[axis] <= t`` (or ``>= t``)."""
    out = []
    n = len(poly)
    sign = 1.0 if keep_below else -1.0
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        fp, fq = sign * (t - p[axis]), sign * (t - q[axis])
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            w = fp / (fp - fq)
            out.append(p + w * (q - p))
    return np.array(out)


def split_polygon(poly: np.ndarray, axis: int, frac: float) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = poly[:, axis].min(), poly[:, axis].max()
    t = lo + frac * (hi - lo)
    return clip_halfplane(poly, axis, t, True), clip_halfplane(poly, axis, t, False)


def fragment_polygon(poly: np.ndarray, pieces: int, rng: np.random.Generator, frac_range=(0.3, 0.7)) -> list[np.ndarray]:
    """Cut a convex polygon into ``pieces`` parts by repeated axis-aligned splits of the largest part."""
    parts = [np.asarray(poly, dtype=float)]
    while len(parts) < pieces:
        areas = [polygon_descriptor(p).area for p in parts]
        k = int(np.argmax(areas))
        axis = int(rng.integers(2))
        frac = float(rng.uniform(*frac_range))
        a, b = split_polygon(parts[k], axis, frac)
        parts[k : k + 1] = [a, b]
    return parts


def rasterize_polygon(poly: np.ndarray, shape: tuple[int, int], supersample: int = 1) -> np.ndarray:
    """Boolean coverage of pixel centers (or of ``supersample``-times finer sub-pixel centers).

    Returns an array of ``shape`` scaled by ``supersample``; sample (r, c)
    sits at ((c + 0.5) / supersample - 0.5, (r + 0.5) / supersample - 0.5),
    so with ``supersample=1`` samples are the integer pixel centers.
    """
    h, w = shape[0] * supersample, shape[1] * supersample
    ys = (np.arange(h) + 0.5) / supersample - 0.5
    xs = (np.arange(w) + 0.5) / supersample - 0.5
    X, Y = np.meshgrid(xs, ys)
    inside = np.zeros((h, w), dtype=bool)
    n = len(poly)
    for k in range(n):
        (x1, y1), (x2, y2) = poly[k], poly[(k + 1) % n]
        if y1 == y2:
            continue
        crosses = (y1 > Y) != (y2 > Y)
        x_at = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (X < x_at)
    return inside


def scene_mask(scene: "Scene", shape: tuple[int, int]) -> np.ndarray:
    """Label image with fragment k painted as label k + 1."""
    if scene.polygons is None:
        raise ValueError("scene was generated without polygons")
    labels = np.zeros(shape, dtype=np.int64)
    for k, poly in enumerate(scene.polygons):
        labels[rasterize_polygon(poly, shape) & (labels == 0)] = k + 1
    return labels


@dataclass(frozen=True)
class Scene:
    class_id: str
    fragments: tuple[SegmentDescriptor, ...]
    # model segment each fragment came from
    sources: tuple[int, ...]
    dropped: tuple[int, ...] = ()
    polygons: tuple[np.ndarray, ...] | None = None


@dataclass(frozen=True)
class BenchSettings:
    classes: tuple[str, ...]
    n_per_class: int = 40
    k: int = 2
    sigma: float = 0.02
    drop: float = 0.2
    seed: int = 1

    def __post_init__(self) -> None:
        if self.n_per_class < 1:
            raise ValueError("need at least one scene per class")
        if self.k < 1:
            raise ValueError("fragmentation k must be at least 1")
        if self.sigma < 0 or not 0 <= self.drop <= 1:
            raise ValueError("sigma must be >= 0 and drop probability in [0, 1]")


def generate_scene(
    cm: ClassModel,
    rng: np.random.Generator,
    k: int = 2,
    sigma: float = 0.02,
    drop: float = 0.2,
) -> Scene:
    """One perturbed view of ``cm``; ``sigma`` is the centroid jitter as a fraction of the model diagonal."""
    if cm.polygons is None:
        raise ValueError("scene generation needs a class model with polygons")
    spread = sigma * cm.diagonal
    frags, sources, dropped, polys = [], [], [], []
    for j, poly in enumerate(cm.polygons):
        # draws happen in a fixed order whether or not the segment survives
        lost = bool(rng.random() < drop)
        shift = rng.normal(0.0, 1.0, 2) * spread
        pieces = int(rng.integers(1, k + 1))
        parts = fragment_polygon(poly, pieces, rng)
        if lost:
            dropped.append(j)
            continue
        for part in parts:
            frags.append(polygon_descriptor(part).translated(float(shift[0]), float(shift[1])))
            polys.append(part + shift)
            sources.append(j)
    order = rng.permutation(len(frags))
    return Scene(
        cm.class_id,
        tuple(frags[i] for i in order),
        tuple(sources[i] for i in order),
        tuple(dropped),
        tuple(polys[i] for i in order),
    )


def run_bench(
    models: dict[str, ClassModel],
    rulebases: Sequence[RuleBase],
    settings: BenchSettings,
    config: Config = Config(),
) -> dict:
    """Classify ``n_per_class`` synthetic scenes per class and tabulate accuracy."""
    rng = np.random.default_rng(settings.seed)
    labels = [rb.class_id for rb in rulebases]
    columns = labels + [NO_DECISION]
    confusion = {c: {p: 0 for p in columns} for c in settings.classes}
    for c in settings.classes:
        for _ in range(settings.n_per_class):
            scene = generate_scene(models[c], rng, settings.k, settings.sigma, settings.drop)
            try:
                winner = recognize(scene.fragments, rulebases, config).result.winner
            except EmptyScene:
                winner = None
            confusion[c][winner if winner is not None else NO_DECISION] += 1
    per_class = {c: confusion[c].get(c, 0) / settings.n_per_class for c in settings.classes}
    correct = sum(confusion[c].get(c, 0) for c in settings.classes)
    return {
        "settings": {
            "classes": list(settings.classes),
            "n_per_class": settings.n_per_class,
            "k": settings.k,
            "sigma": settings.sigma,
            "drop": settings.drop,
            "seed": settings.seed,
        },
        "config": config.to_dict(),
        "overall_accuracy": correct / (settings.n_per_class * len(settings.classes)),
        "per_class_accuracy": per_class,
        "confusion": confusion,
    }


def format_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=False) + "\n"
