"""Segment descriptors and the merging algebra.

A segment is summarised by seven numbers: its area, its mass center and its
axis-aligned bounding box, all measured in a working frame whose orientation
follows the vehicle model.  Merging two descriptors yields the descriptor of
the union of the underlying (disjoint) pixel sets without touching pixels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DegenerateSegment, EmptyInput, ParseError

# height guard for the shape coefficient, in length units
DEGENERATE_EPS = 1e-9

RECORD_FIELDS = ("area", "cx", "cy", "xmin", "xmax", "ymin", "ymax")


@dataclass(frozen=True)
class FrameOrientation:
    """Rotation of the working x-y frame relative to the image axes (radians)."""

    angle: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.angle):
            raise ValueError("frame angle must be finite")
        wrapped = (self.angle + math.pi) % (2 * math.pi) - math.pi
        object.__setattr__(self, "angle", wrapped)

    def to_frame(self, x, y):
        """Express image coordinates in the working frame."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        if self.angle == 0.0:
            return x, y
        return x * c + y * s, -x * s + y * c


@dataclass(frozen=True)
class SegmentDescriptor:
    area: float
    cx: float
    cy: float
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    tag: str | None = None

    def __post_init__(self) -> None:
        if not self.area > 0:
            raise ValueError(f"segment area must be positive, got {self.area}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("bounding box extrema are inverted")
        # weighted means can land an ulp outside the envelope
        tol = 1e-9 * max(1.0, abs(self.x_min), abs(self.x_max), abs(self.y_min), abs(self.y_max))
        if not (self.x_min - tol <= self.cx <= self.x_max + tol and self.y_min - tol <= self.cy <= self.y_max + tol):
            raise ValueError(f"mass center ({self.cx}, {self.cy}) lies outside the bounding box")

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)

    def translated(self, dx: float, dy: float) -> SegmentDescriptor:
        return SegmentDescriptor(
            self.area,
            self.cx + dx,
            self.cy + dy,
            self.x_min + dx,
            self.x_max + dx,
            self.y_min + dy,
            self.y_max + dy,
            self.tag,
        )

    def as_tuple(self) -> tuple[float, ...]:
        return (self.area, self.cx, self.cy, self.x_min, self.x_max, self.y_min, self.y_max)

    def to_record(self) -> dict:
        rec = dict(zip(RECORD_FIELDS, (float(v) for v in self.as_tuple())))
        if self.tag is not None:
            rec["tag"] = self.tag
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> SegmentDescriptor:
        if not isinstance(rec, dict):
            raise ParseError("descriptor record must be a JSON object")
        values = []
        for name in RECORD_FIELDS:
            if name not in rec:
                raise ParseError(f"descriptor record is missing field '{name}'")
            try:
                values.append(float(rec[name]))
            except (TypeError, ValueError):
                raise ParseError(f"descriptor field '{name}' is not a number: {rec[name]!r}") from None
        tag = rec.get("tag")
        try:
            return cls(*values, tag=None if tag is None else str(tag))
        except ValueError as exc:
            raise ParseError(f"invalid descriptor: {exc}") from None


def width(s: SegmentDescriptor) -> float:
    return s.x_max - s.x_min


def height(s: SegmentDescriptor) -> float:
    return s.y_max - s.y_min


def is_degenerate(s: SegmentDescriptor, eps: float = DEGENERATE_EPS) -> bool:
    return height(s) <= eps


def shape_coefficient(s: SegmentDescriptor, eps: float = DEGENERATE_EPS) -> float:
    """Width-to-height ratio of the bounding box.

    Raises DegenerateSegment for (near) zero height.
    """
    h = height(s)
    if h <= eps:
        raise DegenerateSegment(f"segment height {h} is below {eps}")
    return width(s) / h


def merge(a: SegmentDescriptor, b: SegmentDescriptor) -> SegmentDescriptor:
    """Descriptor of the union of two disjoint segments.

    Disjointness of the underlying pixel sets cannot be checked from the
    descriptors; overlapping inputs give an overstated area.
    """
    area = a.area + b.area
    return SegmentDescriptor(
        area,
        (a.area * a.cx + b.area * b.cx) / area,
        (a.area * a.cy + b.area * b.cy) / area,
        min(a.x_min, b.x_min),
        max(a.x_max, b.x_max),
        min(a.y_min, b.y_min),
        max(a.y_max, b.y_max),
    )


def merge_all(parts: Sequence[SegmentDescriptor]) -> SegmentDescriptor:
    if len(parts) == 0:
        raise EmptyInput("cannot merge an empty sequence of segments")
    if len(parts) == 1:
        return parts[0]
    return reduce(merge, parts)


def from_pixels(xs, ys, frame: FrameOrientation | None = None) -> SegmentDescriptor:
    """Descriptor of a pixel set given as coordinate arrays (pixel centers at integers)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0:
        raise EmptyInput("pixel set is empty")
    if frame is not None:
        xs, ys = frame.to_frame(xs, ys)
    return SegmentDescriptor(
        float(xs.size),
        float(xs.mean()),
        float(ys.mean()),
        float(xs.min()),
        float(xs.max()),
        float(ys.min()),
        float(ys.max()),
    )


def write_jsonl(segments: Iterable[SegmentDescriptor], fh: IO[str]) -> None:
    for s in segments:
        fh.write(json.dumps(s.to_record()) + "\n")


def read_jsonl(fh: IO[str]) -> list[SegmentDescriptor]:
    out = []
    for lineno, line in enumerate(fh, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})") from None
        try:
            out.append(SegmentDescriptor.from_record(rec))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return out
