"""Induction of shape and placement rules from a class model.

Each model parameter is fuzzified into a trapezoid centred on its value.
The arrangement rule has no parameters of its own; it is the fixed
combination carried out by :func:`fuzzyseg.inference.class_membership`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .config import Widths
from .descriptors import SegmentDescriptor, is_degenerate, shape_coefficient
from .errors import DegenerateModelSegment, ParseError
from .fuzzy import Trapezoid, membership, trapezoid_around
from .model import ClassModel

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ShapeRule:
    j: int
    area_set: Trapezoid
    q_set: Trapezoid


@dataclass(frozen=True)
class PlacementRule:
    """Expected offset of model segment ``j2`` as seen from the anchor (index 0)."""

    j2: int
    dx_set: Trapezoid
    dy_set: Trapezoid


@dataclass(frozen=True)
class RuleBase:
    class_id: str
    shape_rules: tuple[ShapeRule, ...]
    placement_rules: tuple[PlacementRule, ...]
    widths: Widths
    diagonal: float
    # kept for overlays and the adjacency gate; rules alone suffice for inference
    segments: tuple[SegmentDescriptor, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.shape_rules)
        if n < 2:
            raise ValueError("a rule base needs at least 2 shape rules")
        if [r.j for r in self.shape_rules] != list(range(n)):
            raise ValueError("shape rules must be indexed 0..n-1")
        if [r.j2 for r in self.placement_rules] != list(range(1, n)):
            raise ValueError("placement rules must be indexed 1..n-1")

    @property
    def n(self) -> int:
        return len(self.shape_rules)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "class": self.class_id,
            "n_segments": self.n,
            "diagonal": self.diagonal,
            "widths": {
                "alpha": self.widths.alpha,
                "beta": self.widths.beta,
                "alpha_d": self.widths.alpha_d,
                "beta_d": self.widths.beta_d,
            },
            "shape_rules": [
                {"j": r.j, "area": r.area_set.as_list(), "q": r.q_set.as_list()} for r in self.shape_rules
            ],
            "placement_rules": [
                {"j2": r.j2, "dx": r.dx_set.as_list(), "dy": r.dy_set.as_list()} for r in self.placement_rules
            ],
            "segments": [s.to_record() for s in self.segments],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RuleBase:
        def need(obj, key, where):
            if not isinstance(obj, dict) or key not in obj:
                raise ParseError(f"{where}: missing field '{key}'")
            return obj[key]

        try:
            w = need(data, "widths", "rulebase")
            widths = Widths(*(float(need(w, k, "rulebase.widths")) for k in ("alpha", "beta", "alpha_d", "beta_d")))
            shape = tuple(
                ShapeRule(
                    int(need(r, "j", f"rulebase.shape_rules[{k}]")),
                    Trapezoid.from_list(need(r, "area", f"rulebase.shape_rules[{k}]")),
                    Trapezoid.from_list(need(r, "q", f"rulebase.shape_rules[{k}]")),
                )
                for k, r in enumerate(need(data, "shape_rules", "rulebase"))
            )
            place = tuple(
                PlacementRule(
                    int(need(r, "j2", f"rulebase.placement_rules[{k}]")),
                    Trapezoid.from_list(need(r, "dx", f"rulebase.placement_rules[{k}]")),
                    Trapezoid.from_list(need(r, "dy", f"rulebase.placement_rules[{k}]")),
                )
                for k, r in enumerate(need(data, "placement_rules", "rulebase"))
            )
            segs = tuple(SegmentDescriptor.from_record(s) for s in data.get("segments", []))
            return cls(
                str(need(data, "class", "rulebase")),
                shape,
                place,
                widths,
                float(need(data, "diagonal", "rulebase")),
                segs,
            )
        except ParseError:
            raise
        except (TypeError, ValueError) as exc:
            raise ParseError(f"rulebase: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def dump(self, fh: IO[str]) -> None:
        fh.write(self.dumps())


def load_rulebase(path: str | Path) -> RuleBase:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"rulebase {path}: invalid JSON at line {exc.lineno} ({exc.msg})") from None
    return RuleBase.from_dict(data)


def induct(m: ClassModel, widths: Widths = Widths()) -> RuleBase:
    segs = m.segments
    for j, s in enumerate(segs):
        if is_degenerate(s):
            raise DegenerateModelSegment(f"model segment {j} of '{m.class_id}' has zero height")
    diag = m.diagonal
    shape = []
    for j, s in enumerate(segs):
        q = shape_coefficient(s)
        shape.append(
            ShapeRule(
                j,
                trapezoid_around(s.area, widths.alpha * abs(s.area), widths.beta * abs(s.area)),
                trapezoid_around(q, widths.alpha * abs(q), widths.beta * abs(q)),
            )
        )
    a = segs[0]
    core, support = widths.alpha_d * diag, widths.beta_d * diag
    place = [
        PlacementRule(
            j2,
            trapezoid_around(a.cx - segs[j2].cx, core, support),
            trapezoid_around(a.cy - segs[j2].cy, core, support),
        )
        for j2 in range(1, len(segs))
    ]
    return RuleBase(m.class_id, tuple(shape), tuple(place), widths, diag, segs)


def shape_memberships(rule: ShapeRule, s: SegmentDescriptor) -> tuple[float, float]:
    """Area and shape-coefficient memberships of one segment under one rule."""
    return membership(rule.area_set, s.area), membership(rule.q_set, shape_coefficient(s))
