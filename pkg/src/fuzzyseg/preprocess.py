"""Scene preprocessing: segment extraction from label masks and model-guided merging."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import ndimage

from .descriptors import FrameOrientation, SegmentDescriptor, is_degenerate, merge, shape_coefficient
from .errors import EmptyMask, ParseError
from .inference import shape_score
from .rulebase import RuleBase

FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


@dataclass(frozen=True)
class LabelMask:
    """Row-major label grid; 0 is background.  ``labels[y, x]``."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.labels)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("label mask must be a non-empty 2-D grid")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("label mask must hold integers")
        if arr.min() < 0:
            raise ValueError("labels must be nonnegative")
        object.__setattr__(self, "labels", arr.astype(np.int64, copy=False))

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def from_binary(cls, fg) -> LabelMask:
        """Label 4-connected foreground components (any nonzero value is foreground)."""
        labels, _ = ndimage.label(np.asarray(fg) != 0, structure=FOUR_CONNECTED)
        return cls(labels)


def extract_segments(mask: LabelMask, frame: FrameOrientation | None = None) -> list[SegmentDescriptor]:
    """One descriptor per distinct nonzero label, in increasing label order.

    Pixel centers sit at integer coordinates (x = column, y = row) and are
    rotated into the working frame before accumulation.
    """
    ys, xs = np.nonzero(mask.labels)
    if xs.size == 0:
        raise EmptyMask("mask has no foreground pixels")
    lab = mask.labels[ys, xs]
    xs = xs.astype(float)
    ys = ys.astype(float)
    if frame is not None:
        xs, ys = frame.to_frame(xs, ys)
    order = np.argsort(lab, kind="stable")
    lab, xs, ys = lab[order], xs[order], ys[order]
    uniq, starts, counts = np.unique(lab, return_index=True, return_counts=True)
    sx = np.add.reduceat(xs, starts)
    sy = np.add.reduceat(ys, starts)
    x_lo, x_hi = np.minimum.reduceat(xs, starts), np.maximum.reduceat(xs, starts)
    y_lo, y_hi = np.minimum.reduceat(ys, starts), np.maximum.reduceat(ys, starts)
    out = []
    for k, label in enumerate(uniq):
        out.append(
            SegmentDescriptor(
                float(counts[k]),
                float(sx[k] / counts[k]),
                float(sy[k] / counts[k]),
                float(x_lo[k]),
                float(x_hi[k]),
                float(y_lo[k]),
                float(y_hi[k]),
                tag=f"label:{int(label)}",
            )
        )
    return out


# -- mask files ---------------------------------------------------------------


def parse_text_mask(text: str) -> LabelMask:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("line 1: expected header 'W H'")
    head = lines[0].split()
    try:
        w, h = int(head[0]), int(head[1])
        if len(head) != 2 or w <= 0 or h <= 0:
            raise ValueError
    except (ValueError, IndexError):
        raise ParseError(f"line 1: expected header 'W H' with positive integers, got {lines[0]!r}") from None
    if len(lines) - 1 != h:
        raise ParseError(f"expected {h} grid rows after the header, found {len(lines) - 1}")
    grid = np.zeros((h, w), dtype=np.int64)
    for r, ln in enumerate(lines[1:]):
        vals = ln.split()
        if len(vals) != w:
            raise ParseError(f"line {r + 2}: expected {w} values, found {len(vals)}")
        try:
            row = [int(v) for v in vals]
        except ValueError:
            raise ParseError(f"line {r + 2}: non-integer label") from None
        if min(row) < 0:
            raise ParseError(f"line {r + 2}: negative label")
        grid[r] = row
    return LabelMask(grid)


def format_text_mask(mask: LabelMask) -> str:
    rows = [f"{mask.width} {mask.height}"]
    rows += [" ".join(str(int(v)) for v in row) for row in mask.labels]
    return "\n".join(rows) + "\n"


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) PGM with maxval <= 255 into a uint8 array."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError("PGM header is truncated")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ParseError(f"PGM magic must be P5, got {tokens[0][:8]!r}")
    try:
        w, h, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError("PGM header fields must be integers") from None
    if w <= 0 or h <= 0 or not 0 < maxval <= 255:
        raise ParseError(f"unsupported PGM geometry {w}x{h} maxval {maxval}")
    pos += 1  # single whitespace before raster
    raster = data[pos : pos + w * h]
    if len(raster) != w * h:
        raise ParseError(f"PGM raster has {len(raster)} bytes, expected {w * h}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)


def format_pgm(fg: np.ndarray) -> bytes:
    arr = (np.asarray(fg) != 0).astype(np.uint8) * 255
    h, w = arr.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()


def load_mask(path: str | Path, binary: bool | None = None) -> LabelMask:
    """Read a text label grid or a P5 PGM.

    PGM input is always treated as a binary mask; text grids are taken as
    pre-labeled unless ``binary`` is set.
    """
    raw = Path(path).read_bytes()
    if raw[:2] == b"P5":
        return LabelMask.from_binary(parse_pgm(raw))
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path}: neither a P5 PGM nor a UTF-8 text grid") from None
    mask = parse_text_mask(text)
    return LabelMask.from_binary(mask.labels) if binary else mask


# -- model-guided merging -----------------------------------------------------


def bbox_gap(a: SegmentDescriptor, b: SegmentDescriptor) -> float:
    gx = max(0.0, b.x_min - a.x_max, a.x_min - b.x_max)
    gy = max(0.0, b.y_min - a.y_max, a.y_min - b.y_max)
    return math.hypot(gx, gy)


@dataclass(frozen=True)
class MergePlan:
    """Groups of input indices that were merged and kept, with their best model match.

    ``discarded`` lists inputs belonging to groups that never reached the
    threshold.
    """

    groups: tuple[tuple[int, ...], ...]
    matches: tuple[int, ...]
    scores: tuple[float, ...]
    discarded: tuple[int, ...]
    tau: float

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "groups": [
                {"members": list(g), "model_segment": j, "score": s}
                for g, j, s in zip(self.groups, self.matches, self.scores)
            ],
            "discarded": list(self.discarded),
        }


def match_quality(s: SegmentDescriptor, rb: RuleBase) -> tuple[float, float, int]:
    """Best shape match of ``s`` as (score, -deviation, model index).

    Scores saturate at 1 inside a trapezoid core, so the crisp log-distance
    to the core center breaks ties between saturated candidates.
    """
    best = (-1.0, -math.inf, 0)
    usable = not is_degenerate(s) and s.x_max > s.x_min
    for rule in rb.shape_rules:
        if usable:
            mu = shape_score(s, rule)
            dev = abs(math.log(s.area / rule.area_set.center)) + abs(
                math.log(shape_coefficient(s) / rule.q_set.center)
            )
        else:
            mu, dev = 0.0, math.inf
        if (mu, -dev) > best[:2]:
            best = (mu, -dev, rule.j)
    return best


def merge_to_model(
    es_prime: Sequence[SegmentDescriptor],
    rb: RuleBase,
    tau: float = 0.5,
    gamma: float = 0.1,
) -> tuple[list[SegmentDescriptor], MergePlan]:
    """Greedy agglomerative merging of extracted fragments towards the model segments.

    Starting from singletons, every adjacent pair of groups (bbox gap <=
    gamma * model diagonal) is a merge candidate if the merged descriptor
    matches some model segment better than either part does.  The candidate
    with the best merged match is applied; ties go to the lowest pair of
    group indices, groups being ordered by their smallest member.  When no
    pair improves, connected triples are tried under the same rule, since a
    segment cut in three often has no improving pair.  This repeats until
    nothing improves.  Groups reaching ``tau`` against some model segment
    are kept, the rest are reported as discarded.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    reach = gamma * rb.diagonal
    groups: list[tuple[int, ...]] = [(i,) for i in range(len(es_prime))]
    descs: list[SegmentDescriptor] = list(es_prime)
    quality = [match_quality(s, rb) for s in descs]
    adjacent: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}
    merged_cache: dict[tuple[tuple[int, ...], ...], tuple] = {}

    def near(p: int, q: int) -> bool:
        key = (groups[p], groups[q])
        if key not in adjacent:
            adjacent[key] = bbox_gap(descs[p], descs[q]) <= reach
        return adjacent[key]

    def candidate(members: tuple[int, ...]):
        key = tuple(groups[k] for k in members)
        if key not in merged_cache:
            m = descs[members[0]]
            for k in members[1:]:
                m = merge(m, descs[k])
            merged_cache[key] = (match_quality(m, rb), m)
        return merged_cache[key]

    def best_of(options):
        pick, pick_quality = None, None
        for members in options:
            cand_q = candidate(members)[0][:2]
            if any(cand_q <= quality[k][:2] for k in members):
                continue
            if pick_quality is None or cand_q > pick_quality:
                pick, pick_quality = members, cand_q
        return pick

    while len(groups) > 1:
        n = len(groups)
        pairs = ((p, q) for p in range(n) for q in range(p + 1, n) if near(p, q))
        pick = best_of(pairs)
        if pick is None:
            triples = (
                (p, q, r)
                for p in range(n)
                for q in range(p + 1, n)
                for r in range(q + 1, n)
                if near(p, q) + near(p, r) + near(q, r) >= 2
            )
            pick = best_of(triples)
        if pick is None:
            break
        quality[pick[0]], descs[pick[0]] = candidate(pick)
        groups[pick[0]] = tuple(sorted(i for k in pick for i in groups[k]))
        for k in sorted(pick[1:], reverse=True):
            del groups[k], descs[k], quality[k]

    kept, kept_groups, matches, scores, discarded = [], [], [], [], []
    for g, s, (mu, _, j) in zip(groups, descs, quality):
        if mu >= tau:
            kept.append(s)
            kept_groups.append(g)
            matches.append(j)
            scores.append(mu)
        else:
            discarded.extend(g)
    plan = MergePlan(tuple(kept_groups), tuple(matches), tuple(scores), tuple(sorted(discarded)), tau)
    return kept, plan
