"""SVG overlay of a recognition: extracted fragments, merged segments and the winning model."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .descriptors import SegmentDescriptor, merge_all
from .pipeline import Recognition
from .rulebase import RuleBase


def _rect(s: SegmentDescriptor, stroke: str, width: float, dash: str | None = None) -> str:
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<rect x="{s.x_min:.2f}" y="{s.y_min:.2f}" width="{s.x_max - s.x_min:.2f}" '
        f'height="{s.y_max - s.y_min:.2f}" fill="none" stroke="{stroke}" stroke-width="{width}"{extra}/>'
    )


def render_overlay(
    es_prime: Sequence[SegmentDescriptor],
    recognition: Recognition,
    rulebases: Sequence[RuleBase],
    size: tuple[int, int] | None = None,
) -> str:
    """Grey: extracted fragments; blue: merged segments for the winner; white: winner's model segments."""
    by_class = {rb.class_id: rb for rb in rulebases}
    res = recognition.result
    model = by_class[res.winner].segments if res.winner else ()
    merged = recognition.merged.get(res.winner, []) if res.winner else []
    if size is None:
        env = merge_all(list(es_prime) + list(model))
        size = (int(env.x_max + 20), int(env.y_max + 40))
    w, h = size
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#202020"/>',
    ]
    parts += [_rect(s, "#909090", 1, "3,2") for s in es_prime]
    parts += [_rect(s, "#3070ff", 1.5) for s in merged]
    parts += [_rect(s, "#ffffff", 2) for s in model]
    if res.winner:
        label = f"{res.winner} {res.scores[res.winner]:.2f}"
    else:
        label = "ambiguous: " + ", ".join(res.tied)
    parts.append(f'<text x="8" y="{h - 12}" fill="#ffffff" font-family="sans-serif" font-size="16">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
