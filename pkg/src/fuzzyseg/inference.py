"""Three-stage fuzzy reasoning over segment descriptors.

Stage one scores every (input segment, model segment) pair on shape, stage
two checks the placement of partner segments relative to a candidate
anchor, stage three combines both into a class membership.  The class is
picked by maximal membership.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .descriptors import SegmentDescriptor, is_degenerate
from .errors import EmptyScene
from .fuzzy import membership_array
from .rulebase import RuleBase, ShapeRule, shape_memberships

log = logging.getLogger(__name__)

TIE_TOL = 1e-9


def shape_score(s: SegmentDescriptor, rule: ShapeRule) -> float:
    """Mean of area and shape-coefficient memberships; 0 for degenerate segments."""
    if is_degenerate(s):
        return 0.0
    mu_a, mu_q = shape_memberships(rule, s)
    return 0.5 * (mu_a + mu_q)


def best_shape_match(s: SegmentDescriptor, rb: RuleBase) -> tuple[float, int]:
    """Highest shape score of ``s`` over the model segments, with its index (lowest on ties)."""
    best, best_j = -1.0, 0
    for rule in rb.shape_rules:
        mu = shape_score(s, rule)
        if mu > best:
            best, best_j = mu, rule.j
    return best, best_j


def shape_match(es: Sequence[SegmentDescriptor], rb: RuleBase) -> np.ndarray:
    """m x n matrix of shape similarities between input and model segments."""
    out = np.zeros((len(es), rb.n))
    for i, s in enumerate(es):
        if is_degenerate(s):
            log.warning("segment %d has zero height and cannot match any shape rule", i)
            continue
        for rule in rb.shape_rules:
            out[i, rule.j] = shape_score(s, rule)
    return out


def placement_match(es: Sequence[SegmentDescriptor], sm: np.ndarray, rb: RuleBase) -> np.ndarray:
    """m x (n-1) matrix; column k holds the placement consistency for model segment k+1.

    Entry (i1, k) is the best, over partners i2 != i1, of the mean of the dx
    membership, the dy membership and the partner's shape match to k+1.
    """
    m = len(es)
    out = np.zeros((m, rb.n - 1))
    if m < 2:
        return out
    xs = np.array([s.cx for s in es])
    ys = np.array([s.cy for s in es])
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    off_diag = ~np.eye(m, dtype=bool)
    for k, rule in enumerate(rb.placement_rules):
        terms = (membership_array(rule.dx_set, dx) + membership_array(rule.dy_set, dy) + sm[None, :, rule.j2]) / 3.0
        terms = np.where(off_diag, terms, -np.inf)
        out[:, k] = terms.max(axis=1)
    return out


def anchor_scores(sm: np.ndarray, pm: np.ndarray, n_c: int) -> np.ndarray:
    """Per-candidate-anchor value of the class formula, before the outer max."""
    return (sm[:, 0] + pm.sum(axis=1)) / (n_c + 1)


def class_membership(sm: np.ndarray, pm: np.ndarray, n_c: int) -> float:
    """Class membership: best candidate anchor's shape match plus placement matches, over n(c)+1."""
    if sm.shape[0] == 0:
        return 0.0
    return float(anchor_scores(sm, pm, n_c).max())


@dataclass(frozen=True)
class ClassScore:
    class_id: str
    score: float
    anchor_index: int | None


def score_class(es: Sequence[SegmentDescriptor], rb: RuleBase, normalize_perfect_match: bool = False) -> ClassScore:
    if len(es) == 0:
        return ClassScore(rb.class_id, 0.0, None)
    sm = shape_match(es, rb)
    pm = placement_match(es, sm, rb)
    per_anchor = anchor_scores(sm, pm, rb.n)
    i_star = int(np.argmax(per_anchor))
    score = float(per_anchor[i_star])
    if normalize_perfect_match:
        score = min(1.0, score * (rb.n + 1) / rb.n)
    return ClassScore(rb.class_id, score, i_star)


@dataclass(frozen=True)
class ClassificationResult:
    scores: dict[str, float]
    winner: str | None
    tied: tuple[str, ...]
    anchor_index: int | None
    anchors: dict[str, int | None] = field(default_factory=dict)

    @property
    def ambiguous(self) -> bool:
        return self.winner is None

    def to_dict(self) -> dict:
        return {
            "scores": dict(self.scores),
            "winner": self.winner,
            "tied": list(self.tied),
            "anchor_index": self.anchor_index,
        }


def decide(per_class: Sequence[ClassScore], tie_tol: float = TIE_TOL) -> ClassificationResult:
    """Maximal-membership defuzzification; near-equal maxima give an ambiguous result."""
    scores = {c.class_id: c.score for c in per_class}
    anchors = {c.class_id: c.anchor_index for c in per_class}
    top = max(scores.values())
    tied = tuple(c for c, v in scores.items() if top - v <= tie_tol)
    winner = tied[0] if len(tied) == 1 else None
    return ClassificationResult(scores, winner, tied, anchors[winner] if winner else None, anchors)


def classify(
    es: Sequence[SegmentDescriptor],
    rulebases: Sequence[RuleBase],
    normalize_perfect_match: bool = False,
    tie_tol: float = TIE_TOL,
) -> ClassificationResult:
    if len(es) == 0:
        raise EmptyScene("no segments to classify")
    if not rulebases:
        raise ValueError("at least one rule base is required")
    return decide([score_class(es, rb, normalize_perfect_match) for rb in rulebases], tie_tol)
