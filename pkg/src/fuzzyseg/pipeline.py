"""Scene-level recognition: per-class merging followed by classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import Config
from .descriptors import SegmentDescriptor
from .errors import EmptyScene
from .inference import ClassificationResult, decide, score_class
from .preprocess import MergePlan, merge_to_model
from .rulebase import RuleBase


@dataclass(frozen=True)
class Recognition:
    result: ClassificationResult
    merged: dict[str, list[SegmentDescriptor]]
    plans: dict[str, MergePlan]

    def to_dict(self) -> dict:
        out = self.result.to_dict()
        out["merge_plans"] = {c: p.to_dict() for c, p in self.plans.items()}
        return out


def recognize(es_prime: Sequence[SegmentDescriptor], rulebases: Sequence[RuleBase], config: Config = Config()) -> Recognition:
    """Merge the extracted fragments towards each class model, then score every class on its own merged set."""
    if len(es_prime) == 0:
        raise EmptyScene("scene has no segments")
    if not rulebases:
        raise ValueError("at least one rule base is required")
    merged, plans, per_class = {}, {}, []
    for rb in rulebases:
        es, plan = merge_to_model(es_prime, rb, config.tau, config.gamma)
        merged[rb.class_id] = es
        plans[rb.class_id] = plan
        per_class.append(score_class(es, rb, config.normalize_perfect_match))
    return Recognition(decide(per_class, config.tie_tol), merged, plans)
