"""Run configuration shared by the CLI, the benchmark and the scripts."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ParseError


@dataclass(frozen=True)
class Widths:
    """Trapezoid half-widths used when fuzzifying model parameters.

    ``alpha``/``beta`` are relative (fraction of the value) core/support
    half-widths for area and shape coefficient; ``alpha_d``/``beta_d`` are
    absolute half-widths for centroid offsets, as fractions of the model
    diagonal.
    """

    alpha: float = 0.15
    beta: float = 0.40
    alpha_d: float = 0.05
    beta_d: float = 0.15

    def __post_init__(self) -> None:
        for f in fields(self):
            if not getattr(self, f.name) >= 0:
                raise ValueError(f"width '{f.name}' must be nonnegative")
        if self.beta < self.alpha or self.beta_d < self.alpha_d:
            raise ValueError("support half-width must not be smaller than core half-width")

    def scaled(self, k: float) -> Widths:
        return Widths(self.alpha * k, self.beta * k, self.alpha_d * k, self.beta_d * k)


@dataclass(frozen=True)
class Config:
    widths: Widths = Widths()
    tau: float = 0.5
    tie_tol: float = 1e-9
    gamma: float = 0.1
    normalize_perfect_match: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must lie in [0, 1], got {self.tau}")
        if self.tie_tol < 0 or self.gamma < 0:
            raise ValueError("tie_tol and gamma must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> Config:
        if not isinstance(data, dict):
            raise ParseError("config must be a JSON object")
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {f.name for f in fields(Widths)}
        if unknown:
            raise ParseError(f"config: unknown field(s) {sorted(unknown)}")
        w = data.pop("widths", {})
        # flat width keys are accepted too
        for f in fields(Widths):
            if f.name in data:
                w[f.name] = data.pop(f.name)
        try:
            return cls(widths=Widths(**{k: float(v) for k, v in w.items()}), **data)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"config: {exc}") from None

    @classmethod
    def load(cls, path: str | Path) -> Config:
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ParseError(f"config {path}: invalid JSON at line {exc.lineno} ({exc.msg})") from None
