"""Trapezoidal fuzzy sets and the aggregation operators used by the reasoner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, InvalidWidths


@dataclass(frozen=True)
class Trapezoid:
    """Membership function with support [a, d] and core [b, c]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise InvalidWidths(f"trapezoid breakpoints out of order: {self.as_list()}")

    def __call__(self, x: float) -> float:
        return membership(self, x)

    @property
    def center(self) -> float:
        return 0.5 * (self.b + self.c)

    def as_list(self) -> list[float]:
        return [float(self.a), float(self.b), float(self.c), float(self.d)]

    @classmethod
    def from_list(cls, values: Sequence[float]) -> Trapezoid:
        if len(values) != 4:
            raise InvalidWidths(f"trapezoid needs 4 breakpoints, got {len(values)}")
        return cls(*(float(v) for v in values))


def membership(t: Trapezoid, x: float) -> float:
    # core is closed, so vertical edges (a == b, c == d) evaluate to 1
    if t.b <= x <= t.c:
        return 1.0
    if x <= t.a or x >= t.d or math.isnan(x):
        return 0.0
    if x < t.b:
        return (x - t.a) / (t.b - t.a)
    return (t.d - x) / (t.d - t.c)


def mean(values: Sequence[float]) -> float:
    if len(values) == 0:
        raise EmptyInput("mean of an empty sequence")
    avg = math.fsum(values) / len(values)
    # rounding must not push the mean outside the input range
    return min(max(avg, min(values)), max(values))


def trapezoid_around(center: float, core_halfwidth: float, support_halfwidth: float) -> Trapezoid:
    if not (0 <= core_halfwidth <= support_halfwidth):
        raise InvalidWidths(
            f"need 0 <= core ({core_halfwidth}) <= support ({support_halfwidth})"
        )
    return Trapezoid(
        center - support_halfwidth,
        center - core_halfwidth,
        center + core_halfwidth,
        center + support_halfwidth,
    )


def membership_array(t: Trapezoid, x) -> np.ndarray:
    """Vectorised :func:`membership`; agrees with it elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rise = (x - t.a) / (t.b - t.a) if t.b > t.a else np.zeros_like(x)
        fall = (t.d - x) / (t.d - t.c) if t.d > t.c else np.zeros_like(x)
    left = (x > t.a) & (x < t.b)
    right = (x > t.c) & (x < t.d)
    out[left] = rise[left]
    out[right] = fall[right]
    out[(x >= t.b) & (x <= t.c)] = 1.0
    return out
