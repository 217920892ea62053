"""Short and long Weierstrass models over Z and height-ordered enumeration."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator


class SingularCurveError(ValueError):
    """Raised when a Weierstrass model has zero discriminant."""


@dataclass(frozen=True, order=True)
class Curve:
    """E(a4, a6): y^2 = x^3 + a4*x + a6 with nonzero discriminant."""

    a4: int
    a6: int

    def __post_init__(self):
        if 4 * self.a4**3 + 27 * self.a6**2 == 0:
            raise SingularCurveError(f"singular model (a4, a6) = ({self.a4}, {self.a6})")

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a4**3 + 27 * self.a6**2)

    @property
    def height(self) -> int:
        return max(4 * abs(self.a4) ** 3, 27 * self.a6**2)

    def to_json(self) -> dict:
        return {"a4": str(self.a4), "a6": str(self.a6)}

    @classmethod
    def from_json(cls, obj: dict | str) -> "Curve":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["a4"]), int(obj["a6"]))


@dataclass(frozen=True)
class LongModel:
    """y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise SingularCurveError(f"singular long model {self.ainvs}")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.ainvs
        return a1**2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3**2 - a4**2

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class HeightBound:
    X: int

    def __post_init__(self):
        if self.X < 0:
            raise ValueError("height bound must be nonnegative")

    @property
    def a4_max(self) -> int:
        """Largest |a4| with 4|a4|^3 <= X."""
        r = _icbrt(self.X // 4)
        return r

    @property
    def a6_max(self) -> int:
        """Largest |a6| with 27 a6^2 <= X."""
        return math.isqrt(self.X // 27)

    def contains(self, curve: Curve) -> bool:
        return curve.height <= self.X


def _icbrt(n: int) -> int:
    if n <= 0:
        return 0
    r = round(n ** (1 / 3))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def discriminant(curve: Curve) -> int:
    return curve.discriminant


def height(curve: Curve) -> int:
    return curve.height


def to_long_model(curve: Curve) -> LongModel:
    return LongModel(0, 0, 0, curve.a4, curve.a6)


def enumerate_curves(bound: HeightBound | int, a4_range: tuple[int, int] | None = None) -> Iterator[Curve]:
    """Every nonsingular (a4, a6) with height <= X, lexicographically.

    ``a4_range`` (inclusive) restricts the stream to one shard; shards over
    contiguous a4 intervals concatenate to the full stream.
    """
    if not isinstance(bound, HeightBound):
        bound = HeightBound(bound)
    m4, m6 = bound.a4_max, bound.a6_max
    lo, hi = -m4, m4
    if a4_range is not None:
        lo, hi = max(lo, a4_range[0]), min(hi, a4_range[1])
    for a4 in range(lo, hi + 1):
        for a6 in range(-m6, m6 + 1):
            if 4 * a4**3 + 27 * a6**2 != 0:
                yield Curve(a4, a6)


def count_curves(bound: HeightBound | int) -> int:
    """N(X) without materialising the stream."""
    if not isinstance(bound, HeightBound):
        bound = HeightBound(bound)
    m4, m6 = bound.a4_max, bound.a6_max
    total = (2 * m4 + 1) * (2 * m6 + 1)
    # singular pairs are (-3w^2, 2w^3)
    w = 0
    while 3 * w * w <= m4 and 2 * w**3 <= m6:
        total -= 1 if w == 0 else 2
        w += 1
    return total
