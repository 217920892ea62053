"""Kodaira symbols and per-prime reduction records."""

from __future__ import annotations

import re
from dataclasses import dataclass

# symbols without an index
_PLAIN = ("I0", "II", "III", "IV", "I0*", "IV*", "III*", "II*")


@dataclass(frozen=True)
class KodairaType:
    """A Kodaira symbol.  ``family`` is one of ``_PLAIN`` or "In" / "In*",
    the last two carrying a positive index ``n``."""

    family: str
    n: int = 0

    def __post_init__(self):
        if self.family in ("In", "In*"):
            if self.n < 1:
                raise ValueError(f"{self.family} needs n >= 1")
        elif self.family in _PLAIN:
            if self.n != 0:
                raise ValueError(f"{self.family} takes no index")
        else:
            raise ValueError(f"unknown Kodaira family {self.family!r}")

    def __str__(self) -> str:
        if self.family in ("In", "In*"):
            return f"{self.family}:{self.n}"
        return self.family

    @classmethod
    def parse(cls, text: str) -> "KodairaType":
        m = re.fullmatch(r"(In\*?):(\d+)", text)
        if m:
            return cls(m.group(1), int(m.group(2)))
        return cls(text)

    @property
    def pretty(self) -> str:
        if self.family == "In":
            return f"I{self.n}"
        if self.family == "In*":
            return f"I{self.n}*"
        return self.family

    def legal_tamagawa(self) -> tuple[int, ...]:
        """Values c_p can take for this type."""
        f = self.family
        if f in ("I0", "II", "II*"):
            return (1,)
        if f in ("III", "III*"):
            return (2,)
        if f in ("IV", "IV*"):
            return (1, 3)
        if f == "I0*":
            return (1, 2, 4)
        if f == "In*":
            return (2, 4)
        return tuple(sorted({1, 2, self.n}))


def I(n: int) -> KodairaType:
    return KodairaType("I0") if n == 0 else KodairaType("In", n)


def Istar(n: int) -> KodairaType:
    return KodairaType("I0*") if n == 0 else KodairaType("In*", n)


I0 = KodairaType("I0")
II = KodairaType("II")
III = KodairaType("III")
IV = KodairaType("IV")
I0STAR = KodairaType("I0*")
IVSTAR = KodairaType("IV*")
IIISTAR = KodairaType("III*")
IISTAR = KodairaType("II*")


@dataclass(frozen=True)
class LocalReduction:
    p: int
    kodaira: KodairaType
    c_p: int
    short_minimal: bool = True
    rescalings: int = 0
    min_disc_valuation: int = 0

    def __post_init__(self):
        if self.c_p not in self.kodaira.legal_tamagawa():
            raise ValueError(f"c_p = {self.c_p} impossible for type {self.kodaira}")
        if (self.kodaira == I0) != (self.min_disc_valuation == 0):
            raise ValueError("type I0 iff minimal discriminant is a unit")

    def key(self) -> tuple[KodairaType, int, int]:
        """The model-independent part: (type, c_p, minimal disc valuation)."""
        return (self.kodaira, self.c_p, self.min_disc_valuation)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "kodaira": str(self.kodaira),
            "cp": self.c_p,
            "minimal": self.short_minimal,
            "rescalings": self.rescalings,
            "vmin": self.min_disc_valuation,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LocalReduction":
        return cls(
            p=int(obj["p"]),
            kodaira=KodairaType.parse(obj["kodaira"]),
            c_p=int(obj["cp"]),
            short_minimal=bool(obj["minimal"]),
            rescalings=int(obj["rescalings"]),
            min_disc_valuation=int(obj["vmin"]),
        )
