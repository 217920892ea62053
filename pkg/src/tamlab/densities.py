"""Exact local densities of Kodaira types and Tamagawa numbers.

``delta_prime(p, K, c)`` is the proportion of pairs (a4, a6) in Z_p^2 whose
short model is p-minimal with type K and c_p = c; ``delta_hat`` covers the
p in {2, 3} curves that only become minimal as long models.  ``delta(p, c)``
is the proportion whose p-minimal model has c_p = c, obtained by summing
over types and weighting by the rescaling series 1 + p^-10 + p^-20 + ...

Families indexed by n (I_n, I_n*) are stored as functions of (p, n); every
such function is geometric in n with ratio 1/p, which gives exact sums over
all n without truncation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .arith import epsilon, is_prime
from .kodaira import KodairaType

Q = Fraction


@dataclass(frozen=True)
class Row:
    """One table row: a type family, a c_p rule and its proportion.

    ``c`` is an int, "eps" (c_p = epsilon(n)) or "n" (c_p = n).  Indexed
    families cover n_min <= n <= n_max (n_max None means unbounded).
    """

    family: str
    c: int | str
    value: Callable[[int, int], Fraction]
    n_min: int = 0
    n_max: int | None = 0

    @property
    def indexed(self) -> bool:
        return self.family in ("In", "In*")

    def c_at(self, n: int) -> int:
        if self.c == "eps":
            return epsilon(n)
        if self.c == "n":
            return n
        return self.c


def _rows_large(p: int) -> list[Row]:
    return [
        Row("I0", 1, lambda p, n: Q(p - 1, p)),
        Row("In", 1, lambda p, n: Q((p - 1) ** 2, p**3), 1, 1),
        Row("In", 2, lambda p, n: Q((p - 1) ** 2, p**4), 2, 2),
        Row("In", "eps", lambda p, n: Q((p - 1) ** 2, 2 * p ** (n + 2)), 3, None),
        Row("In", "n", lambda p, n: Q((p - 1) ** 2, 2 * p ** (n + 2)), 3, None),
        Row("II", 1, lambda p, n: Q(p - 1, p**3)),
        Row("III", 2, lambda p, n: Q(p - 1, p**4)),
        Row("IV", 1, lambda p, n: Q(p - 1, 2 * p**5)),
        Row("IV", 3, lambda p, n: Q(p - 1, 2 * p**5)),
        Row("I0*", 1, lambda p, n: Q(p * p - 1, 3 * p**7)),
        Row("I0*", 2, lambda p, n: Q(p - 1, 2 * p**6)),
        Row("I0*", 4, lambda p, n: Q((p - 1) * (p - 2), 6 * p**7)),
        Row("In*", 2, lambda p, n: Q((p - 1) ** 2, 2 * p ** (7 + n)), 1, None),
        Row("In*", 4, lambda p, n: Q((p - 1) ** 2, 2 * p ** (7 + n)), 1, None),
        Row("IV*", 1, lambda p, n: Q(p - 1, 2 * p**8)),
        Row("IV*", 3, lambda p, n: Q(p - 1, 2 * p**8)),
        Row("III*", 2, lambda p, n: Q(p - 1, p**9)),
        Row("II*", 1, lambda p, n: Q(p - 1, p**10)),
    ]


def _const(x: Fraction) -> Callable[[int, int], Fraction]:
    return lambda p, n: x


_ROWS_2 = [
    Row("II", 1, _const(Q(1, 2))),
    Row("III", 2, _const(Q(1, 4))),
    Row("IV", 1, _const(Q(1, 16))),
    Row("IV", 3, _const(Q(1, 16))),
    Row("I0*", 1, _const(Q(1, 32))),
    Row("I0*", 2, _const(Q(1, 32))),
    Row("In*", 2, lambda p, n: Q(1, 2 ** (n + 6)), 1, None),
    Row("In*", 4, lambda p, n: Q(1, 2 ** (n + 6)), 1, None),
    Row("IV*", 1, _const(Q(1, 128))),
    Row("IV*", 3, _const(Q(1, 128))),
    Row("III*", 2, _const(Q(1, 128))),
    Row("II*", 1, _const(Q(1, 256))),
]

_ROWS_3 = [
    Row("I0", 1, _const(Q(2, 3))),
    Row("II", 1, _const(Q(2, 9))),
    Row("III", 2, _const(Q(2, 27))),
    Row("IV", 1, _const(Q(1, 81))),
    Row("IV", 3, _const(Q(1, 81))),
    Row("I0*", 1, _const(Q(8, 3**7))),
    Row("I0*", 2, _const(Q(1, 3**5))),
    Row("I0*", 4, _const(Q(1, 3**7))),
    Row("In*", 2, lambda p, n: Q(2, 3 ** (n + 6)), 1, None),
    Row("In*", 4, lambda p, n: Q(2, 3 ** (n + 6)), 1, None),
    Row("IV*", 1, _const(Q(7, 3**9))),
    Row("IV*", 3, _const(Q(7, 3**9))),
    Row("III*", 2, _const(Q(10, 3**9))),
    Row("II*", 1, _const(Q(2, 3**9))),
]

_HAT_2 = [
    Row("I0", 1, _const(Q(1, 512))),
    Row("In", 1, _const(Q(1, 2**11)), 1, 1),
    Row("In", 2, _const(Q(1, 2**12)), 2, 2),
    Row("In", "eps", lambda p, n: Q(1, 2 ** (n + 11)), 3, None),
    Row("In", "n", lambda p, n: Q(1, 2 ** (n + 11)), 3, None),
]

_HAT_3 = [
    Row("I0", 1, _const(Q(4, 3**11))),
    Row("In", 1, _const(Q(4, 3**12)), 1, 1),
    Row("In", 2, _const(Q(4, 3**13)), 2, 2),
    Row("In", "eps", lambda p, n: Q(2, 3 ** (n + 11)), 3, None),
    Row("In", "n", lambda p, n: Q(2, 3 ** (n + 11)), 3, None),
]


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def prime_rows(p: int) -> list[Row]:
    _check_prime(p)
    if p == 2:
        return _ROWS_2
    if p == 3:
        return _ROWS_3
    return _rows_large(p)


def hat_rows(p: int) -> list[Row]:
    if p == 2:
        return _HAT_2
    if p == 3:
        return _HAT_3
    raise ValueError("non-minimal-origin densities exist only at p = 2 and p = 3")


def _lookup(rows: list[Row], p: int, kodaira: KodairaType, c: int) -> Fraction:
    if c not in kodaira.legal_tamagawa():
        raise ValueError(f"c = {c} is impossible for type {kodaira}")
    total = Q(0)
    for row in rows:
        if row.family != kodaira.family:
            continue
        n = kodaira.n
        if row.indexed and (n < row.n_min or (row.n_max is not None and n > row.n_max)):
            continue
        if row.c_at(n) == c:
            total += row.value(p, n)
    return total


def delta_prime(p: int, kodaira: KodairaType | str, c: int) -> Fraction:
    """Proportion of short models that are p-minimal of type K with c_p = c."""
    if isinstance(kodaira, str):
        kodaira = KodairaType.parse(kodaira)
    return _lookup(prime_rows(p), p, kodaira, c)


def delta_hat(p: int, kodaira: KodairaType | str, c: int) -> Fraction:
    """Proportion of short models at p in {2, 3} that reach a starred case
    and end with minimal type K and c_p = c."""
    rows = hat_rows(p)
    if isinstance(kodaira, str):
        kodaira = KodairaType.parse(kodaira)
    return _lookup(rows, p, kodaira, c)


def _row_sum(row: Row, p: int, c: int | None) -> Fraction:
    """Sum of a row over all its n (restricted to c_p = c unless c is None)."""
    if not row.indexed:
        return row.value(p, 0) if c is None or row.c == c else Q(0)
    if row.n_max is not None:
        ns = range(row.n_min, row.n_max + 1)
        return sum((row.value(p, n) for n in ns if c is None or row.c_at(n) == c), Q(0))
    lo = row.n_min
    if c is None:
        return row.value(p, lo) * Q(p, p - 1)
    if row.c == "n":
        return row.value(p, c) if c >= lo else Q(0)
    if row.c == "eps":
        if c not in (1, 2):
            return Q(0)
        n0 = lo if epsilon(lo) == c else lo + 1
        return row.value(p, n0) * Q(p * p, p * p - 1)
    return row.value(p, lo) * Q(p, p - 1) if row.c == c else Q(0)


def rescaling_factor(p: int) -> Fraction:
    """1 + p^-10 + p^-20 + ...: every curve is p^10 times as likely to be
    met before a rescaling as after one."""
    return Q(p**10, p**10 - 1)


def minimal_mass(p: int) -> Fraction:
    """Proportion of short models that are p-minimal."""
    return sum((_row_sum(r, p, None) for r in prime_rows(p)), Q(0))


def delta_table(p: int, c: int) -> Fraction:
    """delta_p(c) by summing the type tables."""
    if c < 1:
        raise ValueError("c must be positive")
    rows = prime_rows(p) + (hat_rows(p) if p in (2, 3) else [])
    return rescaling_factor(p) * sum((_row_sum(r, p, c) for r in rows), Q(0))


def delta_closed_form(p: int, c: int) -> Fraction:
    """delta_p(c) from the rational functions of p (p >= 5), or the
    geometric tail c >= 5 at p in {2, 3}."""
    _check_prime(p)
    if c < 1:
        raise ValueError("c must be positive")
    if p in (2, 3):
        if c < 5:
            raise ValueError("closed form at p = 2, 3 covers c >= 5 only")
        return Q(1, p ** (c + 1) * (1023 if p == 2 else 29524))
    s = p**8 + p**6 + p**4 + p**2 + 1
    if c == 1:
        num = p * (6 * p**7 + 9 * p**6 + 9 * p**5 + 7 * p**4 + 8 * p**3 + 7 * p**2 + 9 * p + 6)
        return 1 - Q(num, 6 * (p + 1) ** 2 * s)
    if c == 2:
        num = p * (2 * p**7 + 2 * p**6 + p**5 + p**4 + 2 * p**3 + p**2 + 2 * p + 2)
        return Q(num, 2 * (p + 1) ** 2 * s)
    if c == 3:
        return Q(p**2 * (p**4 + 1), 2 * (p + 1) * s)
    if c == 4:
        return Q(p**3 * (3 * p**2 - 2 * p + 1), 6 * (p + 1) * s)
    return Q(p**10 - 2 * p**9 + p**8, 2 * p**c * (p**10 - 1))


@lru_cache(maxsize=4096)
def delta(p: int, c: int) -> Fraction:
    """Proportion of curves whose p-minimal model has c_p = c."""
    _check_prime(p)
    if c < 1:
        raise ValueError("c must be positive")
    if p in (2, 3):
        return delta_table(p, c)
    return delta_closed_form(p, c)


def delta_tail(p: int, c0: int) -> Fraction:
    """sum_{c >= c0} delta_p(c) for c0 >= 5, where delta_p(c) is p^-c times
    a constant."""
    if c0 < 5:
        raise ValueError("tail formula needs c0 >= 5")
    return delta(p, c0) * Q(p, p - 1)


def delta_weighted_tail(p: int, c0: int) -> Fraction:
    """sum_{c >= c0} c * delta_p(c) for c0 >= 5."""
    if c0 < 5:
        raise ValueError("tail formula needs c0 >= 5")
    x = Q(1, p)
    # sum_{c >= c0} c x^c = x^c0 (c0 - (c0 - 1) x) / (1 - x)^2
    return delta(p, c0) * (c0 - (c0 - 1) * x) / (1 - x) ** 2


def total_mass(p: int) -> Fraction:
    """sum_c delta_p(c); equals 1."""
    return sum((delta(p, c) for c in range(1, 5)), Q(0)) + delta_tail(p, 5)


def local_mean(p: int) -> Fraction:
    """sum_c c * delta_p(c), the local factor of the average Tamagawa product."""
    return sum((c * delta(p, c) for c in range(1, 5)), Q(0)) + delta_weighted_tail(p, 5)


@dataclass(frozen=True)
class DensityConstants:
    """rho = rho_coefficient / pi^10, kappa1 = 3/20, kappa2 = kappa2_sqrt6 * sqrt(6)."""

    rho_coefficient: Fraction
    kappa1: Fraction
    kappa2_sqrt6: Fraction

    @property
    def kappa_rational(self) -> Fraction:
        """rho * (kappa1 + kappa2) = kappa_rational * (2 + sqrt 6) / pi^10."""
        return self.rho_coefficient * self.kappa1 / 2

    def numeric(self, dps: int = 40):
        import mpmath
        with mpmath.workdps(dps):
            pi10 = mpmath.pi**10
            rho = mpmath.mpf(self.rho_coefficient.numerator) / self.rho_coefficient.denominator / pi10
            k2 = mpmath.mpf(self.kappa2_sqrt6.numerator) / self.kappa2_sqrt6.denominator * mpmath.sqrt(6)
            k1 = mpmath.mpf(self.kappa1.numerator) / self.kappa1.denominator
            return {"rho": +rho, "kappa1": +k1, "kappa2": +k2, "kappa": +(rho * (k1 + k2))}


# zeta(10) = pi^10 / 93555
ZETA10_DENOMINATOR = 93555


def rho_coefficient() -> Fraction:
    """r with rho = r / pi^10, rho the proportion of globally minimal models.

    rho = m_2 m_3 prod_{p >= 5} (1 - p^-10), where m_p is the p-minimal mass;
    the product over p >= 5 is 1 / (zeta(10) (1 - 2^-10)(1 - 3^-10)).
    """
    m = minimal_mass(2) * minimal_mass(3)
    return m * rescaling_factor(2) * rescaling_factor(3) * ZETA10_DENOMINATOR


def rho_minimal() -> DensityConstants:
    return DensityConstants(rho_coefficient(), Q(3, 20), Q(3, 40))


def delta_rows(p: int, c_max: int = 8):
    """(p, c, delta_p(c)) for c = 1 .. c_max."""
    return [(p, c, delta(p, c)) for c in range(1, c_max + 1)]


def type_rows(p: int, n_max: int = 4):
    """(p, kodaira, c, delta_prime, delta_hat) for every legal type up to index n_max."""
    types = [KodairaType(f) for f in ("I0", "II", "III", "IV", "I0*", "IV*", "III*", "II*")]
    types += [KodairaType("In", n) for n in range(1, n_max + 1)]
    types += [KodairaType("In*", n) for n in range(1, n_max + 1)]
    out = []
    for k in types:
        for c in k.legal_tamagawa():
            hat = delta_hat(p, k, c) if p in (2, 3) else Q(0)
            out.append((p, str(k), c, delta_prime(p, k, c), hat))
    return out


def to_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([str(x) for x in r])
    return buf.getvalue()
