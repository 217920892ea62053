"""Certified evaluation of the Tamagawa Euler products.

L(s) = prod_p f_p(s) with f_p(s) = sum_c delta_p(c) c^-s.  Primes up to
``prime_cutoff`` are multiplied out at >= 128-bit precision; the rest are
enclosed using two facts about the local densities for p >= 5, both checked
exactly in the test suite:

    delta_p(1) >= 1 - 1/p^2        and        delta_p(c) <= p^-c  (c >= 2).

Every returned value carries an absolute error bound covering truncation
of primes, truncation of c, and rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .densities import delta, rho_minimal

PRECISION_BITS = 160


@dataclass(frozen=True)
class SeriesValue:
    value: mpmath.mpf
    error_bound: mpmath.mpf
    prime_cutoff: int
    coefficient_cutoff: int

    @property
    def lower(self):
        return self.value - self.error_bound

    @property
    def upper(self):
        return self.value + self.error_bound

    def within(self, lo: float, hi: float) -> bool:
        """Is the whole enclosure inside [lo, hi)?"""
        return self.lower >= lo and self.upper < hi

    def to_json(self) -> dict:
        return {
            "value": mpmath.nstr(self.value, 20),
            "error_bound": mpmath.nstr(self.error_bound, 5),
            "prime_cutoff": self.prime_cutoff,
            "coefficient_cutoff": self.coefficient_cutoff,
        }


@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return tuple(int(x) for x in np.flatnonzero(sieve))


def _mpq(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


@lru_cache(maxsize=4)
def _local_table(Q: int) -> tuple:
    """Per prime p <= Q: (p, [delta_p(1..4)], K) with delta_p(c) = K p^-c for c >= 5."""
    with mpmath.workprec(PRECISION_BITS):
        out = []
        for p in primes_up_to(Q):
            head = [_mpq(delta(p, c)) for c in range(1, 5)]
            K = _mpq(delta(p, 5) * p**5)
            out.append((p, head, K))
        return tuple(out)


def _delta_mp(row, c: int):
    p, head, K = row
    return head[c - 1] if c <= 4 else K * mpmath.mpf(p) ** (-c)


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def _multiplicative_partitions(m: int, least: int = 2):
    """Unordered factorisations m = c_1 * ... * c_k with least <= c_1 <= ..."""
    if m == 1:
        yield []
        return
    for c in range(least, m + 1):
        if m % c == 0:
            for rest in _multiplicative_partitions(m // c, c):
                yield [c] + rest


def _tail_coefficient_bound(d: int, Q: int):
    """Upper bound for the part of the d-th coefficient of
    prod_{p > Q} (1 + sum_{c >= 2} r_p(c) c^-s), r_p(c) = delta_p(c) / delta_p(1).

    Uses r_p(c) <= p^-c / (1 - p^-2) and sum_{p > Q} p^-c <= Q^(1-c) / (c-1).
    """
    if d == 1:
        return mpmath.mpf(1)
    inflate = 1 / (1 - mpmath.mpf(Q) ** -2)
    total = mpmath.mpf(0)
    for part in _multiplicative_partitions(d):
        term = mpmath.mpf(1)
        for c in part:
            term *= inflate * mpmath.mpf(Q) ** (1 - c) / (c - 1)
        total += term
    return total


def p_tam(m: int, prime_cutoff: int = 10**5) -> SeriesValue:
    """P_Tam(m): the proportion of curves with Tamagawa product m."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    Q = prime_cutoff
    with mpmath.workprec(PRECISION_BITS):
        divs = _divisors(m)
        big = [c for c in divs if c > 1]
        # coef[d] = d-th coefficient of prod_{p <= Q} (1 + sum_c r_p(c) c^-s)
        coef = {d: mpmath.mpf(0) for d in divs}
        coef[1] = mpmath.mpf(1)
        base = mpmath.mpf(1)
        for row in _local_table(Q):
            d1 = row[1][0]
            base *= d1
            r = {c: _delta_mp(row, c) / d1 for c in big}
            new = dict(coef)
            for d in divs:
                for c in big:
                    if d % c == 0:
                        new[d] += coef[d // c] * r[c]
            coef = new
        head = base * coef[m]
        # primes above Q: prod delta_p(1) in [Q/(Q+1), 1]
        lo = head * mpmath.mpf(Q) / (Q + 1)
        extra = sum((coef[m // d] * _tail_coefficient_bound(d, Q) for d in big), mpmath.mpf(0))
        hi = base * (coef[m] + extra)
        eps = mpmath.mpf(2) ** (-PRECISION_BITS + 20) * hi
        value = (lo + hi) / 2
        return SeriesValue(+value, +((hi - lo) / 2 + eps), Q, m)


def local_factor(p: int, s, c_cutoff: int = 64, row=None):
    """(f_p(s), bound on the omitted c > c_cutoff part)."""
    with mpmath.workprec(max(PRECISION_BITS, mpmath.mp.prec)):
        return _local_factor(p, mpmath.mpf(s), c_cutoff, row)


def _local_factor(p: int, s, c_cutoff: int, row):
    if row is None:
        row = (p, [_mpq(delta(p, c)) for c in range(1, 5)], _mpq(delta(p, 5) * p**5))
    top = max(c_cutoff, 4)
    total = mpmath.mpf(0)
    for c in range(1, 5):
        total += row[1][c - 1] * mpmath.mpf(c) ** (-s)
    x = 1 / mpmath.mpf(p)
    xc = x**4
    floor = mpmath.mpf(2) ** (-PRECISION_BITS - 8)
    for c in range(5, top + 1):
        xc *= x
        term = row[2] * xc
        total += term * mpmath.mpf(c) ** (-s)
        if term * c < floor:
            # remaining terms are below the working precision
            top = c
            break
    # sum_{c > top} c K x^c, and c^-s <= c for s >= -1
    c0 = top + 1
    tail = row[2] * x**c0 * (c0 - (c0 - 1) * x) / (1 - x) ** 2
    if s == -1:
        return total + tail, mpmath.mpf(0)
    return total, tail


def l_tam(s, prime_cutoff: int = 10**5, c_cutoff: int = 64) -> SeriesValue:
    """L_Tam(s) = sum_m P_Tam(m) m^-s for real s >= -1."""
    if s < -1:
        raise ValueError("only s >= -1 is certified")
    Q = prime_cutoff
    with mpmath.workprec(PRECISION_BITS):
        prod = mpmath.mpf(1)
        rel = mpmath.mpf(0)
        for row in _local_table(Q):
            f, err = local_factor(row[0], s, c_cutoff, row)
            prod *= f
            rel += err / f
        # primes above Q: f_p - 1 in [-1/p^2, 1/(p-1)^2]
        lo = prod * mpmath.mpf(Q) / (Q + 1)
        hi = prod * mpmath.exp(mpmath.mpf(1) / (Q - 1)) * mpmath.exp(rel)
        eps = mpmath.mpf(2) ** (-PRECISION_BITS + 20) * hi
        return SeriesValue(+((lo + hi) / 2), +((hi - lo) / 2 + eps), Q, c_cutoff)


def local_mean(p: int):
    """sum_c c delta_p(c) rendered numerically (exact upstream)."""
    from .densities import local_mean as exact
    with mpmath.workprec(PRECISION_BITS):
        return _mpq(exact(p))


def convenient_density(prime_cutoff: int = 10**5) -> SeriesValue:
    """rho * (kappa1 + kappa2) * P_Tam(1)."""
    consts = rho_minimal()
    p1 = p_tam(1, prime_cutoff)
    with mpmath.workprec(PRECISION_BITS):
        kappa = consts.numeric(dps=50)["kappa"]
        return SeriesValue(+(kappa * p1.value), +(kappa * p1.error_bound), prime_cutoff, 1)


def closed_form_convenient_density(p_tam_1) -> mpmath.mpf:
    """12805748865 (2 + sqrt 6) / (1830488 pi^10) * P_Tam(1)."""
    with mpmath.workprec(PRECISION_BITS):
        return (mpmath.mpf(12805748865) * (2 + mpmath.sqrt(6))
                / (1830488 * mpmath.pi**10) * p_tam_1)
