"""Local reduction of short Weierstrass curves E(a4, a6) at a prime.

The classifier dispatches on the valuation data (alpha4, alpha6, d) and, at
p = 2 and p = 3, on a few congruence classes and the unit parameters s, t
(and v, k at p = 2).  Models with alpha4 >= 4 and alpha6 >= 6 are rescaled
by (a4, a6) -> (a4/p^4, a6/p^6) and classified again.  At p in {2, 3} some
non-minimal short models only become minimal as long models; these land in
the "starred" branches and are flagged as not short-minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .arith import (
    INF, epsilon, factorize, is_prime, legendre, padic_sqrt, poly_roots_mod_p,
    split_valuation, valuation,
)
from .curves import Curve, to_long_model
from .generic_tate import generic_tate
from .kodaira import (
    I0, I0STAR, II, IISTAR, III, IIISTAR, IV, IVSTAR,
    I, Istar, LocalReduction,
)

# one guard digit on top of the d + 1 digits the congruence tests use
GUARD = 1


@dataclass(frozen=True)
class TateData:
    p: int
    alpha4: int | float
    alpha6: int | float
    A4: int
    A6: int
    d: int
    s: int | None = None
    t: int | None = None
    v: int | None = None
    k: int | float | None = None
    precision: int = 0

    @property
    def modulus(self) -> int:
        return self.p**self.precision


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _base(a4: int, a6: int, p: int):
    al4, A4 = split_valuation(a4, p)
    al6, A6 = split_valuation(a6, p)
    d = valuation(-16 * (4 * a4**3 + 27 * a6**2), p)
    return al4, A4, al6, A6, d


def _unit_root(p: int, unit: int, prec: int, sign_residue: int) -> int:
    """p-adic t with t^2 = unit (mod p^prec) and t = sign_residue (mod p)."""
    t = padic_sqrt(unit % p**prec, p, prec)
    if (t - sign_residue) % p:
        t = (-t) % p**prec
    return t


def _centered(x: int, m: int) -> int:
    x %= m
    return x - m if 2 * x > m else x


def tate_data(curve: Curve, p: int, precision: int | None = None) -> TateData:
    """The Tate data of E(a4, a6) at p.

    s and t are filled in only in the cancellation regimes that use them:
    v_p(4 a4^3) = v_p(27 a6^2) < d (all p >= 3), the p = 3 model with
    v_3(4 a4^3) >= v_3(27 a6^2) = d and alpha6 in {0, 3}, and the p = 2
    family (a4, a6) = (1, 2) mod 4, where v and k are also set.
    ``t`` is reduced modulo p**precision, ``s`` modulo p (its residue is all
    the case analysis reads), except at p = 2 where s is odd or 0.
    """
    _require_prime(p)
    a4, a6 = curve.a4, curve.a6
    al4, A4, al6, A6, d = _base(a4, a6, p)
    prec = precision if precision is not None else d + 1 + GUARD
    base = dict(p=p, alpha4=al4, alpha6=al6, A4=A4, A6=A6, d=d, precision=prec)

    if p == 2:
        if a4 % 4 != 1 or a6 % 4 != 2:
            return TateData(**base)
        K = prec + 1
        v = 2 ** ((d - 6) // 2) if d % 2 == 0 else 0
        u = (2 * v - a4) * pow(3, -1, 2**K) % 2**K
        t = padic_sqrt(u, 2, K)
        if (t - a6 // 2) % 4:
            t = -t
        t %= 2 ** (K - 1)
        e = (a6 - (2 * t**3 - 2 * v * t + v * v)) % 2 ** (K - 1)
        if e == 0:
            k, s = INF, 0
        else:
            k = valuation(e, 2)
            s = e >> k
        return TateData(**{**base, "precision": K - 1}, s=s, t=t, v=v, k=k)

    cancel = (d > 0 and al4 != INF and al6 != INF
              and 3 * al4 == 2 * al6 + (3 if p == 3 else 0) and 3 * al4 < d)
    if cancel:
        # a4 = -3 p^alpha4 t^2 (p >= 5), -3^alpha4 t^2 (p = 3)
        unit = -A4 * pow(3, -1, p**prec) if p != 3 else -A4
        t_mod_p = (-3 * A6 * pow(2 * A4, -1, p)) % p if p != 3 else (-A6) % 3
        t = _unit_root(p, unit, prec, t_mod_p)
        shift = al6 if p != 3 else al6 + 3
        rest = a6 - 2 * p**al6 * t**3
        vs, s = split_valuation(rest % p ** (prec + al6), p)
        if vs != d - shift:
            raise ArithmeticError(f"sign normalisation failed for {curve} at {p}")
        return TateData(**base, s=s % p, t=t)

    if p == 3 and al6 in (0, 3) and d == 3 + 2 * al6 and 3 * al4 >= d:
        # y^2 = (x - 3^(alpha6/3) t)^3 + ... with constant term 3^(alpha6+1) s
        j = al6 // 3
        t = A6 % 3
        rest = a6 - 3**al6 * t**3 - 3**j * a4 * t
        s = _centered(rest // 3 ** (al6 + 1), 3)
        return TateData(**base, s=s, t=t)

    return TateData(**base)


def is_short_minimal(curve: Curve, p: int) -> bool:
    """Is the short model E(a4, a6) itself p-minimal?"""
    al4, _, al6, _, d = _base(curve.a4, curve.a6, p)
    if al4 >= 4 and al6 >= 6:
        return False
    if p == 3:
        return not (al4 == 3 and al6 == 3 and d >= 12)
    if p == 2:
        if al4 >= 4 and curve.a6 % 64 == 16:
            return False
        return not (curve.a4 % 8 == 5 and curve.a6 % 8 == 6 and d >= 12)
    return True


def classify(curve: Curve, p: int) -> LocalReduction:
    """Kodaira type, c_p and minimality of E(a4, a6) at the prime p."""
    _require_prime(p)
    a4, a6 = curve.a4, curve.a6
    rescalings = 0
    while True:
        al4, A4, al6, A6, d = _base(a4, a6, p)
        if al4 >= 4 and al6 >= 6:
            a4, a6 = a4 // p**4, a6 // p**6
            rescalings += 1
            continue
        cur = Curve(a4, a6)
        if p == 2:
            out = _classify_2(cur, al4, al6, d)
        elif p == 3:
            out = _classify_3(cur, al4, A4, al6, A6, d)
        else:
            out = _classify_p(cur, p, al4, A4, al6, A6, d)
        kod, cp, starred, vmin = out
        return LocalReduction(p, kod, cp, rescalings == 0 and not starred, rescalings, vmin)


def _ind(n: int, split: bool) -> int:
    return n if split else epsilon(n)


def _classify_p(curve, p, al4, A4, al6, A6, d):
    """p >= 5.  Returns (type, c_p, starred, v_min)."""
    if d == 0:
        return I0, 1, False, 0
    if al4 == 0 and al6 == 0:
        t = (-3 * A6 * pow(2 * A4, -1, p)) % p
        return I(d), _ind(d, legendre(3 * t, p) == 1), False, d
    if al6 == 1:
        return II, 1, False, d
    if al4 == 1:
        return III, 2, False, d
    if al6 == 2:
        return IV, 2 + legendre(A6, p), False, d
    # alpha4 >= 2, alpha6 >= 3
    if d == 6:
        roots = poly_roots_mod_p([curve.a6 // p**3, curve.a4 // p**2, 0, 1], p)
        return I0STAR, 1 + roots, False, d
    if al4 == 2 and al6 == 3:
        n = d - 6
        td = tate_data(curve, p)
        s, t = td.s, td.t
        if n % 2:
            cp = 3 + legendre(s, p)
        else:
            cp = 3 + legendre(-s * pow(3 * t, -1, p), p)
        return Istar(n), cp, False, d
    if al6 == 4:
        return IVSTAR, 2 + legendre(A6, p), False, d
    if al4 == 3:
        return IIISTAR, 2, False, d
    return IISTAR, 1, False, d


def _classify_3(curve, al4, A4, al6, A6, d):
    if al4 == 0:
        return I0, 1, False, 0
    if al6 == 0:
        # alpha4 >= 1; the d = 3 branch uses the shifted model's constant
        if d == 3:
            s = tate_data(curve, 3).s
            return (II, 1, False, d) if s != 0 else (III, 2, False, d)
        if d == 4:
            return II, 1, False, d
        td = tate_data(curve, 3)
        s, t = td.s, td.t % 3
        if d == 5:
            return IV, 2 + legendre(s, 3), False, d
        if d == 6:
            return I0STAR, 1 + poly_roots_mod_p([s, 0, t, 1], 3), False, d
        n = d - 6
        if n % 2:
            cp = 4 if s % 3 == 1 else 2
        else:
            cp = 4 if (s + t) % 3 == 0 else 2
        return Istar(n), cp, False, d
    if al6 == 1:
        return II, 1, False, d
    if al4 == 1:
        return III, 2, False, d
    if al6 == 2:
        return IV, 2 + legendre(A6, 3), False, d
    if al4 == 2:
        roots = poly_roots_mod_p([curve.a6 // 27, A4, 0, 1], 3)
        return I0STAR, 1 + roots, False, d
    # alpha4 >= 3, alpha6 >= 3
    if al6 == 3:
        if d == 9:
            s = tate_data(curve, 3).s
            if s != 0:
                return IVSTAR, 2 + legendre(s, 3), False, d
            return IIISTAR, 2, False, d
        if d == 10:
            # x^3 + 9t x^2 + 81s: the quadratic Y^2 - s decides c_3
            s = tate_data(curve, 3).s
            return IVSTAR, 2 + legendre(s, 3), False, d
        if d == 11:
            return IISTAR, 1, False, d
        # alpha4 = alpha6 = 3, d >= 12: minimal only as a long model
        n = d - 12
        if n == 0:
            return I0, 1, True, 0
        t = (-A6) % 3
        return I(n), _ind(n, t == 1), True, n
    if al6 == 4:
        return IVSTAR, 2 + legendre(A6, 3), False, d
    if al4 == 3:
        return IIISTAR, 2, False, d
    return IISTAR, 1, False, d


_II_MOD4 = {(0, 2), (0, 3), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)}
_III_MOD4 = {(1, 3), (2, 1), (2, 0), (3, 0)}
_IV_C1_MOD8 = {(0, 5), (3, 1), (4, 5), (7, 5)}


def _classify_2(curve, al4, al6, d):
    a4, a6 = curve.a4, curve.a6
    r4 = (a4 % 4, a6 % 4)
    if r4 in _II_MOD4:
        return II, 1, False, d
    if r4 in _III_MOD4:
        return III, 2, False, d
    if r4 in ((0, 1), (3, 1)):
        cp = 1 if (a4 % 8, a6 % 8) in _IV_C1_MOD8 else 3
        return IV, cp, False, d
    if r4 == (0, 0):
        m16 = a6 % 16
        if m16 in (8, 12):
            return I0STAR, 1 if a4 % 8 == 4 else 2, False, d
        if al4 == 2:
            return _delegate(curve)
        if m16 == 4:
            return IVSTAR, 1 if a6 % 32 == 20 else 3, False, d
        if al4 == 3:
            return IIISTAR, 2, False, d
        # alpha4 >= 4, a6 = 0 mod 16, not both alpha4 >= 4 and alpha6 >= 6
        if a6 % 64 == 16:
            # y^2 + y = x^3 + (a4/4) x + ... has odd discriminant
            return I0, 1, True, 0
        return IISTAR, 1, False, d
    # (a4, a6) = (1, 2) mod 4
    td = tate_data(curve, 2)
    k = td.k
    r8 = (a4 % 8, a6 % 8)
    if k == 3:
        return I0STAR, 1 if td.t % 4 == 1 else 2, False, d
    if r8 in ((1, 2), (5, 2)):
        return _delegate(curve)
    if r8 == (1, 6):
        return IVSTAR, 1 if k == 4 else 3, False, d
    # (5, 6) mod 8
    if k == 4:
        return IIISTAR, 2, False, d
    if k == 5:
        return IISTAR, 1, False, d
    n = d - 12
    if n == 0:
        return I0, 1, True, 0
    # T^2 + T + (3t - 1)/4 splits mod 2 iff t = 3 mod 8
    return I(n), _ind(n, td.t % 8 == 3), True, n


def _delegate(curve):
    """I_n* at p = 2: answered by the long-model algorithm."""
    r = generic_tate(to_long_model(curve), 2)
    return r.kodaira, r.c_p, False, r.min_disc_valuation


def bad_primes(curve: Curve) -> list[int]:
    return [p for p, _ in factorize(curve.discriminant)]


def local_data(curve: Curve) -> list[LocalReduction]:
    return [classify(curve, p) for p in bad_primes(curve)]


def tamagawa_product(curve: Curve) -> int:
    """Product of c_p over the primes dividing the discriminant."""
    return prod(r.c_p for r in local_data(curve))
