"""Tate's algorithm on long Weierstrass models over Z, exact integer version.

This follows the classical step order (multiplicative, II, III, IV, I0*,
In*, IV*, III*, II*, rescale) and serves as the reference oracle for the
short-model classifier in :mod:`tamlab.tate`.
"""

from __future__ import annotations

from .arith import is_prime, legendre, poly_roots_mod_p, valuation
from .curves import LongModel
from .kodaira import (
    I0STAR, II, IISTAR, III, IIISTAR, IV, IVSTAR,
    I, Istar, KodairaType, LocalReduction,
)


def _rst(a, r, s, t):
    """Coordinate change x = x' + r, y = y' + s x' + t (u = 1)."""
    a1, a2, a3, a4, a6 = a
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def _has_root_quadratic(a: int, b: int, c: int, p: int) -> bool:
    """Does a*T^2 + b*T + c have a root in F_p (a a unit mod p)?"""
    if p == 2:
        return any((a * x * x + b * x + c) % 2 == 0 for x in (0, 1))
    return legendre(b * b - 4 * a * c, p) >= 0


def _disc(a) -> int:
    return LongModel(*a).discriminant


def generic_tate(model: LongModel, p: int) -> LocalReduction:
    """Kodaira type, Tamagawa number and minimal discriminant valuation of
    ``model`` at ``p``.

    ``short_minimal`` in the result reports whether the input model itself
    was p-minimal; ``rescalings`` counts the (x, y) -> (p^2 x, p^3 y) steps.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    a = model.ainvs
    v0 = valuation(model.discriminant, p)
    rescalings = 0
    half = pow(2, -1, p) if p != 2 else None

    def done(kod: KodairaType, cp: int, vd: int) -> LocalReduction:
        return LocalReduction(p, kod, cp, vd == v0, rescalings, vd)

    while True:
        vd = valuation(_disc(a), p)
        if vd == 0:
            return done(KodairaType("I0"), 1, 0)
        a1, a2, a3, a4, a6 = a
        m = LongModel(*a)
        b2, b4, b6 = m.b2, m.b4, m.b6

        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            c4 = m.c4
            if c4 % p == 0:
                r = (-pow(12, -1, p) * b2) % p
            else:
                r = (-pow(12 * c4, -1, p) * (m.c6 + b2 * c4)) % p
            t = (-half * (a1 * r + a3)) % p
        a = _rst(a, r, 0, t)
        a1, a2, a3, a4, a6 = a
        b2 = a1 * a1 + 4 * a2

        if b2 % p != 0:
            # multiplicative: split iff T^2 + a1 T - a2 has a root
            if _has_root_quadratic(1, a1, -a2, p):
                cp = vd
            else:
                cp = 2 if vd % 2 == 0 else 1
            return done(I(vd), cp, vd)

        if valuation(a6, p) < 2:
            return done(II, 1, vd)
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        if valuation(b8, p) < 3:
            return done(III, 2, vd)
        b6 = a3 * a3 + 4 * a6
        if valuation(b6, p) < 3:
            a3t, a6t = a3 // p, a6 // p**2
            cp = 3 if _has_root_quadratic(1, a3t, -a6t, p) else 1
            return done(IV, cp, vd)

        # arrange p | a1, a2 ; p^2 | a3, a4 ; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        elif p == 3:
            s, t = a1, a3
        else:
            # (p + 1) / 2 unreduced: a3 + 2t = -p*a3 is then divisible by p^2
            s = -a1 * (p + 1) // 2
            t = -a3 * (p + 1) // 2
        a = _rst(a, 0, s, t)
        a1, a2, a3, a4, a6 = a
        b, c, d = a2 // p, a4 // p**2, a6 // p**3
        w = 27 * d * d - b * b * c * c + 4 * b**3 * d - 18 * b * c * d + 4 * c**3
        x = 3 * c - b * b
        if w % p != 0:
            cp = 1 + poly_roots_mod_p([d, c, b, 1], p)
            return done(I0STAR, cp, vd)

        if x % p != 0:
            # double root: move it to T = 0, then run the I_n* subprocedure
            if p == 2:
                r = c % 2
            elif p == 3:
                r = c * pow(b, -1, 3) % 3
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, p) % p
            a = _rst(a, p * r, 0, 0)
            ix = iy = 3
            mx = my = p * p
            while True:
                a1, a2, a3, a4, a6 = a
                a2t, a3t = a2 // p, a3 // my
                a4t, a6t = a4 // (p * mx), a6 // (mx * my)
                if (a3t * a3t + 4 * a6t) % p == 0:
                    t = my * (a6t % 2 if p == 2 else (-a3t * half) % p)
                    a = _rst(a, 0, 0, t)
                    a1, a2, a3, a4, a6 = a
                    my *= p
                    iy += 1
                    a2t, a3t = a2 // p, a3 // my
                    a4t, a6t = a4 // (p * mx), a6 // (mx * my)
                    if (a4t * a4t - 4 * a6t * a2t) % p == 0:
                        if p == 2:
                            r = mx * ((a6t * pow(a2t, -1, 2)) % 2)
                        else:
                            r = mx * ((-a4t * pow(2 * a2t, -1, p)) % p)
                        a = _rst(a, r, 0, 0)
                        mx *= p
                        ix += 1
                    else:
                        cp = 4 if _has_root_quadratic(a2t, a4t, a6t, p) else 2
                        break
                else:
                    cp = 4 if _has_root_quadratic(1, a3t, -a6t, p) else 2
                    break
            return done(Istar(ix + iy - 5), cp, vd)

        # triple root: move it to T = 0
        if p == 2:
            r = b % 2
        elif p == 3:
            r = (-d) % 3
        else:
            r = (-b * pow(3, -1, p)) % p
        a = _rst(a, p * r, 0, 0)
        a1, a2, a3, a4, a6 = a
        a3t, a6t = a3 // p**2, a6 // p**4
        if (a3t * a3t + 4 * a6t) % p != 0:
            cp = 3 if _has_root_quadratic(1, a3t, -a6t, p) else 1
            return done(IVSTAR, cp, vd)
        if p == 2:
            t = -4 * (a6t % 2)
        else:
            t = p * p * ((-a3t * half) % p)
        a = _rst(a, 0, 0, t)
        a1, a2, a3, a4, a6 = a
        if valuation(a4, p) < 4:
            return done(IIISTAR, 2, vd)
        if valuation(a6, p) < 6:
            return done(IISTAR, 1, vd)
        a = (a1 // p, a2 // p**2, a3 // p**3, a4 // p**4, a6 // p**6)
        rescalings += 1
