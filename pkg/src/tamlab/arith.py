"""Small exact number-theory helpers: valuations, residue symbols, p-adic
square roots and root counts of polynomials over prime fields."""

from __future__ import annotations

import math

INF = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24, probabilistic beyond
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def valuation(n: int, p: int) -> int | float:
    """Largest e with p**e | n; ``math.inf`` for n == 0."""
    if n == 0:
        return INF
    n = abs(n)
    e = 0
    if p == 2:
        return (n & -n).bit_length() - 1
    while n % p == 0:
        n //= p
        e += 1
    return e


def split_valuation(n: int, p: int) -> tuple[int | float, int]:
    """Return (v_p(n), n / p**v_p(n)); the unit part of 0 is 0."""
    if n == 0:
        return INF, 0
    e = valuation(n, p)
    return e, n // p**e


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for an odd prime p, by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def epsilon(n: int) -> int:
    """Component count of a non-split I_n fibre: 1 for odd n, 2 for even n."""
    if n < 1:
        raise ValueError("n must be positive")
    return ((-1) ** n + 3) // 2


def sqrt_mod_p(a: int, p: int) -> int:
    """A square root of the quadratic residue a modulo the odd prime p
    (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def padic_sqrt(a: int, p: int, k: int) -> int:
    """Square root of the p-adic unit a modulo p**k.

    For odd p the root is Hensel-lifted from a root mod p.  For p == 2 the
    unit must be 1 mod 8 and the result is correct modulo 2**(k-1) (the
    other roots are -r and r + 2**(k-1) up to sign).
    """
    if p == 2:
        if a % 8 != 1:
            raise ValueError("2-adic unit square roots need a = 1 mod 8")
        r = 1
        # r**2 = a mod 2**j  ->  lift to mod 2**(j+1)
        for j in range(3, k):
            if (r * r - a) % (1 << (j + 1)) != 0:
                r += 1 << (j - 1)
        return r % (1 << max(k - 1, 1))
    r = sqrt_mod_p(a, p)
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r


def poly_roots_mod_p(coeffs: list[int], p: int) -> int:
    """Number of distinct roots in F_p of the polynomial whose coefficients
    are listed from the constant term upward."""
    f = _trim([c % p for c in coeffs])
    if not f:
        raise ValueError("zero polynomial")
    if len(f) == 1:
        return 0
    if p <= 64:
        return sum(1 for x in range(p) if _eval_mod(f, x, p) == 0)
    # gcd(f, x^p - x) has one linear factor per distinct root
    xp = _powmod_x(p, f, p)
    g = _polysub(xp, [0, 1], p)
    return len(_polygcd(f, g, p)) - 1


def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _eval_mod(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def _polysub(f: list[int], g: list[int], p: int) -> list[int]:
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return _trim(out)


def _polymulmod(f: list[int], g: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                prod[i + j] = (prod[i + j] + a * b) % p
    return _polyrem(_trim(prod), m, p)


def _polyrem(f: list[int], m: list[int], p: int) -> list[int]:
    f = list(f)
    inv = pow(m[-1], -1, p)
    while len(f) >= len(m):
        q = f[-1] * inv % p
        shift = len(f) - len(m)
        for i, c in enumerate(m):
            f[shift + i] = (f[shift + i] - q * c) % p
        _trim(f)
    return f


def _powmod_x(e: int, m: list[int], p: int) -> list[int]:
    result, base = [1], _polyrem([0, 1], m, p)
    while e:
        if e & 1:
            result = _polymulmod(result, base, m, p)
        base = _polymulmod(base, base, m, p)
        e >>= 1
    return result


def _polygcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _trim(list(f)), _trim(list(g))
    while g:
        f, g = g, _polyrem(f, g, p)
    return f


_TRIAL_LIMIT = 1 << 16
_trial_primes: list[int] = []


def _small_primes() -> list[int]:
    if not _trial_primes:
        sieve = bytearray([1]) * (_TRIAL_LIMIT + 1)
        sieve[0:2] = b"\x00\x00"
        for q in range(2, math.isqrt(_TRIAL_LIMIT) + 1):
            if sieve[q]:
                sieve[q * q :: q] = bytearray(len(range(q * q, _TRIAL_LIMIT + 1, q)))
        _trial_primes.extend(i for i, f in enumerate(sieve) if f)
    return _trial_primes


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of |n| as sorted (prime, exponent) pairs.

    Trial division by the primes below 2^16 settles every |n| < 2^32; larger
    cofactors go to sympy.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out = []
    for q in _small_primes():
        if q * q > n:
            break
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
    if n > 1:
        if n <= _TRIAL_LIMIT**2:
            out.append((n, 1))
        else:
            from sympy import factorint
            out.extend(sorted((int(q), int(e)) for q, e in factorint(n).items()))
    return out
