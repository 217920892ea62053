"""Heights of rational points on short Weierstrass curves.

The archimedean local height is the series

    F_E(x) = 1/2 log|x| + 1/8 sum_{n >= 0} log(z_n) / 4^n,
    z_n = 1 - 2 a4 / x_n^2 - 8 a6 / x_n^3 + a4^2 / x_n^4,

with x_0 = x and x_{n+1} = x(2 P_n).  Since x^4 z_0 = H(x) with
H(x) = x^4 - 2 a4 x^2 - 8 a6 x + a4^2, the n = 0 term and the 1/2 log|x|
combine into 1/8 log H(x), which is what is evaluated here (it is finite at
x = 0).  For a convenient curve every z_n exceeds 1 because
z_n = 1 - G(x_n) / x_n^4 with G(x) = 2 a4 x^2 + 8 a6 x - a4^2 < 0 on the
real locus D = {x : x^3 + a4 x + a6 >= 0}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
import numpy as np
import sympy

from .curves import Curve
from .tate import local_data

TOLERANCE = 1e-9
DEFAULT_TERMS = 40

ONE_COMPONENT = "one-component"
TWO_COMPONENT = "two-component"
NOT_CONVENIENT = "not-convenient"


class DomainError(ValueError):
    """x lies outside the region where the F_E series is certified."""


class HeightPreconditionError(ValueError):
    """The local-sum height formula does not apply to this curve."""


# ---------------------------------------------------------------- points


@dataclass(frozen=True, order=True)
class RationalPoint:
    """Affine point (A / C^2, B / C^3) in lowest terms."""

    A: int
    B: int
    C: int = 1

    def __post_init__(self):
        if self.C < 1:
            raise ValueError("C must be positive")
        if math.gcd(self.A, self.C) != 1 or math.gcd(self.B, self.C) != 1:
            raise ValueError("coordinates not in lowest terms")

    @property
    def x(self) -> Fraction:
        return Fraction(self.A, self.C**2)

    @property
    def y(self) -> Fraction:
        return Fraction(self.B, self.C**3)

    @property
    def naive_height(self) -> int:
        return max(abs(self.A), self.C**2)

    @property
    def weil_height(self) -> float:
        return math.log(self.naive_height)

    def on_curve(self, curve: Curve) -> bool:
        A, C = self.A, self.C
        return self.B**2 == A**3 + curve.a4 * A * C**4 + curve.a6 * C**6

    @classmethod
    def from_affine(cls, x: Fraction, y: Fraction) -> "RationalPoint":
        x, y = Fraction(x), Fraction(y)
        C = math.isqrt(x.denominator)
        if C * C != x.denominator or y.denominator != C**3:
            raise ValueError("not the affine coordinates of a point on a short model")
        return cls(x.numerator, y.numerator, C)

    def to_json(self) -> dict:
        return {"A": str(self.A), "B": str(self.B), "C": str(self.C)}


def find_points(curve: Curve, naive_bound: int) -> list[RationalPoint]:
    """Every affine point with max(|A|, C^2) <= naive_bound, sorted by (C, A, B)."""
    if naive_bound < 1:
        raise ValueError("naive_bound must be positive")
    a4, a6 = curve.a4, curve.a6
    out = []
    A = np.arange(-naive_bound, naive_bound + 1, dtype=np.int64)
    for C in range(1, math.isqrt(naive_bound) + 1):
        size = naive_bound**3 + abs(a4) * naive_bound * C**4 + abs(a6) * C**6
        keep = A[np.gcd(A, C) == 1]
        if size < 2**61:
            v = keep**3 + a4 * C**4 * keep + a6 * C**6
            ok = v >= 0
            keep, v = keep[ok], v[ok]
            r = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
            for shift in (-1, 0, 1):
                s = r + shift
                hit = (s >= 0) & (s * s == v)
                for a, b in zip(keep[hit].tolist(), s[hit].tolist()):
                    out.extend(_signed(a, b, C))
        else:
            for a in keep.tolist():
                v = a**3 + a4 * a * C**4 + a6 * C**6
                if v >= 0:
                    b = math.isqrt(v)
                    if b * b == v:
                        out.extend(_signed(a, b, C))
    return sorted(set(out), key=lambda P: (P.C, P.A, P.B))


def _signed(a: int, b: int, C: int):
    if b == 0:
        return [RationalPoint(a, 0, C)]
    return [RationalPoint(a, -b, C), RationalPoint(a, b, C)]


# --------------------------------------------------- convenience predicate


def archimedean_case(a4: int, a6: int) -> str:
    """Is G < 0 on D?  Decided by integer inequalities equivalent to
    T = a6 / |a4|^(3/2) lying in (-inf, -2/sqrt 27) or (-1/sqrt 8, 1/sqrt 8)."""
    if a4 > 0:
        return NOT_CONVENIENT
    if a4 == 0:
        # G = 8 a6 x and D = [(-a6)^(1/3), inf)
        return ONE_COMPONENT if a6 < 0 else NOT_CONVENIENT
    m = -a4
    if a6 < 0 and 27 * a6 * a6 > 4 * m**3:
        return ONE_COMPONENT
    if 8 * a6 * a6 < m**3:
        return TWO_COMPONENT
    return NOT_CONVENIENT


def on_boundary(a4: int, a6: int) -> bool:
    """8 a6^2 = |a4|^3: G has a double root, which is also a root of the cubic."""
    return a4 < 0 and 8 * a6 * a6 == (-a4) ** 3


@dataclass(frozen=True)
class TToken:
    """T = a6 / |a4|^(3/2) kept exactly as (sign of a6, T^2)."""

    sign: int
    square: Fraction | None  # None when a4 = 0 (T infinite)

    def as_float(self) -> float:
        if self.square is None:
            return math.copysign(math.inf, self.sign)
        return self.sign * math.sqrt(self.square)


@lru_cache(maxsize=4096)
def cubic_root_intervals(a4: int, a6: int, width: Fraction = Fraction(1, 10**12)):
    """Certified isolating intervals of the real roots of x^3 + a4 x + a6,
    largest root first (alpha, then beta, gamma when present)."""
    x = sympy.Symbol("x")
    ivs = sympy.Poly(x**3 + a4 * x + a6, x).intervals(eps=sympy.Rational(width))
    out = [(Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))) for (lo, hi), _ in ivs]
    return tuple(sorted(out, reverse=True))


@lru_cache(maxsize=4096)
def _global_status(a4: int, a6: int) -> tuple[tuple[int, ...], int]:
    """(primes where the model is not minimal, Tamagawa product)."""
    rows = local_data(Curve(a4, a6))
    bad = tuple(r.p for r in rows if not r.short_minimal)
    return bad, math.prod(r.c_p for r in rows)


@dataclass(frozen=True)
class ConvenientTest:
    component_count: int
    a4_nonpositive: bool
    T: TToken
    roots: tuple[tuple[Fraction, Fraction], ...]
    case: str
    globally_minimal: bool
    tamagawa_trivial: bool
    boundary: bool
    archimedean: str = field(default=NOT_CONVENIENT)

    @property
    def convenient(self) -> bool:
        return self.case != NOT_CONVENIENT

    def __bool__(self) -> bool:
        return self.convenient

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "components": self.component_count,
            "a4_nonpositive": self.a4_nonpositive,
            "globally_minimal": self.globally_minimal,
            "tamagawa_trivial": self.tamagawa_trivial,
            "boundary": self.boundary,
            "T_sign": self.T.sign,
            "T_squared": None if self.T.square is None else str(self.T.square),
            "roots": [[str(lo), str(hi)] for lo, hi in self.roots],
        }


def is_convenient(curve: Curve) -> ConvenientTest:
    a4, a6 = curve.a4, curve.a6
    arch = archimedean_case(a4, a6)
    nonmin, tam = _global_status(a4, a6)
    minimal, trivial = not nonmin, tam == 1
    ok = minimal and trivial and arch != NOT_CONVENIENT
    square = None if a4 == 0 else Fraction(a6 * a6, (-a4) ** 3 if a4 < 0 else a4**3)
    return ConvenientTest(
        component_count=2 if curve.discriminant > 0 else 1,
        a4_nonpositive=a4 <= 0,
        T=TToken((a6 > 0) - (a6 < 0), square),
        roots=cubic_root_intervals(a4, a6),
        case=arch if ok else NOT_CONVENIENT,
        globally_minimal=minimal,
        tamagawa_trivial=trivial,
        boundary=on_boundary(a4, a6),
        archimedean=arch,
    )


def g_sign_on_domain(a4: int, a6: int) -> str:
    """Supremum sign of G over D by joint root isolation of the cubic and G.

    Returns "negative" (G < 0 on D), "boundary" (max of G on D is 0) or
    "positive".  Independent of :func:`archimedean_case`.
    """
    x = sympy.Symbol("x")
    f = sympy.Poly(x**3 + a4 * x + a6, x)
    G = sympy.Poly(2 * a4 * x**2 + 8 * a6 * x - a4 * a4, x)
    fv = lambda t: a4 * t + a6 + t**3
    gv = lambda t: 2 * a4 * t * t + 8 * a6 * t - a4 * a4
    polys = [f] if G.is_zero or G.degree() < 1 else [f, G]
    ivs = sympy.intervals(polys, eps=sympy.Rational(1, 10**6))
    ivs = sorted(((Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))), set(owner))
                 for (lo, hi), owner in ivs)
    touch = False
    # between isolating intervals neither polynomial changes sign
    ends = [iv for iv, _ in ivs]
    samples = [ends[0][0] - 1, ends[-1][1] + 1]
    samples += [(ends[k][1] + ends[k + 1][0]) / 2 for k in range(len(ends) - 1)]
    for t in samples:
        if fv(t) >= 0 and gv(t) > 0:
            return "positive"
    for (lo, hi), owner in ivs:
        t = lo if lo == hi else (lo + hi) / 2
        if owner == {0}:
            # root of f, G has constant nonzero sign on this interval
            if gv(t) > 0:
                return "positive"
        elif owner == {1}:
            if fv(lo) > 0 and fv(hi) > 0:
                touch = True
        else:
            touch = True
    return "boundary" if touch else "negative"


def shared_root_polynomial(T):
    """F(r_+(T)) F(r_-(T)) = 64 T^4 - 17 T^2 + 9/8, returned with its factored
    evaluation 1/8 (8T^2 - 1)(8T + 3)(8T - 3)."""
    if isinstance(T, (int, Fraction)):
        T = Fraction(T)
        if 8 * T * T < 1:
            raise ValueError("r_+(T), r_-(T) are not real for 8 T^2 < 1")
        value = 64 * T**4 - 17 * T**2 + Fraction(9, 8)
        factored = (8 * T * T - 1) * (8 * T + 3) * (8 * T - 3) / 8
    else:
        T = mpmath.mpf(T)
        if 8 * T * T < 1 - mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
            raise ValueError("r_+(T), r_-(T) are not real for 8 T^2 < 1")
        value = 64 * T**4 - 17 * T**2 + mpmath.mpf(9) / 8
        factored = (8 * T * T - 1) * (8 * T + 3) * (8 * T - 3) / 8
    return value, factored


# ------------------------------------------------------------------- F_E


@dataclass(frozen=True)
class FEValue:
    value: mpmath.mpf  # partial sum through n = terms - 1
    tail_bound: mpmath.mpf  # the omitted part lies in [0, tail_bound]
    terms: int
    min_z: mpmath.mpf  # smallest z_n seen, n >= 1

    def to_json(self) -> dict:
        return {"value": mpmath.nstr(self.value, 20), "tail_bound": mpmath.nstr(self.tail_bound, 5),
                "terms": self.terms}


def _H(a4, a6, x):
    return x**4 - 2 * a4 * x**2 - 8 * a6 * x + a4 * a4


def _f(a4, a6, x):
    return x**3 + a4 * x + a6


def _check_domain(curve: Curve, x: Fraction) -> None:
    if archimedean_case(curve.a4, curve.a6) == NOT_CONVENIENT:
        raise DomainError(f"G is not negative on the real locus of {curve}")
    if _f(curve.a4, curve.a6, x) < 0:
        raise DomainError(f"x = {x} is not the x-coordinate of a real point")


def fe_iterates(curve: Curve, x, terms: int = DEFAULT_TERMS):
    """Yield (n, x_n, z_n) for n = 1 .. terms - 1, stopping at 2-torsion.
    Computed at the caller's mpmath precision."""
    a4, a6 = curve.a4, curve.a6
    x = Fraction(x)
    fx = _f(a4, a6, x)
    if fx == 0:
        return
    xn = _mpq(_H(a4, a6, x) / (4 * fx))
    for n in range(1, terms):
        z = _H(a4, a6, xn) / xn**4
        yield n, xn, z
        fx = _f(a4, a6, xn)
        if fx == 0:
            return
        xn = _H(a4, a6, xn) / (4 * fx)


def _mpq(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def f_e(curve: Curve, x, terms: int = DEFAULT_TERMS) -> FEValue:
    """F_E(x) for x in D on a curve with G < 0 on D, with a certified tail."""
    if terms < 1:
        raise ValueError("terms must be positive")
    x = Fraction(x)
    _check_domain(curve, x)
    a4, a6 = curve.a4, curve.a6
    with mpmath.workdps(40 + terms):
        value = mpmath.log(_mpq(_H(a4, a6, x))) / 8
        min_z = mpmath.inf
        for n, _, z in fe_iterates(curve, x, terms):
            value += mpmath.log(z) / (8 * mpmath.mpf(4) ** n)
            min_z = min(min_z, z)
        # x_n >= alpha for n >= 1, so log z_n <= log(1 + 2|a4|/a^2 + 8|a6|/a^3 + a4^2/a^4)
        alpha = _mpq(cubic_root_intervals(a4, a6)[0][0])
        if alpha <= 0:
            raise DomainError("largest real root is not positive; tail not certified")
        zmax = 1 + 2 * abs(a4) / alpha**2 + 8 * abs(a6) / alpha**3 + a4 * a4 / alpha**4
        tail = mpmath.log(zmax) / (6 * mpmath.mpf(4) ** terms)
        tail += mpmath.mpf(10) ** (-30)
        return FEValue(+value, +tail, terms, min_z)


# ---------------------------------------------------------------- heights


@dataclass(frozen=True)
class HeightReport:
    naive_H: int
    weil: float
    canonical: float
    f_e_value: float
    inequality_holds: bool
    method: str
    error_bound: float = 0.0

    def to_json(self) -> dict:
        return {
            "naive_H": str(self.naive_H),
            "weil": self.weil,
            "canonical": self.canonical,
            "f_e_value": self.f_e_value,
            "inequality_holds": self.inequality_holds,
            "method": self.method,
            "error_bound": self.error_bound,
        }


def height_preconditions(curve: Curve) -> list[str]:
    """Reasons the local-sum formula does not apply (empty when it does)."""
    nonmin, tam = _global_status(curve.a4, curve.a6)
    problems = []
    if nonmin:
        problems.append(f"not minimal at p in {list(nonmin)}")
    if tam != 1:
        problems.append(f"Tamagawa product is {tam}, not 1")
    if archimedean_case(curve.a4, curve.a6) == NOT_CONVENIENT:
        problems.append("G is not negative on the real locus")
    return problems


def canonical_height(curve: Curve, P: RationalPoint, terms: int = DEFAULT_TERMS) -> HeightReport:
    """h(P) = log C + F_E(x(P)) for Tamagawa-trivial minimal models."""
    if not P.on_curve(curve):
        raise ValueError(f"{P} is not on {curve}")
    problems = height_preconditions(curve)
    if problems:
        raise HeightPreconditionError("; ".join(problems))
    fe = f_e(curve, P.x, terms)
    with mpmath.workdps(40 + terms):
        h = mpmath.log(P.C) + fe.value
    weil = P.weil_height
    return HeightReport(
        naive_H=P.naive_height,
        weil=weil,
        canonical=float(h),
        f_e_value=float(fe.value),
        inequality_holds=float(h) >= weil / 2 - TOLERANCE,
        method="local-sum",
        error_bound=float(fe.tail_bound),
    )


def oracle_report(curve: Curve, P: RationalPoint, doublings: int = 8) -> HeightReport:
    """HeightReport from the doubling limit; usable on any curve, no error bound."""
    if not P.on_curve(curve):
        raise ValueError(f"{P} is not on {curve}")
    h = float(canonical_height_oracle(curve, P, doublings))
    weil = P.weil_height
    return HeightReport(P.naive_height, weil, h, math.nan, h >= weil / 2 - TOLERANCE,
                        "doubling-oracle", math.nan)


def double_point(curve: Curve, P: RationalPoint) -> RationalPoint | None:
    """2P, or None for the identity."""
    x, y = P.x, P.y
    if y == 0:
        return None
    lam = (3 * x * x + curve.a4) / (2 * y)
    x2 = lam * lam - 2 * x
    return RationalPoint.from_affine(x2, lam * (x - x2) - y)


def _log_int(n) -> mpmath.mpf:
    return mpmath.log(mpmath.mpf(n))


def canonical_height_oracle(curve: Curve, P: RationalPoint, doublings: int = 5) -> mpmath.mpf:
    """1/2 h_W(2^k P) / 4^k by exact doubling of x = N / D; 0 for torsion.

    Torsion is detected when some 2^j P (j <= max(k, 8)) is the identity or
    repeats an earlier x-coordinate.
    """
    if doublings < 1:
        raise ValueError("doublings must be positive")
    a4, a6 = gmpy2.mpz(curve.a4), gmpy2.mpz(curve.a6)
    N, D = gmpy2.mpz(P.A), gmpy2.mpz(P.C) ** 2
    seen = {(N, D)}
    kept = None
    for j in range(1, max(doublings, 8) + 1):
        fn = N**3 + a4 * N * D * D + a6 * D**3
        if fn == 0:
            return mpmath.mpf(0)
        num = N**4 - 2 * a4 * N * N * D * D - 8 * a6 * N * D**3 + a4 * a4 * D**4
        den = 4 * D * fn
        g = gmpy2.gcd(num, den)
        N, D = num // g, den // g
        if (N, D) in seen:
            return mpmath.mpf(0)
        seen.add((N, D))
        if j == doublings:
            kept = max(abs(N), D)
    with mpmath.workdps(30):
        return _log_int(kept) / (2 * mpmath.mpf(4) ** doublings)


# ------------------------------------------------------ F_E positivity


@dataclass
class FEPositivity:
    certified: bool
    cells: int
    negative: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.certified

    def to_json(self) -> dict:
        return {
            "certified": self.certified,
            "cells": self.cells,
            "negative": [[str(a), str(b)] for a, b in self.negative],
            "inconclusive": [[str(a), str(b)] for a, b in self.inconclusive],
        }


def _fe_lower_bound(a4: int, a6: int, lo: Fraction, hi: Fraction, alpha_lo: Fraction, terms: int):
    """Lower bound of F_E over D intersected with [lo, hi], by interval arithmetic.
    Terms with n >= 1 are nonnegative on D and only ever added when provably positive."""
    iv = mpmath.iv
    saved, iv.dps = iv.dps, 30
    try:
        X = iv.mpf([_mpq(lo), _mpq(hi)])
        H = _H(a4, a6, X)
        if H.a <= 0:
            return -mpmath.inf
        total = mpmath.log(mpmath.mpf(H.a)) / 8
        # rounding slack of the interval log
        total -= mpmath.mpf(10) ** -25
        for n in range(1, terms):
            F = _f(a4, a6, X)
            if F.a <= 0:
                break
            X = H / (4 * F)
            if X.b == mpmath.inf:
                break
            X = iv.mpf([max(mpmath.mpf(X.a), _mpq(alpha_lo)), X.b])
            H = _H(a4, a6, X)
            z = H / X**4
            if z.a > 1:
                total += mpmath.log(mpmath.mpf(z.a)) / (8 * mpmath.mpf(4) ** n) - mpmath.mpf(10) ** -25
        return total
    finally:
        iv.dps = saved


def check_fe_positivity(curve: Curve, cells: int = 32, max_depth: int = 8, terms: int = 12) -> FEPositivity:
    """Certify F_E > 0 on (-1, 1) intersected with D for a two-component curve."""
    a4, a6 = curve.a4, curve.a6
    if archimedean_case(a4, a6) != TWO_COMPONENT:
        raise HeightPreconditionError("F_E positivity check needs a two-component curve with G < 0 on D")
    (al, ah), (bl, bh), (gl, gh) = cubic_root_intervals(a4, a6)
    pieces = []
    if gl < 1 and bh > -1:
        pieces.append((max(gl, Fraction(-1)), min(bh, Fraction(1))))
    if al < 1:
        pieces.append((al, Fraction(1)))
    result = FEPositivity(True, 0)
    for lo, hi in pieces:
        step = (hi - lo) / cells
        stack = [(lo + k * step, lo + (k + 1) * step, 0) for k in range(cells)]
        while stack:
            u, v, depth = stack.pop()
            result.cells += 1
            if _fe_lower_bound(a4, a6, u, v, al, terms) > 0:
                continue
            mid = (u + v) / 2
            if _f(a4, a6, mid) >= 0:
                fe = f_e(curve, mid, DEFAULT_TERMS)
                if fe.value + fe.tail_bound < 0:
                    result.negative.append((u, v))
                    result.certified = False
                    continue
            if depth < max_depth:
                stack.append((mid, v, depth + 1))
                stack.append((u, mid, depth + 1))
            else:
                result.inconclusive.append((u, v))
                result.certified = False
    return result
