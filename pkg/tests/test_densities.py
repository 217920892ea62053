import math
from fractions import Fraction as Q

import pytest
import sympy

from tamlab.curves import enumerate_curves
from tamlab.densities import (
    delta, delta_closed_form, delta_hat, delta_prime, delta_table, delta_tail,
    delta_weighted_tail, local_mean, minimal_mass, rho_coefficient, rho_minimal, to_csv,
    total_mass, type_rows,
)
from tamlab.series import primes_up_to
from tamlab.tate import classify

P = sympy.Symbol("p", positive=True)
_S = P**8 + P**6 + P**4 + P**2 + 1
CLOSED = {
    1: 1 - P * (6 * P**7 + 9 * P**6 + 9 * P**5 + 7 * P**4 + 8 * P**3 + 7 * P**2 + 9 * P + 6) / (6 * (P + 1) ** 2 * _S),
    2: P * (2 * P**7 + 2 * P**6 + P**5 + P**4 + 2 * P**3 + P**2 + 2 * P + 2) / (2 * (P + 1) ** 2 * _S),
    3: P**2 * (P**4 + 1) / (2 * (P + 1) * _S),
    4: P**3 * (3 * P**2 - 2 * P + 1) / (6 * (P + 1) * _S),
}
# coefficient K of p^-c for c >= 5
TAIL_K = (P**10 - 2 * P**9 + P**8) / (2 * (P**10 - 1))


def _nonnegative_for_p_at_least_5(expr) -> bool:
    """expr is a rational function of p; prove expr >= 0 for all real p >= 5
    by showing numerator and denominator have nonnegative coefficients in q = p - 5."""
    q = sympy.Symbol("q", nonnegative=True)
    num, den = sympy.fraction(sympy.together(expr))
    nq = sympy.Poly(sympy.expand(num.subs(P, q + 5)), q)
    dq = sympy.Poly(sympy.expand(den.subs(P, q + 5)), q)
    if all(c <= 0 for c in dq.all_coeffs()):
        nq, dq = -nq, -dq
    return all(c >= 0 for c in nq.all_coeffs()) and all(c >= 0 for c in dq.all_coeffs())


# ------------------------------------------------------------- tables


def test_delta_prime_examples():
    assert delta_prime(7, "I0", 1) == Q(6, 7)
    assert delta_prime(3, "IV*", 1) == Q(7, 3**9)
    assert delta_prime(2, "II", 1) == Q(1, 2)
    assert delta_prime(3, "In:2", 2) == 0
    with pytest.raises(ValueError):
        delta_prime(7, "III", 1)


def test_delta_hat_examples():
    assert delta_hat(2, "I0", 1) == Q(1, 512)
    assert delta_hat(3, "In:2", 2) == Q(4, 3**13)
    with pytest.raises(ValueError):
        delta_hat(5, "I0", 1)


def test_delta_examples():
    assert delta(2, 1) == Q(241, 396)
    assert delta(3, 2) == Q(510641, 6377184)
    assert delta(2, 7) == Q(1, 2**8 * 1023)
    p = 5
    assert delta(5, 3) == Q(p**2 * (p**4 + 1), 2 * (p + 1) * (p**8 + p**6 + p**4 + p**2 + 1))
    assert delta_table(5, 3) == delta(5, 3)


def test_exact_values_at_two_and_three():
    want = {
        (2, 1): Q(241, 396), (2, 2): Q(7495, 24552), (2, 3): Q(1153, 16368), (2, 4): Q(171, 10912),
        (3, 1): Q(1924625, 2125728), (3, 2): Q(510641, 6377184),
        (3, 3): Q(7594, 597861), (3, 4): Q(1193, 652212),
    }
    for (p, c), v in want.items():
        assert delta(p, c) == v


@pytest.mark.parametrize("p", [2, 3])
def test_geometric_tail_at_two_and_three(p):
    const = 1023 if p == 2 else 29524
    for c in range(5, 15):
        assert delta_table(p, c) == Q(1, p ** (c + 1) * const) == delta_closed_form(p, c)


def test_closed_form_matches_tables():
    for p in primes_up_to(97):
        if p >= 5:
            for c in range(1, 9):
                assert delta_closed_form(p, c) == delta_table(p, c), (p, c)


def test_symbolic_closed_form_matches_implementation():
    for p in (5, 7, 11, 101):
        for c in range(1, 5):
            assert sympy.Rational(delta_closed_form(p, c).numerator, delta_closed_form(p, c).denominator) \
                == CLOSED[c].subs(P, p)
        assert delta_closed_form(p, 6) == Q(*sympy.fraction(TAIL_K.subs(P, p) / p**6))


def test_normalization():
    for p in primes_up_to(100):
        assert total_mass(p) == 1


def test_normalization_is_symbolic_identity():
    tail = TAIL_K * P**-5 * P / (P - 1)
    assert sympy.simplify(sum(CLOSED.values()) + tail - 1) == 0


def test_printed_c4_numerator_breaks_normalization():
    # with 3p^2 - 2p - 1 in place of 3p^2 - 2p + 1 the masses no longer sum to 1
    alt = P**3 * (3 * P**2 - 2 * P - 1) / (6 * (P + 1) * _S)
    tail = TAIL_K * P**-4 / (P - 1)
    total = CLOSED[1] + CLOSED[2] + CLOSED[3] + alt + tail
    for p in (5, 7, 11):
        assert total.subs(P, p) != 1
    assert sympy.simplify(total - 1) != 0


def test_tail_facts_hold_for_every_prime_at_least_5():
    # delta_p(1) >= 1 - 1/p^2 and delta_p(c) <= p^-c for c >= 2
    assert _nonnegative_for_p_at_least_5(CLOSED[1] - (1 - 1 / P**2))
    for c in (2, 3, 4):
        assert _nonnegative_for_p_at_least_5(P**-c - CLOSED[c])
    assert _nonnegative_for_p_at_least_5(1 - TAIL_K)


def test_delta_one_bounds_numerically():
    for p in primes_up_to(10**4):
        if p >= 5:
            d1 = delta(p, 1)
            assert 1 - Q(1, p * p) < d1 < 1


def test_tails():
    for p in (2, 3, 5, 7):
        assert delta_tail(p, 5) == sum((delta(p, c) for c in range(5, 200)), Q(0)) + delta_tail(p, 200)
        direct = sum((c * delta(p, c) for c in range(5, 200)), Q(0)) + delta_weighted_tail(p, 200)
        assert delta_weighted_tail(p, 5) == direct
    with pytest.raises(ValueError):
        delta_tail(5, 4)


def test_local_means():
    assert 1.49332 < float(local_mean(2)) < 1.49333
    assert 1.1109 <= float(local_mean(3)) < 1.1110


def test_minimal_masses_and_rho():
    assert minimal_mass(2) == Q(255, 256)
    assert minimal_mass(3) == Q(19682, 19683)
    for p in (5, 7, 11):
        assert minimal_mass(p) == 1 - Q(1, p**10)
    assert rho_coefficient() == Q(21342914775, 228811)
    consts = rho_minimal()
    assert consts.kappa1 == Q(3, 20) and consts.kappa2_sqrt6 == Q(3, 40)
    num = consts.numeric(40)
    assert 0.9960 <= num["rho"] < 0.9961
    assert abs(num["kappa2"] - 3 * math.sqrt(6) / 40) < 1e-15


def test_rho_against_direct_product():
    import mpmath
    with mpmath.workdps(40):
        prod = mpmath.mpf(255) / 256 * mpmath.mpf(19682) / 19683
        for p in primes_up_to(10**4):
            if p >= 5:
                prod *= 1 - mpmath.mpf(p) ** -10
        # omitted primes change the product by less than sum_{n > 10^4} n^-10
        assert abs(prod - rho_minimal().numeric(40)["rho"]) < 1e-12


def test_type_rows_csv():
    rows = type_rows(5)
    text = to_csv(rows, ("p", "kodaira", "c", "delta_prime", "delta_hat"))
    assert text.splitlines()[0] == "p,kodaira,c,delta_prime,delta_hat"
    assert "5,I0,1,4/5,0" in text


@pytest.mark.parametrize("p", [5, 7])
def test_empirical_type_frequencies(p):
    """Frequencies of (type, c) among p-minimal curves of height <= 10^6
    lie within 5 binomial standard deviations of delta'."""
    counts, N = {}, 0
    for curve in enumerate_curves(10**6):
        N += 1
        if curve.discriminant % p:
            key = ("I0", 1)
        else:
            r = classify(curve, p)
            if r.rescalings:
                continue
            key = (str(r.kodaira), r.c_p)
        counts[key] = counts.get(key, 0) + 1
    tested = 0
    for _, kod, c, dp, _ in type_rows(p, n_max=6):
        if dp < Q(1, p**7):
            continue
        expect = float(dp) * N
        sigma = math.sqrt(float(dp) * (1 - float(dp)) * N)
        got = counts.get((kod, c), 0)
        assert abs(got - expect) <= 5 * sigma, (kod, c, got, expect)
        tested += 1
    assert tested >= 10
