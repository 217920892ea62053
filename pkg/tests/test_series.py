import mpmath
import pytest

from tamlab.densities import delta
from tamlab.series import l_tam, local_factor, local_mean, p_tam, primes_up_to


def _overlap(a, b) -> bool:
    return a.lower <= b.upper and b.lower <= a.upper


def test_primes_up_to():
    assert primes_up_to(30) == (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)
    assert primes_up_to(1) == ()
    assert len(primes_up_to(10**4)) == 1229


def test_p_tam_values():
    v = p_tam(1, 10**4)
    assert v.lower < 0.505342 < v.upper
    assert abs(p_tam(12, 10**4).value - 0.0015) < 1e-4
    with pytest.raises(ValueError):
        p_tam(0)


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_p_tam_prime_direct_formula(ell):
    # for a prime ell only one prime can contribute c_p = ell
    Q = 2000
    with mpmath.workdps(40):
        base = mpmath.mpf(1)
        ratio = mpmath.mpf(0)
        for p in primes_up_to(Q):
            d1 = mpmath.mpf(delta(p, 1).numerator) / delta(p, 1).denominator
            base *= d1
            r = delta(p, ell)
            ratio += mpmath.mpf(r.numerator) / r.denominator / d1
        direct = base * ratio
    v = p_tam(ell, Q)
    assert v.lower - 1e-30 <= direct * (1 + mpmath.mpf(10) ** -25) and direct <= v.upper + 1e-30


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 12])
def test_p_tam_stable_when_cutoff_doubles(m):
    a, b = p_tam(m, 10**4), p_tam(m, 2 * 10**4)
    assert _overlap(a, b)
    assert b.error_bound < a.error_bound


def test_p_tam_sums_to_at_most_one():
    total = sum(p_tam(m, 10**4).value for m in range(1, 61))
    assert 0.9999 < total < 1 + 1e-6


def test_l_tam_at_zero_is_one():
    v = l_tam(0, 10**4)
    assert v.lower <= 1 <= v.upper
    assert v.error_bound < 2e-4


def test_l_tam_at_one_matches_series():
    v = l_tam(1, 10**4)
    partial = sum(p_tam(m, 10**4).value / m for m in range(1, 200))
    assert abs(v.value - partial) < v.error_bound + 1e-4


def test_l_tam_stable_when_cutoff_doubles():
    a, b = l_tam(-1, 10**4), l_tam(-1, 2 * 10**4)
    assert _overlap(a, b)


def test_l_tam_rejects_s_below_minus_one():
    with pytest.raises(ValueError):
        l_tam(-2)


def test_local_factor_at_minus_one_is_local_mean():
    for p in (2, 3, 5, 7):
        f, err = local_factor(p, -1)
        assert err == 0
        assert abs(f - local_mean(p)) < 1e-30


def test_local_factor_at_three():
    f, _ = local_factor(3, -1)
    assert 1.1109 <= f < 1.1110
    f0, err0 = local_factor(3, 0)
    assert abs(f0 - 1) < err0 + 1e-30
