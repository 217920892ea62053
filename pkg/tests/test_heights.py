import json
import math
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from tamlab.curves import Curve, enumerate_curves
from tamlab.heights import (
    NOT_CONVENIENT, ONE_COMPONENT, TWO_COMPONENT, DomainError, HeightPreconditionError, RationalPoint,
    archimedean_case, canonical_height, canonical_height_oracle, check_fe_positivity,
    cubic_root_intervals, double_point, f_e, fe_iterates, find_points, g_sign_on_domain,
    height_preconditions, is_convenient, on_boundary, oracle_report, shared_root_polynomial,
)
from tamlab.verify import convenient_points

CURVE = Curve(-3, -4)  # convenient, one real component
POINT = RationalPoint(8, 22)


@pytest.fixture(scope="module")
def convenient_curves():
    return [c for c in enumerate_curves(10**5) if is_convenient(c)]


# ---------------------------------------------------------------- points


def test_find_points_example():
    pts = find_points(Curve(0, 1), 4)
    assert [(P.A, P.B) for P in pts] == [(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)]


def test_find_points_on_curve_and_deterministic():
    pts = find_points(CURVE, 200)
    assert POINT in pts and all(P.on_curve(CURVE) for P in pts)
    assert pts == find_points(CURVE, 200) and len(set(pts)) == len(pts)
    with pytest.raises(ValueError):
        find_points(CURVE, 0)


@settings(max_examples=40)
@given(a4=st.integers(-50, 50), a6=st.integers(-50, 50), bound=st.integers(1, 60))
def test_find_points_complete(a4, a6, bound):
    if 4 * a4**3 + 27 * a6**2 == 0:
        return
    curve = Curve(a4, a6)
    found = {(P.A, P.B, P.C) for P in find_points(curve, bound)}
    want = set()
    for C in range(1, math.isqrt(bound) + 1):
        for A in range(-bound, bound + 1):
            if math.gcd(A, C) != 1:
                continue
            v = A**3 + a4 * A * C**4 + a6 * C**6
            if v >= 0 and math.isqrt(v) ** 2 == v:
                b = math.isqrt(v)
                want |= {(A, b, C), (A, -b, C)}
    assert found == want


def test_rational_point_validation():
    with pytest.raises(ValueError):
        RationalPoint(2, 1, 2)
    with pytest.raises(ValueError):
        RationalPoint(1, 1, 0)
    P = RationalPoint.from_affine(F(1, 4), F(3, 8))
    assert (P.A, P.B, P.C) == (1, 3, 2)
    assert json.loads(json.dumps(P.to_json())) == {"A": "1", "B": "3", "C": "2"}


def test_double_point():
    Q2 = double_point(CURVE, POINT)
    assert Q2.on_curve(CURVE)
    assert double_point(Curve(0, 1), RationalPoint(-1, 0)) is None


# --------------------------------------------------- convenience predicate


def test_shared_root_polynomial():
    assert shared_root_polynomial(F(3, 8)) == (0, 0)
    v, f = shared_root_polynomial(1)
    assert v == f == F(385, 8)
    v, f = shared_root_polynomial(1 / mpmath.sqrt(8))
    assert abs(v) < 1e-15 and abs(f) < 1e-15
    with pytest.raises(ValueError):
        shared_root_polynomial(F(1, 10))


@settings(max_examples=100)
@given(st.fractions(min_value=F(1, 2), max_value=F(20)))
def test_shared_root_factorization(T):
    v, f = shared_root_polynomial(T)
    assert v == f


def test_boundary_pairs_are_flagged_not_convenient():
    for a6 in (1, -1):
        t = is_convenient(Curve(-2, a6))
        assert not t.convenient and t.boundary
        assert archimedean_case(-2, a6) == NOT_CONVENIENT
        assert g_sign_on_domain(-2, a6) == "boundary"


def test_positive_a4_not_convenient():
    assert archimedean_case(1, 0) == NOT_CONVENIENT
    t = is_convenient(Curve(1, 1))
    assert not t.convenient and not t.a4_nonpositive


def test_convenient_test_fields():
    t = is_convenient(CURVE)
    assert t.case == ONE_COMPONENT and t.component_count == 1
    assert t.globally_minimal and t.tamagawa_trivial and not t.boundary
    assert t.T.sign == -1 and t.T.square == F(16, 27)
    assert json.loads(json.dumps(t.to_json()))["case"] == ONE_COMPONENT
    assert not is_convenient(Curve(0, 1))


def test_archimedean_case_against_root_isolation():
    for c in enumerate_curves(10**4):
        g = g_sign_on_domain(c.a4, c.a6)
        case = archimedean_case(c.a4, c.a6)
        assert (g == "negative") == (case != NOT_CONVENIENT), c
        assert (g == "boundary") == on_boundary(c.a4, c.a6), c
        if case != NOT_CONVENIENT:
            comps = 2 if c.discriminant > 0 else 1
            assert case == (TWO_COMPONENT if comps == 2 else ONE_COMPONENT)


def test_root_intervals_isolate_roots():
    ivs = cubic_root_intervals(-7, 6)  # roots 2, 1, -3
    assert len(ivs) == 3
    for (lo, hi), r in zip(ivs, (2, 1, -3)):
        assert lo <= r <= hi and hi - lo <= F(1, 10**12)


# ------------------------------------------------------------------- F_E


def test_z_above_one_on_random_convenient_curves(convenient_curves):
    # z_n - 1 can be far below double precision when x_n is large
    rng = random.Random(7)
    with mpmath.workdps(100):
        for curve in rng.sample(convenient_curves, 20):
            alpha = cubic_root_intervals(curve.a4, curve.a6)[0][1]
            for x in (alpha + 1, alpha + F(1, 3), 10 * abs(alpha) + 5):
                for _, _, z in fe_iterates(curve, x, 15):
                    assert z > 1


def test_f_e_asymptotic():
    curve = Curve(0, -1)
    gaps = [abs(f_e(curve, x).value - mpmath.log(x) / 2) for x in (10, 10**3, 10**6)]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-6


def test_f_e_tail_bound_covers_truncation():
    full = f_e(CURVE, POINT.x, 40).value
    for terms in (2, 4, 8):
        short = f_e(CURVE, POINT.x, terms)
        assert 0 <= full - short.value <= short.tail_bound


def test_f_e_domain_errors():
    with pytest.raises(DomainError):
        f_e(Curve(0, 1), 3)
    with pytest.raises(DomainError):
        f_e(CURVE, 0)
    with pytest.raises(ValueError):
        f_e(CURVE, 8, 0)


# ---------------------------------------------------------------- heights


def test_canonical_height_matches_oracle():
    h = canonical_height(CURVE, POINT)
    assert h.inequality_holds and h.method == "local-sum"
    assert abs(float(canonical_height_oracle(CURVE, POINT, 10)) - h.canonical) < 1e-6
    k5 = float(canonical_height_oracle(CURVE, POINT, 5))
    k6 = float(canonical_height_oracle(CURVE, POINT, 6))
    assert abs(k5 - k6) < 1e-3


def test_oracle_torsion_is_zero():
    curve = Curve(0, 1)  # torsion group of order 6
    for P in find_points(curve, 4):
        assert canonical_height_oracle(curve, P) == 0


def test_height_identity_and_quadraticity(convenient_curves):
    checked = 0
    for curve in convenient_curves[:150]:
        for P in find_points(curve, 100)[:4]:
            r = canonical_height(curve, P)
            # h = 1/2 h_W + F_E - 1/2 log max(|x|, 1)
            other = r.weil / 2 + r.f_e_value - math.log(max(abs(P.x), 1)) / 2
            assert abs(r.canonical - other) < 1e-9 + r.error_bound
            Q2 = double_point(curve, P)
            if Q2 is not None:
                assert abs(canonical_height(curve, Q2).canonical - 4 * r.canonical) < 1e-6
                checked += 1
    assert checked > 20


def test_preconditions():
    assert height_preconditions(CURVE) == []
    reasons = height_preconditions(Curve(0, 1))
    assert any("Tamagawa" in r for r in reasons) and any("negative" in r for r in reasons)
    with pytest.raises(HeightPreconditionError):
        canonical_height(Curve(0, 1), RationalPoint(2, 3))
    with pytest.raises(ValueError):
        canonical_height(CURVE, RationalPoint(0, 1))
    r = oracle_report(Curve(0, 1), RationalPoint(2, 3))
    assert r.method == "doubling-oracle" and r.canonical == 0


def test_report_json():
    doc = json.loads(json.dumps(canonical_height(CURVE, POINT).to_json()))
    assert doc["naive_H"] == "8" and doc["inequality_holds"] is True


# ------------------------------------------------------ F_E positivity


def test_alpha_exceeds_one_on_one_component_curves(convenient_curves):
    for curve in convenient_curves:
        if archimedean_case(curve.a4, curve.a6) == ONE_COMPONENT:
            assert cubic_root_intervals(curve.a4, curve.a6)[0][0] > 1


def test_fe_positivity_needs_two_components():
    with pytest.raises(HeightPreconditionError):
        check_fe_positivity(CURVE)


def test_fe_positivity_certified_and_refinement_monotone():
    two = [c for c in enumerate_curves(10**4) if is_convenient(c).case == TWO_COMPONENT]
    assert len(two) > 10
    for curve in two[:10]:
        coarse = check_fe_positivity(curve, cells=8, max_depth=4)
        fine = check_fe_positivity(curve, cells=32, max_depth=8)
        assert fine.certified and fine.negative == []
        if coarse.certified:
            assert fine.certified


def test_convenient_points_helper():
    rows = convenient_points(10**3, 50)
    assert rows and all(t.convenient for _, t, _ in rows)
    assert all(P.on_curve(c) for c, _, pts in rows for P in pts)
