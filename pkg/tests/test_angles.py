from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dioseries.angles import (
    ContinuedFractionAngle,
    DecimalAngle,
    NamedAngle,
    Rational,
    SeriesKind,
    parse_theta,
    reduce_angle,
    signed_term,
    term_magnitude,
)
from dioseries.ball import BoundedReal, PrecisionBudget
from dioseries.errors import InvalidAngle, InvalidN, PrecisionExhausted, ZeroDenominator

mpmath.mp.dps = 50
SQRT2_40 = "1.4142135623730950488016887242096980785696"


def _inside(ball: BoundedReal, x) -> bool:
    x = mpmath.mpf(x)
    lo = mpmath.mpf(ball.lower.numerator) / ball.lower.denominator
    hi = mpmath.mpf(ball.upper.numerator) / ball.upper.denominator
    return lo <= x <= hi


# ------------------------------------------------------------------ parsing


def test_parse_forms():
    assert parse_theta("2/6") == Rational(1, 3)
    assert parse_theta("2/6").was_reduced
    assert parse_theta("-1/-3") == Rational(1, 3)
    assert parse_theta("0.25") == Rational(1, 4)
    d = parse_theta("0.4142135623~8")
    assert isinstance(d, DecimalAngle) and d.stated_precision == 8
    assert parse_theta("0.41421356…~8") == DecimalAngle("0.41421356", 8)
    cf = parse_theta("cf:[1;2,2,2,...]")
    assert isinstance(cf, ContinuedFractionAngle) and cf.open_tail and cf.partial_quotients == (2, 2, 2)
    assert parse_theta("cf:[3;7,16]").value == Fraction(355, 113)
    assert parse_theta("const:golden") == NamedAngle("golden")


@pytest.mark.parametrize("bad", ["x/3", "const:tau", "cf:[1;0,2]", "hello", "0.5~0"])
def test_parse_errors(bad):
    with pytest.raises(InvalidAngle):
        parse_theta(bad)


def test_zero_denominator():
    with pytest.raises(ZeroDenominator):
        parse_theta("2/0")
    with pytest.raises(ZeroDenominator):
        Rational(3, 0)


def test_decimal_interval_truncates():
    lo, hi = DecimalAngle("0.123456789", 4).interval()
    assert (lo, hi) == (Fraction(1234, 10**4), Fraction(1235, 10**4))


def test_open_cf_interval_contains_value():
    lo, hi = parse_theta("cf:[1;2,2,2,2,2,...]").interval()
    assert lo < Fraction(mpmath.nstr(mpmath.sqrt(2), 40)) < hi


# ---------------------------------------------------------------- reduction


def test_reduce_examples():
    r = reduce_angle(4, "1/2")
    assert r.exact and r.exact_frac == 0 and r.exact_dist_to_half == Fraction(1, 2)
    r = reduce_angle(1, "1/3")
    assert r.exact_dist_to_half == Fraction(1, 6)


def test_reduce_decimal_radius():
    r = reduce_angle(10**6, f"{SQRT2_40}~40", PrecisionBudget(60, 1e-30))
    assert r.nt_rad <= Fraction(10**6, 10**40)
    assert _inside(r.frac_part, mpmath.frac(10**6 * mpmath.sqrt(2)))


def test_decimal_precision_exhausted():
    with pytest.raises(PrecisionExhausted):
        reduce_angle(10**6, "0.41421356~8")


def test_invalid_n():
    with pytest.raises(InvalidN):
        reduce_angle(0, "1/3")


@given(st.integers(-200, 200), st.integers(1, 200), st.integers(1, 10**6))
def test_rational_reduction_exact(p, q, n):
    r = reduce_angle(n, Rational(p, q))
    f = Fraction(n * p, q) % 1
    assert r.exact
    assert r.exact_frac == f
    assert r.exact_dist_to_int == min(f, 1 - f)
    assert (2 * Rational(p, q).q) % r.exact_dist_to_half.denominator == 0


# ---------------------------------------------------------------- magnitudes


def test_magnitude_examples():
    assert term_magnitude(3, "1/2", "sin").is_exact and float(term_magnitude(3, "1/2", "sin")) == 1.0
    m = term_magnitude(2, "1/3", "cos")
    assert m.contains(Fraction(1, 4))
    assert term_magnitude(5, "1/1", "sin").is_exact and float(term_magnitude(5, "1/1", "sin")) == 0.0


def test_signed_examples():
    assert signed_term(3, "1/2", "sin", 1).contains(Fraction(-1, 3))
    assert signed_term(6, "1/2", "cos", 1).contains(Fraction(1, 6))
    v = signed_term(5, "1/3", "cos", "0.5")
    assert _inside(v, mpmath.mpf(1) / 32 / mpmath.sqrt(5))
    assert abs(float(v) - 0.013975424859) < 1e-11


def test_sqrt2_n100_against_fine():
    coarse = term_magnitude(100, "const:sqrt2", "cos")
    fine = term_magnitude(100, "const:sqrt2", "cos", PrecisionBudget(120, 1e-60))
    assert coarse.contains(fine.mid)
    assert _inside(coarse, abs(mpmath.cos(mpmath.pi * 100 * mpmath.sqrt(2))) ** 100)


def test_straddled_unit_point_raises():
    # theta = 0.5 to 3 digits: n theta may sit on a half-integer within the stated width
    with pytest.raises(PrecisionExhausted):
        term_magnitude(2, "0.500~3", "cos", PrecisionBudget(30, 1e-2))


rationals = st.builds(Rational, st.integers(-50, 50), st.integers(1, 50))
angles = st.one_of(
    rationals,
    st.sampled_from(["const:sqrt2", "const:golden", "const:e", "const:pi_reciprocal"]),
)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10**5), rationals, st.sampled_from(["sin", "cos"]))
def test_periodicity(n, t, kind):
    shifted1 = Rational(t.p + t.q, t.q)
    shifted2 = Rational(t.p + 2 * t.q, t.q)
    assert term_magnitude(n, t, kind).contains(term_magnitude(n, shifted1, kind).mid)
    assert signed_term(n, t, kind, 1).mid == signed_term(n, shifted2, kind, 1).mid


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6), angles)
def test_pythagorean_identity(n, theta):
    from flint import arb

    from dioseries.ball import working_precision

    r = reduce_angle(n, theta)
    with working_precision(200):
        s = r.dist_to_int.ball.sin_pi() ** 2 + r.dist_to_half.ball.sin_pi() ** 2
        assert s.contains(arb(1))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10**6), angles, st.sampled_from(["sin", "cos"]))
def test_finer_budget_inside_inflated_coarse(n, theta, kind):
    coarse = signed_term(n, theta, kind, "3/4")
    fine = signed_term(n, theta, kind, "3/4", PrecisionBudget(60, 1e-40))
    assert coarse.inflate(coarse.rad).contains(fine)


def test_kind_parse():
    assert SeriesKind.parse("COS") is SeriesKind.COS
    with pytest.raises(ValueError):
        SeriesKind.parse("tan")
