import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from dioseries.errors import NotReduced, ZeroDenominator
from dioseries.rational import ConvergenceClass, classify, find_a0, paired_residue, residue_bases

mpmath.mp.dps = 40


def oracle_class(kind, p, q):
    """Class from the per-period unit-residue sign sum, via exact half-integer / integer tests."""
    total, units = 0, 0
    for a in range(1, 2 * q + 1):
        t = Fraction(a * p, q)
        if kind == "sin":
            t -= Fraction(1, 2)  # sin(pi ap/q) = +-1 iff ap/q - 1/2 is an integer m, value (-1)^m
        if t.denominator != 1:
            continue
        units += 1
        base = -1 if int(t) % 2 else 1
        total += base**a  # b^(a + 2ql) = b^a since b^2 = 1
    assert total >= 0
    if units == 0:
        return ConvergenceClass.ABSOLUTE
    return ConvergenceClass.DIVERGES if total > 0 else ConvergenceClass.CONDITIONAL


def reduced_pairs(q_max):
    for q in range(1, q_max + 1):
        for p in range(-2 * q, 2 * q + 1):
            if math.gcd(p, q) == 1:
                yield p, q


@pytest.mark.parametrize("kind", ["sin", "cos"])
def test_oracle_equivalence_q30(kind):
    bad = [(p, q) for p, q in reduced_pairs(30) if classify(kind, p, q).cls is not oracle_class(kind, p, q)]
    assert bad == []


@pytest.mark.parametrize(
    "kind,p,q,cls",
    [
        ("sin", 1, 4, ConvergenceClass.DIVERGES),
        ("cos", 1, 3, ConvergenceClass.CONDITIONAL),
        ("sin", 1, 3, ConvergenceClass.ABSOLUTE),
        ("cos", 2, 3, ConvergenceClass.DIVERGES),
        ("sin", 1, 2, ConvergenceClass.CONDITIONAL),
    ],
)
def test_classify_examples(kind, p, q, cls):
    assert classify(kind, p, q).cls is cls


def test_reduction_flag_and_not_reduced():
    r = classify("sin", 2, 8)
    assert (r.p, r.q, r.reduced_from) == (1, 4, (2, 8))
    with pytest.raises(NotReduced):
        classify("sin", 2, 8, reduce=False)
    with pytest.raises(ZeroDenominator):
        classify("cos", 1, 0)


@pytest.mark.parametrize("kind,p,q,a0,paired", [("cos", 1, 3, 3, 6), ("sin", 1, 2, 1, 3), ("sin", 1, 4, 2, 6)])
def test_find_a0_examples(kind, p, q, a0, paired):
    assert find_a0(kind, p, q) == a0
    assert paired_residue(kind, p, q) == paired


def test_find_a0_absent_for_odd_sin():
    assert find_a0("sin", 1, 3) is None


def _base_mp(kind, a, p, q):
    x = mpmath.pi * a * p / q
    return mpmath.sin(x) if kind == "sin" else mpmath.cos(x)


@pytest.mark.parametrize("kind", ["sin", "cos"])
def test_a0_base_is_unit(kind):
    for p, q in reduced_pairs(24):
        a0 = find_a0(kind, p, q)
        if a0 is None:
            continue
        assert 1 <= a0 <= 2 * q
        b = _base_mp(kind, a0, p, q)
        assert abs(abs(b) - 1) < mpmath.mpf(10) ** -30, (kind, p, q, a0)
        rep = classify(kind, p, q)
        assert rep.a0_base == int(mpmath.nint(b))
        # the paired residue is also a unit residue
        pb = _base_mp(kind, rep.paired, p, q)
        assert abs(abs(pb) - 1) < mpmath.mpf(10) ** -30


def test_residue_bases_cos_half():
    rb = residue_bases("cos", 1, 2)
    assert [r.symbol for r in rb] == ["0", "-1", "0", "1"]
    assert [r.unit for r in rb] == [False, True, False, True]
    assert [r.sign for r in rb if r.unit] == [1, 1]


def test_residue_bases_sin_half():
    rb = residue_bases("sin", 1, 2)
    units = [(r.a, r.sign) for r in rb if r.unit]
    assert units == [(1, 1), (3, -1)]


def test_residue_bases_sin_third():
    rb = residue_bases("sin", 1, 3)
    assert not any(r.unit for r in rb)
    assert max(abs(float(r.base)) for r in rb) == pytest.approx(math.sqrt(3) / 2, abs=1e-15)


@given(st.sampled_from(["sin", "cos"]), st.integers(1, 40), st.integers(-500, 500))
def test_residue_bases_enclose_truth(kind, q, p):
    if math.gcd(p, q) != 1:
        p = 1
    for r in residue_bases(kind, p, q):
        b = _base_mp(kind, r.a, p, q)
        lo, hi = r.base.lower, r.base.upper
        slack = mpmath.mpf(10) ** -35  # mpmath's own rounding of sin(pi k)
        assert mpmath.mpf(lo.numerator) / lo.denominator - slack <= b <= mpmath.mpf(hi.numerator) / hi.denominator + slack
        if r.sign and not r.unit:
            assert (b**r.a > 0) == (r.sign > 0) or r.a % 2 == 0


@given(st.sampled_from(["sin", "cos"]), st.integers(1, 60), st.integers(-1000, 1000))
def test_symmetry(kind, q, p):
    if math.gcd(p, q) != 1:
        return
    c = classify(kind, p, q).cls
    assert classify(kind, p % (2 * q), q).cls is c
    assert classify(kind, -p, q).cls is c
