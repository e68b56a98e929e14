import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from flint import arb
from hypothesis import given, settings, strategies as st

from dioseries.ball import BoundedReal, working_precision
from dioseries.errors import CertificateFailed, DivergentInput, InvalidAlpha, InvalidN, PreconditionError
from dioseries.kernels._scalar import pair_term
from dioseries.series import (
    accelerated,
    accelerated_value,
    aq_sum,
    compute_Aq,
    decompose,
    gelfond_asymptotic,
    asymptotic_ratios,
    pair_tail_enclosure,
    partial_sum,
    polylog_sum,
    rate_certificate,
    tail_bound,
)

mpmath.mp.dps = 40


def mp_inside(ball: BoundedReal, x, slack=0) -> bool:
    lo, hi = ball.lower, ball.upper
    return mpmath.mpf(lo.numerator) / lo.denominator - slack <= x <= mpmath.mpf(hi.numerator) / hi.denominator + slack


def brute(kind, theta, alpha, N):
    f = mpmath.sin if kind == "sin" else mpmath.cos
    return mpmath.fsum(f(mpmath.pi * n * theta) ** n / mpmath.mpf(n) ** alpha for n in range(1, N + 1))


# ------------------------------------------------------------- partial sums


def test_leibniz(backend):
    v = partial_sum("sin", "1/2", 1, 10**5, backend=backend).value
    assert abs(float(v) - math.pi / 4) <= 1e-5 + float(v.rad)


def test_cos_half_harmonic(backend):
    v = partial_sum("cos", "1/2", 1, 10**4, backend=backend).value
    assert mp_inside(v, mpmath.harmonic(5000) / 2)
    assert float(v) == pytest.approx(4.547254426492, abs=1e-11)


def test_guards():
    with pytest.raises(InvalidN):
        partial_sum("sin", "1/3", 1, 0)
    with pytest.raises(InvalidAlpha):
        partial_sum("sin", "1/3", 0, 10)
    with pytest.raises(InvalidAlpha):
        partial_sum("sin", "1/3", "3/2", 10)


thetas = st.one_of(
    st.builds(lambda p, q: f"{p}/{q}", st.integers(-40, 40), st.integers(1, 40)),
    st.sampled_from(["const:sqrt2", "const:golden", "const:e", "const:pi_reciprocal", "1/70001", "12345/99991"]),
)


def _mp_theta(text):
    named = {"const:sqrt2": mpmath.sqrt(2), "const:golden": (1 + mpmath.sqrt(5)) / 2, "const:e": mpmath.e,
             "const:pi_reciprocal": 1 / mpmath.pi}
    if text in named:
        return named[text]
    p, q = text.split("/")
    return mpmath.mpf(int(p)) / int(q)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["sin", "cos"]), thetas, st.sampled_from(["1", "3/5", "1/4"]), st.integers(1, 300))
def test_partial_sum_matches_brute_force(kind, theta, alpha, N):
    v = partial_sum(kind, theta, alpha, N).value
    truth = brute(kind, _mp_theta(theta), mpmath.mpf(Fraction(alpha).numerator) / Fraction(alpha).denominator, N)
    assert mp_inside(v, truth, slack=mpmath.mpf(10) ** -30)


def test_large_period_uses_fixed_point():
    r = partial_sum("sin", "1/70001", 1, 1000)
    truth = brute("sin", mpmath.mpf(1) / 70001, 1, 1000)
    assert mp_inside(r.value, truth)


def test_deterministic(backend):
    a = partial_sum("cos", "const:golden", "3/4", 10**5, backend=backend).value
    b = partial_sum("cos", "const:golden", "3/4", 10**5, backend=backend).value
    assert a.mid == b.mid and a.rad == b.rad


# ---------------------------------------------------- residue decomposition


@pytest.mark.parametrize("kind,p,q", [("sin", 1, 3), ("cos", 1, 3), ("sin", 1, 4), ("cos", 3, 7), ("sin", 5, 6)])
def test_decomposition_identity(kind, p, q):
    N = 2 * q * 5000
    dec = decompose(kind, p, q, "0.6", N)
    direct = partial_sum(kind, f"{p}/{q}", "0.6", N).value
    assert dec.total.overlaps(direct)
    assert abs(float(dec.total) - float(direct)) <= float(dec.total.rad + direct.rad)
    assert len(dec.records) == 2 * q


def test_divergent_residues_listed():
    dec = decompose("sin", 1, 4, 1, 800)
    assert dec.divergent == [2, 6]
    assert decompose("sin", 1, 3, 1, 600).divergent == []


# --------------------------------------------------------------- acceleration


def test_accelerated_leibniz():
    v = accelerated_value("sin", 1, 2, 1)
    assert mp_inside(v, mpmath.pi / 4)
    assert float(v.rad) <= 1e-10


def test_accelerated_sin_third_series_formula():
    # sum_l r^{6l+1}/(6l+1) + r^{6l+2}/(6l+2) + r^{6l+4}/(6l+4) - r^{6l+5}/(6l+5), r = sqrt(3)/2
    r = mpmath.sqrt(3) / 2
    truth = mpmath.nsum(
        lambda l: r ** (6 * l + 1) / (6 * l + 1) + r ** (6 * l + 2) / (6 * l + 2)
        + r ** (6 * l + 4) / (6 * l + 4) - r ** (6 * l + 5) / (6 * l + 5),
        [0, mpmath.inf],
    )
    assert mp_inside(accelerated_value("sin", 1, 3, 1), truth)


def test_accelerated_cos_third_pair_part():
    # the unit pair contributes sum_l 1/(6l+6) - 1/(6l+3) = -(1/3) ln 2
    with working_precision(128):
        head = sum(1.0 / (6 * l + 6) - 1.0 / (6 * l + 3) for l in range(64))
        tail = pair_tail_enclosure(6, 3, 6, 1, 64)
        assert (arb(head) + tail + arb(0, 1e-15)).contains(-arb(2).log() / 3)


def test_accelerated_divergent():
    with pytest.raises(DivergentInput):
        accelerated_value("sin", 1, 4, 1)


def test_accelerated_tolerance_nesting():
    coarse = accelerated_value("sin", 1, 3, "0.6", tolerance=1e-6)
    fine = accelerated_value("sin", 1, 3, "0.6", tolerance=1e-12)
    assert coarse.contains(fine.mid)
    assert float(fine.rad) <= 1e-12


def test_accelerated_details():
    res = accelerated("cos", 1, 3, 1)
    assert res.pair_terms >= 64 and res.terms_per_residue


@pytest.mark.parametrize("alpha", ["1", "1/2"])
@pytest.mark.parametrize("L", [10, 100, 1000])
def test_pair_tail_vs_brute_force_q2(alpha, L):
    """Sin 1/2: sum_{l>=L} (4l+1)^-a - (4l+3)^-a, against Hurwitz zeta / digamma."""
    a = mpmath.mpf(Fraction(alpha).numerator) / Fraction(alpha).denominator
    if a == 1:
        truth = (mpmath.digamma(L + mpmath.mpf(3) / 4) - mpmath.digamma(L + mpmath.mpf(1) / 4)) / 4
    else:
        truth = 4 ** (-a) * (mpmath.zeta(a, L + mpmath.mpf(1) / 4) - mpmath.zeta(a, L + mpmath.mpf(3) / 4))
    with working_precision(128):
        enc = BoundedReal(pair_tail_enclosure(1, 3, 4, alpha, L))
    assert mp_inside(enc, truth)
    # the closed-form tail bound alpha (2q - a0)(2q)^(-alpha-1) L^-alpha / alpha, q = 2, a0 = 1
    spec_bound = 3 * mpmath.mpf(4) ** (-a - 1) * mpmath.mpf(L) ** (-a)
    assert truth <= spec_bound


def test_pair_term_exponent():
    ls = np.geomspace(100, 10**4, 25)
    vals = [pair_term(4 * l + 1, 2.0, 1.0, 0.0)[0] for l in ls]
    slope = np.polyfit(np.log(ls), np.log(vals), 1)[0]
    assert abs(slope + 2) < 0.05
    assert all(v > 0 for v in vals) and all(np.diff(vals) < 0)


@pytest.mark.parametrize("kind,p,q,alpha", [("sin", 1, 3, 1), ("cos", 1, 3, 1), ("sin", 1, 2, "0.6"), ("cos", 5, 7, "0.8")])
def test_tail_bound_sound(kind, p, q, alpha):
    N = 2000
    full = accelerated_value(kind, p, q, alpha)
    head = partial_sum(kind, f"{p}/{q}", alpha, N).value
    tb = tail_bound(kind, p, q, alpha, N)
    gap = abs(float(full) - float(head))
    assert gap <= float(tb.upper) + float(full.rad + head.rad)


# ---------------------------------------------------------------------- A_q


def test_aq_sin_quarter():
    r = mpmath.sqrt(2) / 2
    oracle = mpmath.mpf(16) / 15 * sum(r**a for a in (1, 3, 5, 7))
    assert mp_inside(aq_sum("sin", 1, 4), oracle)
    assert compute_Aq("sin", 1, 4) == 2


def _aq_oracle(kind, p, q):
    s = mpmath.mpf(0)
    for a in range(1, 2 * q + 1):
        x = mpmath.pi * a * p / q
        b = abs(mpmath.sin(x) if kind == "sin" else mpmath.cos(x))
        if b < mpmath.mpf(10) ** -30 or abs(b - 1) < mpmath.mpf(10) ** -30:
            continue
        s += b**a / (1 - b ** (2 * q))
    return int(mpmath.ceil(s))


@pytest.mark.parametrize("kind,p,q", [("cos", 1, 4), ("sin", 3, 8), ("cos", 5, 12), ("sin", 7, 20)])
def test_compute_aq_oracle(kind, p, q):
    assert compute_Aq(kind, p, q) == _aq_oracle(kind, p, q)


@pytest.mark.parametrize("nu", range(2, 9))
def test_aq_linear_bound(nu):
    q = 1 << nu
    for p in (1, 3, q - 1):
        for kind in ("sin", "cos"):
            assert float(aq_sum(kind, p, q).upper) <= 8 * q / 3


def test_rate_certificate_example():
    c = rate_certificate("sin", 1, 4, 1, 1000)
    assert c.valid and c.A_q == 2 and c.N == 8000
    assert float(c.lower_bound) == pytest.approx(math.log(1000) / 4 - 2)
    with pytest.raises(PreconditionError):
        rate_certificate("sin", 1, 6, 1, 1000)


def test_rate_certificate_failure_is_invariant_violation(monkeypatch):
    import dioseries.series as S

    monkeypatch.setattr(S, "compute_Aq", lambda *a: -100)
    with pytest.raises(CertificateFailed):
        S.rate_certificate("sin", 1, 4, 1, 10)


# -------------------------------------------------------------- polylog near z = 1


def test_polylog_examples():
    assert mp_inside(polylog_sum("1/2", 1), mpmath.log(2))
    v = polylog_sum("1e-8", "0.3")
    assert float(v) == pytest.approx(1e-8, rel=1e-7)


@pytest.mark.parametrize("z", ["0.1", "0.5", "0.9", "0.999"])
@pytest.mark.parametrize("alpha", ["0.3", "0.5", "1", "-0.5"])
def test_polylog_matches_mpmath(z, alpha):
    v = polylog_sum(z, alpha)
    truth = mpmath.polylog(mpmath.mpf(alpha), mpmath.mpf(z))
    assert mp_inside(v, truth, slack=mpmath.mpf(10) ** -25)


def test_gelfond_examples():
    g = gelfond_asymptotic("0.36787944117144232159552377016146086744581113103176", 0)
    assert float(g) == pytest.approx(1.0, abs=1e-12)
    g = gelfond_asymptotic("0.999", "0.5")
    truth = mpmath.sqrt(mpmath.pi) * (-mpmath.log(mpmath.mpf("0.999"))) ** -0.5
    assert mp_inside(g, truth)
    assert float(g) == pytest.approx(56.0359, abs=1e-3)
    with pytest.raises(InvalidAlpha):
        gelfond_asymptotic("0.5", 1)


def test_gelfond_ratio_at_0999_is_about_97_percent():
    # the leading-order asymptotic is 2.6% above the sum at z = 0.999 (checked against mpmath.polylog)
    ratio = float(polylog_sum("0.999", "0.5")) / float(gelfond_asymptotic("0.999", "0.5"))
    oracle = mpmath.polylog(0.5, mpmath.mpf("0.999")) / (mpmath.sqrt(mpmath.pi) * (-mpmath.log(mpmath.mpf("0.999"))) ** -0.5)
    assert ratio == pytest.approx(float(oracle), rel=1e-10)
    assert 0.97 < ratio < 0.98


def test_gelfond_ratio_z09999():
    ratio = float(polylog_sum("0.9999", "0.5")) / float(gelfond_asymptotic("0.9999", "0.5"))
    assert abs(ratio - 1) < 0.01
    assert float(gelfond_asymptotic("0.9999", "0.5")) == pytest.approx(177.2, abs=0.1)


def test_ratio_sweep_z099_alpha075():
    rs = [float(polylog_sum(z, "0.75")) / float(gelfond_asymptotic(z, "0.75")) for z in ("0.99", "0.999", "0.9999")]
    assert abs(rs[2] - 1) < abs(rs[1] - 1) < abs(rs[0] - 1)


@pytest.mark.parametrize("alpha", ["0.25", "0.5", "0.75"])
def test_asymptotic_ratios_monotone(alpha):
    rs = [float(r) for _, r in asymptotic_ratios(alpha, range(8, 17))]
    dev = [abs(1 - r) for r in rs]
    assert all(a > b for a, b in zip(dev[2:], dev[3:]))
