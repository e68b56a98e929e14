"""Partial sums, residue-class acceleration, divergence-rate certificates, and the polylog asymptotic.

Long sums run in the float kernels, which return a rigorous radius; everything
that closes a sum (tails, constants, comparisons) is done in Arb.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from flint import arb, fmpq

from . import kernels
from .angles import SeriesKind, as_alpha, exact_rational, fixed_point, parse_theta
from .ball import BoundedReal, PrecisionBudget, default_budget, to_arb, working_precision
from .errors import (
    CertificateFailed,
    DivergentInput,
    InvalidAlpha,
    InvalidN,
    PreconditionError,
    PrecisionExhausted,
)
from .rational import ConvergenceClass, classify, residue_bases

BITS = 128
# residue tables up to this period use the periodic kernel
MAX_PERIOD = 1 << 16


def _check_alpha(alpha) -> Fraction:
    a = as_alpha(alpha)
    if not 0 < a <= 1:
        raise InvalidAlpha(f"alpha must lie in (0, 1], got {alpha}")
    return a


def _alpha_float(alpha: Fraction) -> Tuple[float, float]:
    af = float(alpha)
    err = abs(Fraction(af) - alpha)
    ef = float(err)
    if ef < err:
        ef = math.nextafter(ef, math.inf)
    return af, ef


def _float_ball(x: arb) -> Tuple[float, float]:
    """A float midpoint and an upward radius covering the ball."""
    m = float(x.mid())
    r = abs(x - m).upper()
    rf = float(r)
    rf = math.nextafter(rf, math.inf) if rf > 0 else 0.0
    return m, rf


def _kernel_ball(out) -> BoundedReal:
    s, err, rad, _ = out
    total = err + rad
    return BoundedReal.from_mid_rad(s, math.nextafter(total, math.inf))


def _check_N(N) -> int:
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidN(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if N > kernels.MAX_INDEX:
        raise PreconditionError(f"N={N} exceeds the kernel index limit 2**31 - 1")
    return N


# ------------------------------------------------------------ residue tables


@lru_cache(maxsize=64)
def _residue_table(kind: SeriesKind, p: int, q: int):
    """Arrays indexed by n mod 2q: log|base|, its radius, and the sign of base^n."""
    period = 2 * q
    logb = np.zeros(period)
    lrad = np.zeros(period)
    sgn = np.zeros(period, dtype=np.int64)
    with working_precision(BITS):
        for rb in residue_bases(kind, p, q, BITS):
            r = rb.a % period
            sgn[r] = rb.sign
            if rb.sign == 0 or rb.unit:
                continue
            logb[r], lrad[r] = _float_ball(abs(rb.base.ball).log())
    for arr in (logb, lrad, sgn):
        arr.setflags(write=False)
    return logb, lrad, sgn


@dataclass(frozen=True)
class PartialSumResult:
    kind: SeriesKind
    theta: str
    alpha: Fraction
    N: int
    value: BoundedReal
    terms_evaluated: int
    method: str
    backend: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "theta": self.theta,
            "alpha": str(self.alpha),
            "N": self.N,
            "value": self.value.to_json(),
            "terms_evaluated": self.terms_evaluated,
            "method": self.method,
            "backend": self.backend,
        }


def partial_sum(
    kind,
    theta,
    alpha,
    N: int,
    budget: Optional[PrecisionBudget] = None,
    accelerated: bool = False,
    backend: Optional[str] = None,
) -> PartialSumResult:
    """Enclosure of sum_{n=1}^{N} f(pi n theta)^n / n^alpha."""
    kind = SeriesKind.parse(kind)
    theta = parse_theta(theta)
    alpha = _check_alpha(alpha)
    N = _check_N(N)
    budget = budget or default_budget()
    K = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    r = exact_rational(theta)
    if accelerated:
        if r is None:
            raise PreconditionError("residue-accelerated summation needs a rational theta")
        dec = decompose(kind, r.p, r.q, alpha, N, backend=backend)
        value = dec.total
        method = "residue-accelerated"
    elif r is not None and 2 * r.q <= MAX_PERIOD:
        logb, lrad, sgn = _residue_table(kind, r.p, r.q)
        value = _kernel_ball(K.periodic_sum(logb, lrad, sgn, af, ae, 1, N + 1))
        method = "direct"
    else:
        fp = fixed_point(theta, N, budget)
        value = _kernel_ball(
            K.angle_sum(fp.limbs, fp.err, kind is SeriesKind.COS, True, af, ae, 1, N + 1)
        )
        method = "direct"
    return PartialSumResult(kind, theta.label(), alpha, N, value, N, method, kernels.backend_name(backend))


# ------------------------------------------------------ residue decomposition


@dataclass(frozen=True)
class ResidueRecord:
    a: int
    base: BoundedReal
    symbol: Optional[str]
    ratio: BoundedReal
    unit: bool
    sign: int
    count: int
    partial: BoundedReal


@dataclass(frozen=True)
class ResidueDecomposition:
    kind: SeriesKind
    p: int
    q: int
    alpha: Fraction
    N: int
    records: List[ResidueRecord]
    divergent: List[int]

    @property
    def total(self) -> BoundedReal:
        with working_precision(BITS):
            acc = arb(0)
            for rec in self.records:
                acc += rec.partial.ball
        return BoundedReal(acc)


def decompose(kind, p: int, q: int, alpha, N: int, backend: Optional[str] = None) -> ResidueDecomposition:
    """Split sum_{n<=N} into the 2q progressions n = a (mod 2q)."""
    kind = SeriesKind.parse(kind)
    alpha = _check_alpha(alpha)
    N = _check_N(N)
    rep = classify(kind, p, q)
    p, q = rep.p, rep.q
    if 2 * q > MAX_PERIOD:
        raise PreconditionError(f"period 2q={2 * q} too large for a residue decomposition")
    K = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    logb, lrad, sgn = _residue_table(kind, p, q)
    period = 2 * q
    records = []
    with working_precision(BITS):
        for rb in residue_bases(kind, p, q, BITS):
            r = rb.a % period
            count = (N - rb.a) // period + 1 if rb.a <= N else 0
            if count == 0 or sgn[r] == 0:
                partial = BoundedReal.exact(0)
            else:
                partial = _kernel_ball(K.progression_sum(logb[r], lrad[r], int(sgn[r]), rb.a, period, count, af, ae))
            ratio = BoundedReal(abs(rb.base.ball) ** period)
            records.append(ResidueRecord(rb.a, rb.base, rb.symbol, ratio, rb.unit, rb.sign, count, partial))
    divergent = [a for a, _ in rep.unit_residues] if rep.cls is ConvergenceClass.DIVERGES else []
    return ResidueDecomposition(kind, p, q, alpha, N, records, divergent)


# ------------------------------------------------------------ acceleration


def _pow(x: arb, alpha: Fraction) -> arb:
    if alpha == 0:
        return arb(1)
    return (to_arb(alpha) * x.log()).exp()


def _geometric_tail(absb: arb, period: int, n1: int, alpha: Fraction) -> arb:
    """Bound on sum_{l>=0} |b|^{n1 + l period} / (n1 + l period)^alpha."""
    return absb**n1 / (_pow(arb(n1), alpha) * (1 - absb**period))


def _unit_pair(rep) -> Tuple[int, int]:
    """(c, d): residues of the +1 and -1 unit progressions."""
    pos = [a for a, s in rep.unit_residues if s > 0]
    neg = [a for a, s in rep.unit_residues if s < 0]
    if len(pos) != 1 or len(neg) != 1:  # pragma: no cover - impossible for a reduced angle
        raise PreconditionError("conditional case needs exactly one unit residue of each sign")
    return pos[0], neg[0]


def _pair_integral(T: arb, c: int, d: int, period: int, alpha: Fraction) -> arb:
    """int_T^inf [(period t + c)^-alpha - (period t + d)^-alpha] dt."""
    X = period * T
    if alpha == 1:
        return ((X + d) / (X + c)).log() / period
    e = 1 - to_arb(alpha)
    return ((X + d) ** e - (X + c) ** e) / (e * period)


def pair_tail_enclosure(c: int, d: int, period: int, alpha, L: int) -> arb:
    """sum_{l>=L} h(l), h(t) = (period t + c)^-alpha - (period t + d)^-alpha.

    For c < d, h is positive, decreasing and convex, so the trapezoid rule
    gives a lower bound and the midpoint rule an upper bound.
    """
    alpha = as_alpha(alpha)
    if c == d:
        return arb(0)
    if c > d:
        return -pair_tail_enclosure(d, c, period, alpha, L)
    hL = _pow(arb(period * L + c), -alpha) - _pow(arb(period * L + d), -alpha)
    lo = _pair_integral(arb(L), c, d, period, alpha) + hL / 2
    hi = _pair_integral(arb(L) - arb(fmpq(1, 2)), c, d, period, alpha)
    lo_u, hi_u = lo.lower(), hi.upper()
    mid = (lo_u + hi_u) / 2
    return mid + arb(0, ((hi_u - lo_u) / 2).upper())


@dataclass(frozen=True)
class AcceleratedResult:
    value: BoundedReal
    kind: SeriesKind
    p: int
    q: int
    alpha: Fraction
    cls: ConvergenceClass
    terms_per_residue: dict = field(default_factory=dict)
    pair_terms: int = 0

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "theta": f"{self.p}/{self.q}",
            "alpha": str(self.alpha),
            "class": self.cls.value,
            "value": self.value.to_json(),
            "pair_terms": self.pair_terms,
            "max_terms_per_residue": max(self.terms_per_residue.values(), default=0),
        }


def accelerated(kind, p: int, q: int, alpha, tolerance: float = 1e-10, backend: Optional[str] = None) -> AcceleratedResult:
    """Full series value for a non-divergent rational angle, with details."""
    kind = SeriesKind.parse(kind)
    alpha = _check_alpha(alpha)
    rep = classify(kind, p, q)
    if rep.cls is ConvergenceClass.DIVERGES:
        raise DivergentInput(f"{kind.value} series diverges for theta={rep.p}/{rep.q}")
    p, q = rep.p, rep.q
    if 2 * q > MAX_PERIOD:
        raise PreconditionError(f"period 2q={2 * q} too large for acceleration")
    tol = Fraction(tolerance)
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    K = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    logb, lrad, sgn = _residue_table(kind, p, q)
    period = 2 * q
    bases = residue_bases(kind, p, q, BITS)
    geo = [rb for rb in bases if not rb.unit and rb.sign != 0]
    budget_each = to_arb(tol / 4) / max(len(geo), 1)
    counts = {}
    with working_precision(BITS):
        total = arb(0)
        for rb in geo:
            absb = abs(rb.base.ball)
            logabs = float(absb.log().mid())
            # smallest L with |b|^{a + period L} / (1 - |b|^period) below the share
            target = float(budget_each.lower().log().mid()) + math.log(max(float((1 - absb**period).lower()), 1e-300))
            L = max(1, math.ceil((target / logabs - rb.a) / period) + 1)
            while True:
                tail = _geometric_tail(absb, period, rb.a + period * L, alpha)
                if tail.upper() <= budget_each.lower():
                    break
                L *= 2
            r = rb.a % period
            head = _kernel_ball(K.progression_sum(logb[r], lrad[r], int(sgn[r]), rb.a, period, L, af, ae))
            total += head.ball + arb(0, tail.upper())
            counts[rb.a] = L
        pair_L = 0
        if rep.cls is ConvergenceClass.CONDITIONAL:
            c, d = _unit_pair(rep)
            pair_L = 64
            while True:
                tail = pair_tail_enclosure(c, d, period, alpha, pair_L)
                if tail.rad() <= to_arb(tol / 4):
                    break
                pair_L *= 2
            head = _kernel_ball(K.pair_sum(c, d, period, pair_L, af, ae))
            total += head.ball + tail
    value = BoundedReal(total)
    if value.rad > tol:
        raise PrecisionExhausted(f"accelerated enclosure radius {float(value.rad):.3g} exceeds tolerance {tolerance}")
    return AcceleratedResult(value, kind, p, q, alpha, rep.cls, counts, pair_L)


def accelerated_value(kind, p: int, q: int, alpha, tolerance: float = 1e-10, backend: Optional[str] = None) -> BoundedReal:
    """Enclosure of the full series sum, of radius at most ``tolerance``."""
    return accelerated(kind, p, q, alpha, tolerance, backend).value


def tail_bound(kind, p: int, q: int, alpha, N: int) -> BoundedReal:
    """Ball [-B, B] containing sum_{n>N} for a non-divergent rational angle."""
    kind = SeriesKind.parse(kind)
    alpha = _check_alpha(alpha)
    rep = classify(kind, p, q)
    if rep.cls is ConvergenceClass.DIVERGES:
        raise DivergentInput("divergent series has no tail")
    p, q = rep.p, rep.q
    period = 2 * q
    with working_precision(BITS):
        bound = arb(0)
        for rb in residue_bases(kind, p, q, BITS):
            if rb.sign == 0 or rb.unit:
                continue
            n1 = rb.a + period * ((N - rb.a) // period + 1) if rb.a <= N else rb.a
            bound += _geometric_tail(abs(rb.base.ball), period, n1, alpha)
        if rep.cls is ConvergenceClass.CONDITIONAL:
            # unit terms alternate in sign with decreasing size: bounded by the first one
            firsts = []
            for a, _ in rep.unit_residues:
                firsts.append(a + period * ((N - a) // period + 1) if a <= N else a)
            bound += _pow(arb(min(firsts)), -alpha)
        return BoundedReal(arb(0, bound.upper()))


# --------------------------------------------------- A_q and the divergence rate


def aq_sum(kind, p: int, q: int, bits: int = BITS) -> BoundedReal:
    """sum over non-unit residues of |b|^a / (1 - |b|^{2q}): the alpha -> 0 supremum."""
    kind = SeriesKind.parse(kind)
    period = 2 * classify(kind, p, q).q
    with working_precision(bits):
        s = arb(0)
        for rb in residue_bases(kind, p, q, bits):
            if rb.unit or rb.sign == 0:
                continue
            absb = abs(rb.base.ball)
            s += absb**rb.a / (1 - absb**period)
    return BoundedReal(s)


def compute_Aq(kind, p: int, q: int) -> int:
    """Least integer >= the non-unit residue bound."""
    bits = BITS
    while True:
        s = aq_sum(kind, p, q, bits).ball
        lo, hi = math.ceil(Fraction(BoundedReal(s).lower)), math.ceil(Fraction(BoundedReal(s).upper))
        if lo == hi or bits > 2048:
            return max(hi, 1)
        bits *= 2


@dataclass(frozen=True)
class RateCertificate:
    kind: SeriesKind
    p: int
    q: int
    alpha: Fraction
    A_q: int
    L: int
    N: int
    lower_bound: BoundedReal
    observed: BoundedReal
    valid: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "theta": f"{self.p}/{self.q}",
            "alpha": str(self.alpha),
            "A_q": self.A_q,
            "L": self.L,
            "N": self.N,
            "lower_bound": self.lower_bound.to_json(),
            "observed_abs_sum": self.observed.to_json(),
            "valid": self.valid,
        }


def _check_q4(q: int) -> None:
    if q % 4:
        raise PreconditionError(f"q={q} is not divisible by 4")


def rate_certificate(kind, p: int, q: int, alpha, L: int, backend: Optional[str] = None) -> RateCertificate:
    """Check |S_{2qL}| >= (1/q) ln L - A_q for 4 | q."""
    kind = SeriesKind.parse(kind)
    alpha = _check_alpha(alpha)
    rep = classify(kind, p, q)
    p, q = rep.p, rep.q
    _check_q4(q)
    if int(L) != L or L < 1:
        raise PreconditionError("L must be a positive integer")
    L = int(L)
    N = 2 * q * L
    A = compute_Aq(kind, p, q)
    S = partial_sum(kind, f"{p}/{q}", alpha, N, backend=backend).value
    with working_precision(BITS):
        lower = BoundedReal(arb(L).log() / q - A)
        observed = BoundedReal(abs(S.ball))
        valid = bool(observed.ball.lower() >= lower.ball.upper())
    cert = RateCertificate(kind, p, q, alpha, A, L, N, lower, observed, valid)
    if not valid:
        raise CertificateFailed(
            f"|S_{N}| = {observed!r} is not above (1/q) ln L - A_q = {lower!r}"
        )
    return cert


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    certificates: List[RateCertificate]


def rate_slope(kind, p: int, q: int, alpha, Ls: Sequence[int], backend: Optional[str] = None) -> RateFit:
    """Least-squares slope of |S_{2qL}| against ln L."""
    certs = [rate_certificate(kind, p, q, alpha, L, backend) for L in Ls]
    x = np.log(np.array([c.L for c in certs], dtype=float))
    y = np.array([float(c.observed) for c in certs])
    slope, intercept = np.polyfit(x, y, 1)
    return RateFit(float(slope), float(intercept), certs)


# ----------------------------------------------------- polylog near z = 1


def _open_unit(z) -> Fraction:
    zf = as_alpha(z) if not isinstance(z, Fraction) else z
    if not 0 < zf < 1:
        raise PreconditionError(f"z must lie in (0, 1), got {z}")
    return zf


def polylog_sum(z, alpha, tolerance: float = 1e-10, backend: Optional[str] = None) -> BoundedReal:
    """Enclosure of sum_{k>=1} z^k / k^alpha for 0 < z < 1 and alpha <= 1.

    ``tolerance`` bounds the enclosure radius relative to max(1, |sum|).
    """
    z = _open_unit(z)
    alpha = as_alpha(alpha)
    if alpha > 1:
        raise InvalidAlpha("alpha must be <= 1")
    K_ = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    with working_precision(BITS):
        zb = to_arb(z)
        lb, lbr = _float_ball(zb.log())
        logb = np.array([lb])
        lrad = np.array([lbr])
        sgn = np.ones(1, dtype=np.int64)
        # first guess: z^K small against the tolerance
        K = max(16, math.ceil(math.log(tolerance * float(1 - z) * 1e-3) / lb))
        while True:
            if K > kernels.MAX_INDEX:
                raise PrecisionExhausted("polylog_sum needs more terms than the kernel supports")
            head = _kernel_ball(K_.periodic_sum(logb, lrad, sgn, af, ae, 1, K + 1))
            k1 = K + 1
            if alpha >= 0:
                tail = zb**k1 / (_pow(arb(k1), alpha) * (1 - zb))
            else:
                rho = zb * _pow(arb(K + 2) / k1, -alpha)
                if not rho < 1:
                    K *= 2
                    continue
                tail = zb**k1 * _pow(arb(k1), -alpha) / (1 - rho)
            value = head.ball + arb(0, tail.upper())
            scale = max(1.0, abs(float(head)))
            if float(tail.upper()) <= tolerance * scale / 2:
                break
            K *= 2
    out = BoundedReal(value)
    if out.rad_float() > tolerance * max(1.0, abs(float(out))):
        raise PrecisionExhausted(f"polylog enclosure radius {out.rad_float():.3g} exceeds tolerance")
    return out


def gelfond_asymptotic(z, alpha, bits: int = BITS) -> BoundedReal:
    """Gamma(1 - alpha) (ln 1/z)^(alpha - 1), the leading term as z -> 1."""
    alpha = as_alpha(alpha)
    if not alpha < 1:
        raise InvalidAlpha("alpha must be < 1")
    with working_precision(bits):
        zb = to_arb(z) if not isinstance(z, (str, float)) else to_arb(_open_unit(z))
        if not (zb > 0 and zb < 1):
            raise PreconditionError("z must lie in (0, 1)")
        a = to_arb(alpha)
        g = (1 - a).gamma()
        lg = (-zb.log()).log()
        return BoundedReal(g * ((a - 1) * lg).exp())


def asymptotic_ratios(alpha, js: Sequence[int] = range(8, 17), tolerance: float = 1e-10, backend=None):
    """[(j, polylog / asymptotic)] at z = 1 - 2^-j."""
    out = []
    for j in js:
        z = 1 - Fraction(1, 1 << j)
        num = polylog_sum(z, alpha, tolerance, backend)
        den = gelfond_asymptotic(z, alpha)
        with working_precision(BITS):
            out.append((j, BoundedReal(num.ball / den.ball)))
    return out
