"""Continued fractions certified against the input interval, and irrationality-measure estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .angles import ContinuedFractionAngle, DecimalAngle, NamedAngle, exact_rational, parse_theta
from .errors import InsufficientExpansion

# published values, used as configuration rather than computed
REFERENCE_MU = {
    "sqrt2": (2.0, "algebraic irrational (Roth)"),
    "golden": (2.0, "algebraic irrational (Roth)"),
    "e": (2.0, "known continued fraction pattern"),
    "pi_reciprocal": (7.6063, "published upper bound for mu(pi)"),
}


@dataclass(frozen=True)
class ContinuedFractionExpansion:
    a0: int
    partial_quotients: Tuple[int, ...]
    source_precision: Optional[int]
    rational: bool
    truncated: bool
    # exact bounds of the value the quotients were certified against
    lo: Fraction
    hi: Fraction

    @property
    def quotients(self) -> Tuple[int, ...]:
        return (self.a0,) + self.partial_quotients

    def to_json(self) -> dict:
        return {
            "a0": self.a0,
            "partial_quotients": list(self.partial_quotients),
            "source_precision_bits": self.source_precision,
            "rational": self.rational,
            "truncated": self.truncated,
        }


def _expand_interval(lo: Fraction, hi: Fraction, K: int) -> Tuple[List[int], bool]:
    """Quotients shared by every number in [lo, hi]; second item is True if the CF ended."""
    out = []
    while len(out) < K + 1:
        a = math.floor(lo)
        if math.floor(hi) != a:
            return out, False
        out.append(a)
        flo, fhi = lo - a, hi - a
        if fhi == 0:
            # lo == hi == a: an exact rational has terminated
            return out, True
        if flo == 0:
            return out, False
        lo, hi = 1 / fhi, 1 / flo
    return out, False


def expand(theta, K: int = 30) -> ContinuedFractionExpansion:
    """Up to K partial quotients after a0, each certified for the whole input interval."""
    theta = parse_theta(theta)
    K = int(K)
    if K < 0:
        raise ValueError("K must be non-negative")
    if isinstance(theta, ContinuedFractionAngle) and theta.open_tail:
        lo, hi = theta.interval()
        qs = theta.partial_quotients[:K]
        return ContinuedFractionExpansion(theta.integer_part, tuple(qs), None, False, True, lo, hi)
    r = exact_rational(theta)
    if r is not None:
        v = r.value
        qs, ended = _expand_interval(v, v, K)
        return ContinuedFractionExpansion(qs[0], tuple(qs[1:]), None, ended, not ended, v, v)
    if isinstance(theta, DecimalAngle):
        lo, hi = theta.interval()
        qs, _ = _expand_interval(lo, hi, K)
        if not qs:
            return ContinuedFractionExpansion(math.floor(lo), (), math.ceil(theta.stated_precision * math.log2(10)), False, True, lo, hi)
        return ContinuedFractionExpansion(
            qs[0], tuple(qs[1:]), math.ceil(theta.stated_precision * math.log2(10)), False, True, lo, hi
        )
    assert isinstance(theta, NamedAngle)
    bits = 64 + 4 * K
    for _ in range(16):
        lo, hi = theta.interval(bits)
        qs, _ = _expand_interval(lo, hi, K)
        if len(qs) >= K + 1:
            return ContinuedFractionExpansion(qs[0], tuple(qs[1:]), bits, False, True, lo, hi)
        bits *= 2
    return ContinuedFractionExpansion(qs[0], tuple(qs[1:]), bits, False, True, lo, hi)


@dataclass(frozen=True)
class Convergent:
    k: int
    p: int
    q: int
    below: Optional[bool]
    sandwich: Optional[bool]

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def _distance_range(lo: Fraction, hi: Fraction, x: Fraction) -> Tuple[Fraction, Fraction]:
    if lo <= x <= hi:
        return Fraction(0), max(x - lo, hi - x)
    return min(abs(x - lo), abs(x - hi)), max(abs(x - lo), abs(x - hi))


def convergents(expansion: ContinuedFractionExpansion) -> List[Convergent]:
    """p_k/q_k by the standard recurrence, each checked against the error sandwich."""
    qs = expansion.quotients
    if not qs:
        raise InsufficientExpansion("empty expansion")
    pk = [qs[0]]
    qk = [1]
    p_prev, q_prev = 1, 0
    for a in qs[1:]:
        p_new = a * pk[-1] + p_prev
        q_new = a * qk[-1] + q_prev
        p_prev, q_prev = pk[-1], qk[-1]
        pk.append(p_new)
        qk.append(q_new)
    lo, hi = expansion.lo, expansion.hi
    last = len(qs) - 1
    out = []
    for k in range(len(qs)):
        x = Fraction(pk[k], qk[k])
        if x < lo:
            below = True
        elif x > hi:
            below = False
        elif lo == hi == x:
            below = None
        else:
            below = None
        sandwich = None
        if k < last:
            dmin, dmax = _distance_range(lo, hi, x)
            lower = Fraction(1, qk[k] * (qk[k + 1] + qk[k]))
            upper = Fraction(1, qk[k] * qk[k + 1])
            ends_next = expansion.rational and k + 1 == last
            if ends_next:
                # theta is p_{k+1}/q_{k+1}: the upper bound is attained
                sandwich = lower < dmin and dmax <= upper
            elif dmin > lower and dmax < upper:
                sandwich = True
            elif dmax <= lower or dmin >= upper:
                sandwich = False
        out.append(Convergent(k, pk[k], qk[k], below, sandwich))
    return out


@dataclass(frozen=True)
class MuEstimate:
    mu_hat: Optional[float]
    rational: bool
    window: Tuple[int, int]
    ratios: Dict[int, float]
    argmax: Optional[int]
    quotients_used: int

    def to_json(self) -> dict:
        return {
            "mu_hat": self.mu_hat,
            "rational": self.rational,
            "window": list(self.window),
            "argmax": self.argmax,
            "ratios": {str(k): v for k, v in self.ratios.items()},
            "quotients_used": self.quotients_used,
        }


def mu_window(m: int) -> Tuple[int, int]:
    """Indices k whose ratio ln q_{k+1} / ln q_k enters the max: the trailing quarter, k >= 3."""
    return max(3, (3 * m) // 4), m - 1


def estimate_mu(theta, K: int = 30) -> MuEstimate:
    """mu_hat = 1 + max over the window of ln q_{k+1} / ln q_k."""
    exp = theta if isinstance(theta, ContinuedFractionExpansion) else expand(theta, K)
    if exp.rational:
        m = len(exp.partial_quotients)
        return MuEstimate(None, True, (0, m), {}, None, m)
    m = len(exp.partial_quotients)
    lo_k, hi_k = mu_window(m)
    if m < 4 or hi_k < lo_k:
        raise InsufficientExpansion(f"need at least 4 partial quotients for an estimate, have {m}")
    conv = convergents(exp)
    ratios = {}
    for k in range(lo_k, hi_k + 1):
        qk, qn = conv[k].q, conv[k + 1].q
        if qk > 1:
            ratios[k] = math.log(qn) / math.log(qk)
    if not ratios:
        raise InsufficientExpansion("no usable convergents in the window")
    kmax = max(ratios, key=lambda k: ratios[k])
    return MuEstimate(1.0 + ratios[kmax], False, (lo_k, hi_k), ratios, kmax, m)


def reference_mu(theta) -> Optional[Tuple[float, str]]:
    """Published irrationality measure for a named constant, if configured."""
    theta = parse_theta(theta)
    if isinstance(theta, NamedAngle):
        return REFERENCE_MU.get(theta.name)
    return None
