"""Binary-expansion numbers with a doubly exponential gap schedule, and exact divergence certificates.

xi = u + sum_i 2^-b_i + sum_k 2^-nu_k with
    nu_{k+1} = 2^(nu_k + 2) (A_k + k + 4) + 2 nu_k + 3,
where A_k bounds the non-unit residue contribution at q = 2^nu_k.  For every k the
partial sums of both series at N_k = 2 q L, L = 2^(2q(A_k + k + 4)), exceed k + 4 - pi.
Certificates work on exponent ledgers only; nothing beyond xi_1 is materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Tuple

import numpy as np
from flint import arb

from .angles import SeriesKind
from .ball import BoundedReal, working_precision
from .dyadic import Dyadic
from .errors import BudgetTooSmall, EmptyInterval, IdentityViolated, PreconditionError
from .series import _check_alpha, compute_Aq, rate_certificate

# q above this uses the closed-form bound A_q <= 3q instead of the residue sum
EXACT_AQ_MAX_EXP = 12
MAX_DEMO_BUDGET = 10**8


def _rational(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def aq_upper(nu: int, p: int) -> Tuple[int, bool]:
    """Integer A with A >= A_q for q = 2^nu, p odd; second item says whether it is the exact residue sum ceiling."""
    q = 1 << nu
    if nu <= EXACT_AQ_MAX_EXP:
        pm = p % (2 * q)
        return max(compute_Aq(SeriesKind.SIN, pm, q), compute_Aq(SeriesKind.COS, pm, q)), True
    return 3 * q, False


def _next_nu(nu: Dyadic, A: Dyadic, k: int) -> Dyadic:
    return (A + (k + 4)).shift(nu + 2) + nu.shift(1) + 3


@dataclass(frozen=True)
class LiouvilleSchedule:
    x1: Fraction
    x2: Fraction
    u: int
    b: Tuple[int, ...]
    nu: Tuple[Dyadic, ...]
    A_values: Tuple[Dyadic, ...]
    A_exact: Tuple[bool, ...]

    @property
    def depth(self) -> int:
        return len(self.A_values)

    @property
    def xi0(self) -> Fraction:
        return self.u + sum((Fraction(1, 2**bi) for bi in self.b), Fraction(0))

    def xi(self, k: int) -> Fraction:
        """Truncation xi_k as an exact rational; only feasible while nu_k is small."""
        x = self.xi0
        for j in range(k):
            e = self.nu[j].to_int()
            if e > 1 << 16:
                raise OverflowError(f"xi_{k} has 2^{e} binary digits")
            x += Fraction(1, 1 << e)
        return x

    def numerator(self, k: int) -> int:
        """p with xi_k = p / 2^nu_k."""
        return int(self.xi(k) * (1 << self.nu[k - 1].to_int()))

    def to_json(self) -> dict:
        out = {
            "interval": [str(self.x1), str(self.x2)],
            "u": self.u,
            "b": list(self.b),
            "xi0": str(self.xi0),
            "nu": [str(v) for v in self.nu],
            "A_values": [str(a) for a in self.A_values],
            "A_exact": list(self.A_exact),
        }
        if self.nu[0].to_int() <= 64:
            out["xi1"] = str(self.xi(1))
        return out


def build_schedule(x1, x2, K: int = 1) -> LiouvilleSchedule:
    x1, x2 = _rational(x1), _rational(x2)
    if not x1 < x2:
        raise EmptyInterval(f"empty interval ({x1}, {x2})")
    if int(K) != K or K < 1:
        raise PreconditionError("depth K must be a positive integer")
    K = int(K)
    # smallest nu_1 whose grid point xi_0 leaves room for the whole tail
    nu1 = 2
    while True:
        h = Fraction(1, 2 ** (nu1 - 1))
        xi0 = math.ceil(x1 / h) * h
        if xi0 + h <= x2:
            break
        nu1 += 1
    u = math.floor(xi0)
    frac = (xi0 - u) * 2 ** (nu1 - 1)
    assert frac.denominator == 1
    bits = int(frac)
    b = tuple(nu1 - 1 - i for i in reversed(range(bits.bit_length())) if (bits >> i) & 1)

    nu = [Dyadic.of(nu1)]
    A_vals, exact = [], []
    xi = xi0
    for k in range(1, K + 1):
        small = nu[-1].as_small_int()
        if small is not None and small <= EXACT_AQ_MAX_EXP:
            xi += Fraction(1, 1 << small)
            p = int(xi * (1 << small))
            if p % 2 == 0:
                raise IdentityViolated(f"numerator of xi_{k} is even")
            a, ex = aq_upper(small, p)
            A = Dyadic.of(a)
        else:
            A, ex = Dyadic.of(3).shift(nu[-1]), False
        A_vals.append(A)
        exact.append(ex)
        nu.append(_next_nu(nu[-1], A, k))
    return LiouvilleSchedule(x1, x2, u, b, tuple(nu), tuple(A_vals), tuple(exact))


@dataclass(frozen=True)
class DivergenceCertificate:
    k: int
    q_exponent: Dyadic
    A: Dyadic
    L_exponent: Dyadic
    N_exponent: Dyadic
    nu_next: Dyadic
    slack: Fraction
    lower_bound: BoundedReal
    exceeds_k: bool
    tail_ok: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "q": f"2^{self.q_exponent}",
            "A_q": str(self.A),
            "L_exponent": str(self.L_exponent),
            "N_exponent": str(self.N_exponent),
            "nu_next": str(self.nu_next),
            "identity": "2*N_exponent + 1 == nu_next",
            "slack": str(self.slack),
            "lower_bound": self.lower_bound.to_json(),
            "lower_bound_exceeds_k": self.exceeds_k,
            "tail_bound_ok": self.tail_ok,
        }


def certify(schedule: LiouvilleSchedule, k: int) -> DivergenceCertificate:
    """Exact check that N_k^2 |xi - xi_k| <= 1 and |S_{N_k}| >= k + 4 - pi for both kinds."""
    if int(k) != k or k < 1:
        raise PreconditionError("k must be a positive integer")
    k = int(k)
    if len(schedule.nu) < k + 1:
        raise PreconditionError(f"schedule depth {schedule.depth} does not reach nu_{k + 1}")
    nu_k, nu_next = schedule.nu[k - 1], schedule.nu[k]
    A = schedule.A_values[k - 1]
    # log2 L = 2q (A + k + 4), log2 N_k = 1 + nu_k + log2 L
    L_exp = (A + (k + 4)).shift(nu_k + 1)
    N_exp = L_exp + nu_k + 1
    if N_exp.shift(1) + 1 != nu_next:
        raise IdentityViolated(f"2*log2(N_{k}) + 1 != nu_{k + 1}")
    # |xi - xi_k| <= 2 * 2^-nu_{k+1} needs nu strictly increasing from k+1 on
    tail_ok = all(schedule.nu[j + 1] >= schedule.nu[j] + 1 for j in range(len(schedule.nu) - 1))
    if not tail_ok:
        raise IdentityViolated("nu is not strictly increasing")
    # N^2 * 2 * 2^-nu_next = 2^(2 log2 N + 1 - nu_next) = 2^0
    slack = Fraction(1)
    with working_precision(128):
        lb = BoundedReal(arb(k + 4) - arb.pi())
        exceeds = bool(lb.ball.lower() > k)
    if not exceeds:
        raise IdentityViolated("k + 4 - pi is not above k")
    return DivergenceCertificate(k, nu_k, A, L_exp, N_exp, nu_next, slack, lb, exceeds, tail_ok)


@dataclass(frozen=True)
class DivergenceDemo:
    kind: SeriesKind
    p: int
    q: int
    alpha: Fraction
    k_target: int
    N_budget: int
    A_q: int
    Ls: Tuple[int, ...]
    observed: Tuple[float, ...]
    lower_bounds: Tuple[float, ...]
    slope: float
    exceeds_target: bool
    note: str = field(default="feasible-scale illustration at a rational angle, not a proof of divergence for the constructed irrationals")

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "theta": f"{self.p}/{self.q}",
            "alpha": str(self.alpha),
            "k_target": self.k_target,
            "N_budget": self.N_budget,
            "A_q": self.A_q,
            "L": list(self.Ls),
            "observed_abs_sum": list(self.observed),
            "certified_lower_bound": list(self.lower_bounds),
            "slope_per_lnL": self.slope,
            "exceeds_target": self.exceeds_target,
            "note": self.note,
        }


def demo_divergence(q: int, k_target: float, N_budget: int, kind="sin", alpha=1, p: int = 1, points: int = 4, backend=None) -> DivergenceDemo:
    """Partial sums at 1/q growing past k_target within N_budget terms."""
    kind = SeriesKind.parse(kind)
    alpha = _check_alpha(alpha)
    q, N_budget = int(q), int(N_budget)
    if q <= 0 or q % 4:
        raise PreconditionError(f"q={q} is not a positive multiple of 4")
    if math.gcd(p, q) != 1:
        raise PreconditionError(f"{p}/{q} is not reduced")
    if N_budget > MAX_DEMO_BUDGET:
        raise PreconditionError(f"N_budget above {MAX_DEMO_BUDGET}")
    A = compute_Aq(kind, p, q)
    L_max = N_budget // (2 * q)
    if L_max < 2 or math.log(L_max) / q - A <= k_target:
        raise BudgetTooSmall(
            f"(1/q) ln(N/(2q)) - A_q = {math.log(max(L_max, 1)) / q - A:.4g} does not exceed {k_target}"
        )
    L_min = max(2, min(10, L_max // 10))
    Ls = sorted({int(round(v)) for v in np.geomspace(L_min, L_max, points)})
    certs = [rate_certificate(kind, p, q, alpha, L, backend) for L in Ls]
    obs = tuple(float(c.observed) for c in certs)
    lows = tuple(float(c.lower_bound) for c in certs)
    slope = float(np.polyfit(np.log(np.array(Ls, dtype=float)), np.array(obs), 1)[0])
    exceeds = bool(certs[-1].observed.ball.lower() > k_target)
    return DivergenceDemo(kind, p, q, alpha, k_target, N_budget, A, tuple(Ls), obs, lows, slope, exceeds)
