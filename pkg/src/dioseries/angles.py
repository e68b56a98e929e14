"""Angle forms, argument reduction of n*theta, and single-term enclosures.

All reductions work on exact rational bounds of n*theta, so the only source
of width is the input itself (a stated decimal precision, an open continued
fraction tail, or the working precision used to materialize a constant).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from flint import arb, fmpq

from .ball import BoundedReal, PrecisionBudget, _arb_to_fraction, default_budget, to_arb, working_precision
from .errors import InvalidAngle, InvalidN, PrecisionExhausted, ZeroDenominator

HALF = Fraction(1, 2)


class SeriesKind(enum.Enum):
    SIN = "sin"
    COS = "cos"

    @classmethod
    def parse(cls, value) -> "SeriesKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidAngle(f"unknown series kind {value!r}; expected 'sin' or 'cos'") from None


def as_alpha(alpha) -> Fraction:
    """Exponent as an exact rational.  Floats are read as their shortest decimal repr."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, bool):
        raise TypeError("alpha must be numeric")
    if isinstance(alpha, int):
        return Fraction(alpha)
    if isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise ValueError("alpha must be finite")
        return Fraction(repr(alpha))
    if isinstance(alpha, str):
        return Fraction(alpha.strip())
    return Fraction(alpha)


# ---------------------------------------------------------------- angle forms


@dataclass(frozen=True)
class Rational:
    p: int
    q: int = 1
    was_reduced: bool = field(default=False, compare=False)

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0:
            raise ZeroDenominator(f"zero denominator in {p}/0")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        object.__setattr__(self, "was_reduced", g > 1)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    is_rational = True

    def interval(self, bits: int = 0):
        v = self.value
        return v, v

    def label(self) -> str:
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class DecimalAngle:
    """A decimal truncated (toward zero) after ``stated_precision`` places."""

    digits: str
    stated_precision: int

    def __post_init__(self):
        if self.stated_precision < 1:
            raise InvalidAngle("stated_precision must be >= 1")
        try:
            Fraction(self.digits)
        except (ValueError, ZeroDivisionError):
            raise InvalidAngle(f"not a decimal: {self.digits!r}") from None

    is_rational = False

    @property
    def truncated(self) -> Fraction:
        x = Fraction(self.digits)
        scale = 10 ** self.stated_precision
        return Fraction(math.trunc(x * scale), scale)

    @property
    def width(self) -> Fraction:
        return Fraction(1, 10 ** self.stated_precision)

    def interval(self, bits: int = 0):
        x = self.truncated
        if x < 0 or (x == 0 and self.digits.strip().startswith("-")):
            return x - self.width, x
        return x, x + self.width

    def label(self) -> str:
        return f"{self.digits}~{self.stated_precision}"


@dataclass(frozen=True)
class ContinuedFractionAngle:
    """[a0; a1, a2, ...].  With ``open_tail`` the listed quotients are only a prefix."""

    integer_part: int
    partial_quotients: tuple = ()
    open_tail: bool = False

    def __post_init__(self):
        pq = tuple(int(a) for a in self.partial_quotients)
        if any(a < 1 for a in pq):
            raise InvalidAngle("partial quotients beyond index 0 must be >= 1")
        object.__setattr__(self, "partial_quotients", pq)
        object.__setattr__(self, "integer_part", int(self.integer_part))

    @property
    def is_rational(self) -> bool:
        return not self.open_tail

    def _convergent_pair(self):
        p0, q0, p1, q1 = 1, 0, self.integer_part, 1
        for a in self.partial_quotients:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        return (p0, q0), (p1, q1)

    @property
    def value(self) -> Fraction:
        if self.open_tail:
            raise InvalidAngle("open continued fraction has no exact value")
        _, (p, q) = self._convergent_pair()
        return Fraction(p, q)

    def interval(self, bits: int = 0):
        (pp, qp), (p, q) = self._convergent_pair()
        last = Fraction(p, q)
        if not self.open_tail:
            return last, last
        # any tail t >= 1 gives (p t + pp) / (q t + qp), between p/q and (p+pp)/(q+qp)
        other = Fraction(p + pp, q + qp)
        return min(last, other), max(last, other)

    def rational(self) -> Rational:
        v = self.value
        return Rational(v.numerator, v.denominator)

    def label(self) -> str:
        body = ",".join(str(a) for a in self.partial_quotients)
        tail = ",..." if self.open_tail else ""
        if body:
            return f"cf:[{self.integer_part};{body}{tail}]"
        return f"cf:[{self.integer_part}{';...' if self.open_tail else ''}]"


NAMED_CONSTANTS = ("sqrt2", "golden", "e", "pi_reciprocal")


@lru_cache(maxsize=256)
def _named_bounds(name: str, bits: int):
    with working_precision(bits):
        if name == "sqrt2":
            x = arb(2).sqrt()
        elif name == "golden":
            x = (1 + arb(5).sqrt()) / 2
        elif name == "e":
            x = arb(1).exp()
        elif name == "pi_reciprocal":
            x = 1 / arb.pi()
        else:  # pragma: no cover - guarded by NamedAngle
            raise InvalidAngle(name)
        mid = _arb_to_fraction(x.mid())
        rad = _arb_to_fraction(x.rad())
    return mid - rad, mid + rad


@dataclass(frozen=True)
class NamedAngle:
    name: str

    def __post_init__(self):
        if self.name not in NAMED_CONSTANTS:
            raise InvalidAngle(f"unknown constant {self.name!r}; expected one of {', '.join(NAMED_CONSTANTS)}")

    is_rational = False

    def interval(self, bits: int = 128):
        return _named_bounds(self.name, max(int(bits), 64))

    def label(self) -> str:
        return f"const:{self.name}"


AngleForm = Union[Rational, DecimalAngle, ContinuedFractionAngle, NamedAngle]

_DEC_RE = re.compile(r"^([+-]?\d+(?:\.\d*)?|[+-]?\.\d+)(?:\.\.\.|…)?~(\d+)$")
_CF_RE = re.compile(r"^cf:\[\s*([+-]?\d+)\s*(?:;(.*))?\]$")


def parse_theta(text) -> AngleForm:
    """Parse 'p/q', 'digits~precision', 'cf:[a0;a1,...]' or 'const:name'."""
    if isinstance(text, (Rational, DecimalAngle, ContinuedFractionAngle, NamedAngle)):
        return text
    if isinstance(text, Fraction):
        return Rational(text.numerator, text.denominator)
    if isinstance(text, int) and not isinstance(text, bool):
        return Rational(text, 1)
    s = str(text).strip()
    if s.startswith("const:"):
        return NamedAngle(s[6:].strip())
    if s.startswith("cf:"):
        m = _CF_RE.match(s.replace(" ", ""))
        if not m:
            raise InvalidAngle(f"bad continued fraction {s!r}")
        a0 = int(m.group(1))
        rest = (m.group(2) or "").strip()
        open_tail = False
        for ell in ("...", "…"):
            if rest.endswith(ell):
                open_tail = True
                rest = rest[: -len(ell)].rstrip(",")
        quotients = [int(t) for t in rest.split(",") if t.strip()] if rest else []
        return ContinuedFractionAngle(a0, tuple(quotients), open_tail)
    m = _DEC_RE.match(s)
    if m:
        return DecimalAngle(m.group(1), int(m.group(2)))
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            pn, qn = int(num), int(den)
        except ValueError:
            raise InvalidAngle(f"bad rational {s!r}") from None
        return Rational(pn, qn)
    try:
        v = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InvalidAngle(f"cannot parse angle {s!r}") from None
    return Rational(v.numerator, v.denominator)


def exact_rational(theta: AngleForm) -> Optional[Rational]:
    """The Rational for exactly-known rational forms, else None."""
    if isinstance(theta, Rational):
        return theta
    if isinstance(theta, ContinuedFractionAngle) and not theta.open_tail:
        return theta.rational()
    return None


# ------------------------------------------------------------------ reduction


@dataclass(frozen=True)
class ReducedAngle:
    n: int
    frac_part: BoundedReal
    dist_to_int: BoundedReal
    dist_to_half: BoundedReal
    exact: bool
    # exact rational bounds of n*theta: the enclosures above are derived from these
    nt_mid: Fraction
    nt_rad: Fraction

    @property
    def exact_frac(self) -> Optional[Fraction]:
        return self.nt_mid - math.floor(self.nt_mid) if self.exact else None

    @property
    def exact_dist_to_int(self) -> Optional[Fraction]:
        f = self.exact_frac
        return None if f is None else min(f, 1 - f)

    @property
    def exact_dist_to_half(self) -> Optional[Fraction]:
        f = self.exact_frac
        return None if f is None else abs(f - HALF)

    def distance_bounds(self, which: str):
        """Exact rational [lo, hi] for ||n theta|| ('int') or ||n theta - 1/2|| ('half')."""
        m = self.nt_mid
        f = m - math.floor(m)
        d = min(f, 1 - f) if which == "int" else abs(f - HALF)
        return max(Fraction(0), d - self.nt_rad), min(HALF, d + self.nt_rad)


def _theta_bounds(theta: AngleForm, n: int, budget: PrecisionBudget):
    """Bounds of theta tight enough that n * width/2 <= target_radius."""
    if isinstance(theta, Rational):
        v = theta.value
        return v, v, True
    if isinstance(theta, ContinuedFractionAngle) and not theta.open_tail:
        v = theta.value
        return v, v, True
    target = Fraction(budget.target_radius)
    if isinstance(theta, NamedAngle):
        bits = budget.bits_for_index(n)
        for _ in range(12):
            lo, hi = theta.interval(bits)
            if n * (hi - lo) / 2 <= target:
                return lo, hi, False
            bits *= 2
        raise PrecisionExhausted(f"could not materialize {theta.label()} for n={n}")
    lo, hi = theta.interval()
    if isinstance(theta, DecimalAngle):
        if n * theta.width > target:
            raise PrecisionExhausted(
                f"{theta.stated_precision} stated digits cannot support n={n} at target radius {budget.target_radius}"
            )
    elif n * (hi - lo) / 2 > target:
        raise PrecisionExhausted(f"open continued fraction too short for n={n}")
    return lo, hi, False


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidN(f"n must be a positive integer, got {n!r}")
    return int(n)


def reduce_angle(n: int, theta, budget: Optional[PrecisionBudget] = None) -> ReducedAngle:
    """Enclosures of frac(n theta), ||n theta|| and ||n theta - 1/2||."""
    n = _check_n(n)
    theta = parse_theta(theta)
    budget = budget or default_budget()
    r = exact_rational(theta)
    if r is not None:
        # exact modular arithmetic: n p mod 2q keeps the parity of floor(n theta)
        m = (n * r.p) % (2 * r.q)
        mid, rad, exact = Fraction(m, r.q), Fraction(0), True
    else:
        lo, hi, exact = _theta_bounds(theta, n, budget)
        mid2 = n * (lo + hi) / 2
        # reduce mod 2 so the sign information survives
        mid = mid2 - 2 * math.floor(mid2 / 2)
        rad = n * (hi - lo) / 2
    f = mid - math.floor(mid)
    d_int = min(f, 1 - f)
    d_half = abs(f - HALF)
    with working_precision(budget.bits_for_index(n)):
        frac = BoundedReal.from_mid_rad(f, rad)
        dint = BoundedReal.from_bounds(max(Fraction(0), d_int - rad), min(HALF, d_int + rad))
        dhalf = BoundedReal.from_bounds(max(Fraction(0), d_half - rad), min(HALF, d_half + rad))
    return ReducedAngle(n, frac, dint, dhalf, exact, mid, rad)


def _ball(lo: Fraction, hi: Fraction) -> arb:
    if lo == hi:
        return to_arb(lo)
    return to_arb((lo + hi) / 2) + arb(0, to_arb((hi - lo) / 2))


def _magnitude(red: ReducedAngle, kind: SeriesKind, n: int) -> arb:
    """|f(pi n theta)|^n as an arb at the current precision."""
    zero_which, unit_which = ("int", "half") if kind is SeriesKind.SIN else ("half", "int")
    d_lo, d_hi = red.distance_bounds(zero_which)
    e_lo, e_hi = red.distance_bounds(unit_which)
    if red.exact:
        if d_hi == 0:
            return arb(0)
        if e_hi == 0:
            return arb(1)
    if d_lo == 0:
        hi = arb(d_hi).sin_pi() if d_hi < HALF else arb(1)
        return _zero_to(hi ** n)
    if e_lo == 0:
        raise PrecisionExhausted(f"enclosure of n theta at n={n} straddles a unit-magnitude point")
    if (e_lo + e_hi) / 2 <= Fraction(1, 4):
        base = _ball(e_lo, e_hi).cos_pi()
    else:
        base = _ball(d_lo, d_hi).sin_pi()
    return (n * base.log()).exp()


def _zero_to(hi: arb) -> arb:
    """The ball [0, upper(hi)]."""
    u = hi.upper()
    return u / 2 + arb(0, (u / 2).upper())


def term_magnitude(n: int, theta, kind, budget: Optional[PrecisionBudget] = None) -> BoundedReal:
    """Enclosure of |sin(pi n theta)|^n or |cos(pi n theta)|^n."""
    kind = SeriesKind.parse(kind)
    budget = budget or default_budget()
    red = reduce_angle(n, theta, budget)
    with working_precision(budget.bits_for_index(red.n)):
        return BoundedReal(_magnitude(red, kind, red.n))


def _sign(red: ReducedAngle, kind: SeriesKind) -> Optional[int]:
    """Sign of f(pi n theta), or None if the enclosure straddles a zero."""
    shift = 0 if kind is SeriesKind.SIN else HALF
    lo = math.floor(red.nt_mid - red.nt_rad + shift)
    hi = math.floor(red.nt_mid + red.nt_rad + shift)
    if red.nt_rad > 0 and lo != hi:
        return None
    return 1 if lo % 2 == 0 else -1


def signed_term(n: int, theta, kind, alpha, budget: Optional[PrecisionBudget] = None) -> BoundedReal:
    """Enclosure of f(pi n theta)^n / n^alpha with its sign."""
    kind = SeriesKind.parse(kind)
    alpha = as_alpha(alpha)
    budget = budget or default_budget()
    red = reduce_angle(n, theta, budget)
    n = red.n
    with working_precision(budget.bits_for_index(n)):
        mag = _magnitude(red, kind, n)
        scale = (-to_arb(alpha) * arb(n).log()).exp() if alpha != 0 else arb(1)
        val = mag * scale
        if n % 2 == 0:
            return BoundedReal(val)
        sgn = _sign(red, kind)
        if sgn is None:
            u = val.upper()
            return BoundedReal(arb(0, u))
        return BoundedReal(val if sgn > 0 else -val)


# ------------------------------------------------------------ kernel handoff


@dataclass(frozen=True)
class FixedPointAngle:
    """theta/2 mod 1 as a 128-bit fixed-point integer plus an error bound on that scale."""

    t: int
    err: float

    @property
    def limbs(self):
        from .kernels import split_limbs

        return split_limbs(self.t)


def fixed_point(theta, n_max: int, budget: Optional[PrecisionBudget] = None) -> FixedPointAngle:
    """Fixed-point form of theta for the compiled kernels, valid for indices up to n_max."""
    theta = parse_theta(theta)
    budget = budget or default_budget()
    r = exact_rational(theta)
    if r is not None:
        lo = hi = r.value
    else:
        lo, hi, _ = _theta_bounds(theta, n_max, PrecisionBudget(max(budget.working_digits, 45), budget.target_radius))
        if isinstance(theta, NamedAngle):
            lo, hi = theta.interval(192)
    half = (lo + hi) / 4
    half -= math.floor(half)
    t = math.floor(half * (1 << 128))
    err = (hi - lo) / 4 + Fraction(1, 1 << 128)
    err_f = float(err)
    if err_f < err:
        err_f = math.nextafter(err_f, math.inf)
    return FixedPointAngle(t, err_f)
