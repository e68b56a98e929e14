"""Midpoint-radius enclosures backed by Arb balls (python-flint).

All arithmetic is rounded outward by Arb, so an enclosure is never narrower
than the mathematics requires.  Working precision is process-global in
python-flint; use :func:`working_precision` around a computation.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from flint import arb, ctx, fmpq, fmpz

Number = Union[int, float, Fraction, "BoundedReal"]

LOG2_10 = math.log2(10.0)
DEFAULT_DIGITS_ENV = "DIOSERIES_DIGITS"


@contextmanager
def working_precision(bits: int):
    with ctx.workprec(int(bits)):
        yield


def _arb_to_fraction(x: arb) -> Fraction:
    """Exact value of an exact (zero-radius) arb."""
    man, exp = x.man_exp()
    man, exp = int(man), int(exp)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def to_arb(x) -> arb:
    if isinstance(x, BoundedReal):
        return x.ball
    if isinstance(x, arb):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return arb(fmpz(x.numerator))
        return arb(fmpq(x.numerator, x.denominator))
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return arb(fmpz(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return arb(x)
    if isinstance(x, str):
        return to_arb(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an enclosure")


class BoundedReal:
    """A real number known to lie in ``[mid - rad, mid + rad]``."""

    __slots__ = ("ball",)

    def __init__(self, ball: arb):
        if not isinstance(ball, arb):
            ball = to_arb(ball)
        self.ball = ball

    @classmethod
    def exact(cls, x) -> "BoundedReal":
        """Enclosure of ``x`` at the current working precision (exact when dyadic)."""
        return cls(to_arb(x))

    @classmethod
    def from_mid_rad(cls, mid, rad) -> "BoundedReal":
        if rad < 0:
            raise ValueError("radius must be non-negative")
        return cls(to_arb(mid) + arb(0, to_arb(rad)))

    @classmethod
    def from_bounds(cls, lo, hi) -> "BoundedReal":
        lo, hi = Fraction(lo), Fraction(hi)
        if hi < lo:
            raise ValueError("empty interval")
        return cls.from_mid_rad((lo + hi) / 2, (hi - lo) / 2)

    @property
    def mid(self) -> Fraction:
        return _arb_to_fraction(self.ball.mid())

    @property
    def rad(self) -> Fraction:
        return _arb_to_fraction(self.ball.rad())

    @property
    def lower(self) -> Fraction:
        return _arb_to_fraction(self.ball.lower())

    @property
    def upper(self) -> Fraction:
        return _arb_to_fraction(self.ball.upper())

    @property
    def is_exact(self) -> bool:
        return self.ball.is_exact()

    def __float__(self) -> float:
        return float(self.ball.mid())

    def rad_float(self) -> float:
        """Radius as a float rounded upward."""
        r = float(self.ball.rad())
        return math.nextafter(r, math.inf) if r > 0 else 0.0

    def contains(self, other) -> bool:
        if isinstance(other, (Fraction, int, float, str)) and not isinstance(other, bool):
            # exact comparison; converting a non-dyadic rational would round it
            x = Fraction(other)
            return self.lower <= x <= self.upper
        return bool(self.ball.contains(to_arb(other)))

    def overlaps(self, other) -> bool:
        return bool(self.ball.overlaps(to_arb(other)))

    def inflate(self, r) -> "BoundedReal":
        return BoundedReal(self.ball + arb(0, to_arb(abs(r))))

    def abs(self) -> "BoundedReal":
        return BoundedReal(abs(self.ball))

    def __neg__(self):
        return BoundedReal(-self.ball)

    def __abs__(self):
        return self.abs()

    def __add__(self, other):
        return BoundedReal(self.ball + to_arb(other))

    __radd__ = __add__

    def __sub__(self, other):
        return BoundedReal(self.ball - to_arb(other))

    def __rsub__(self, other):
        return BoundedReal(to_arb(other) - self.ball)

    def __mul__(self, other):
        return BoundedReal(self.ball * to_arb(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return BoundedReal(self.ball / to_arb(other))

    def __rtruediv__(self, other):
        return BoundedReal(to_arb(other) / self.ball)

    def __repr__(self) -> str:
        return f"BoundedReal({self.ball.str(20, radius=True)})"

    def to_json(self, digits: int = 25) -> dict:
        """Decimal midpoint plus an upward-rounded radius that also covers printing error."""
        mid = self.ball.mid()
        mid_str = mid.str(digits, radius=False) if not mid.is_zero() else "0"
        printed = Fraction(mid_str.replace("e", "E")) if mid_str != "0" else Fraction(0)
        slack = abs(self.mid - printed)
        rad = self.rad + slack
        rad_f = float(rad)
        if rad_f < rad:
            rad_f = math.nextafter(rad_f, math.inf)
        return {"mid": mid_str, "rad": repr(rad_f)}


@dataclass(frozen=True)
class PrecisionBudget:
    """Working decimal digits for enclosure arithmetic and the radius a reduction must reach."""

    working_digits: int = 30
    target_radius: float = 1e-15

    def __post_init__(self):
        if self.working_digits < 10:
            raise ValueError("working_digits must be >= 10")
        if not self.target_radius > 0:
            raise ValueError("target_radius must be positive")

    @property
    def bits(self) -> int:
        return int(math.ceil(self.working_digits * LOG2_10)) + 8

    def bits_for_index(self, n: int) -> int:
        """Bits needed so that multiplying by ``n`` keeps ``working_digits`` digits."""
        return self.bits + max(int(n), 1).bit_length() + 16

    @classmethod
    def for_index(cls, n_max: int, output_digits: int = 16) -> "PrecisionBudget":
        """ceil(log10 n_max) + output digits + 10 guard digits."""
        lost = math.ceil(math.log10(max(n_max, 1))) if n_max > 1 else 0
        return cls(working_digits=lost + output_digits + 10, target_radius=10.0 ** (-output_digits))

    def scaled(self, factor: int) -> "PrecisionBudget":
        return PrecisionBudget(self.working_digits * factor, self.target_radius)


def default_budget() -> PrecisionBudget:
    digits = os.environ.get(DEFAULT_DIGITS_ENV)
    if digits:
        return PrecisionBudget(working_digits=int(digits))
    return PrecisionBudget()
