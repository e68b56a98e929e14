"""Decision tables for rational theta = p/q and the residue structure behind them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from flint import arb, fmpq

from .angles import Rational, SeriesKind
from .ball import BoundedReal, working_precision
from .errors import NotReduced, ZeroDenominator

ALPHA_RANGE = "(0, 1]"


class ConvergenceClass(enum.Enum):
    DIVERGES = "diverges_to_plus_infinity"
    CONDITIONAL = "converges_conditionally"
    ABSOLUTE = "converges_absolutely"


def _reduced(p: int, q: int, reduce: bool = True) -> Tuple[int, int, bool]:
    if q == 0:
        raise ZeroDenominator(f"zero denominator in {p}/0")
    r = Rational(p, q)
    if r.was_reduced and not reduce:
        raise NotReduced(f"{p}/{q} is not in lowest terms")
    return r.p, r.q, r.was_reduced


def _solve_linear(p: int, c: int, m: int) -> Optional[int]:
    """Least a in [1, m] with a p = c (mod m), if any."""
    g = math.gcd(p, m)
    if c % g:
        return None
    p, c, mm = p // g, c // g, m // g
    a = (c * pow(p % mm, -1, mm)) % mm if mm > 1 else 0
    return a if a > 0 else mm


def find_a0(kind, p: int, q: int) -> Optional[int]:
    """The residue a0 solving the case congruence, or None when it does not apply."""
    kind = SeriesKind.parse(kind)
    p, q, _ = _reduced(p, q)
    if kind is SeriesKind.COS:
        if p % 2 == 0:
            return None
        return _solve_linear(p, q, 2 * q)
    if q % 2 == 1:
        return None
    if q % 4 == 2:
        return _solve_linear(p, q // 2, 2 * q)
    a = _solve_linear(p, q // 2, q)
    return a


def paired_residue(kind, p: int, q: int) -> Optional[int]:
    """Partner of a0: 2q - a0 when q = 2 (mod 4) for sin, q + a0 when 4 | q, 2q for cos."""
    kind = SeriesKind.parse(kind)
    p, q, _ = _reduced(p, q)
    a0 = find_a0(kind, p, q)
    if a0 is None:
        return None
    if kind is SeriesKind.COS:
        return 2 * q
    return 2 * q - a0 if q % 4 == 2 else q + a0


# exact values of cos(pi * k / 12) for k = 0..23
_SQ2 = "sqrt(2)/2"
_SQ3 = "sqrt(3)/2"
_COS_TABLE = {0: "1", 2: _SQ3, 3: _SQ2, 4: "1/2", 6: "0", 8: "-1/2", 9: "-" + _SQ2, 10: "-" + _SQ3, 12: "-1"}


def _symbolic_cos(x: Fraction) -> Optional[str]:
    """cos(pi x) as a symbol when x is a multiple of 1/4 or 1/6."""
    y = x * 12
    if y.denominator != 1:
        return None
    k = int(y) % 24
    if k > 12:
        k = 24 - k
    return _COS_TABLE.get(k)


def _symbol_value(sym: str) -> arb:
    neg = sym.startswith("-")
    s = sym.lstrip("-")
    if s == _SQ2:
        v = arb(2).sqrt() / 2
    elif s == _SQ3:
        v = arb(3).sqrt() / 2
    else:
        v = arb(Fraction(s).numerator) / Fraction(s).denominator
    return -v if neg else v


@dataclass(frozen=True)
class ResidueBase:
    a: int
    base: BoundedReal
    symbol: Optional[str]
    unit: bool
    # sign of base^n along n = a + 2 l q; n has the parity of a, so it is constant
    sign: int

    @property
    def sign_pattern(self) -> str:
        return {1: "+1", -1: "-1", 0: "0"}[self.sign]


def _base_position(kind: SeriesKind, a: int, p: int, q: int) -> Fraction:
    """x with base(a) = cos(pi x)."""
    x = Fraction(a * p, q)
    return x if kind is SeriesKind.COS else x - Fraction(1, 2)


def residue_bases(kind, p: int, q: int, bits: int = 128) -> List[ResidueBase]:
    """Bases f(pi a p / q) for a = 1..2q with unit flags and signs along each class."""
    kind = SeriesKind.parse(kind)
    p, q, _ = _reduced(p, q)
    out = []
    with working_precision(bits):
        for a in range(1, 2 * q + 1):
            x = _base_position(kind, a, p, q)
            x2 = x - 2 * math.floor(x / 2)
            sym = _symbolic_cos(x2)
            if sym is not None:
                val = _symbol_value(sym)
            else:
                val = arb(fmpq(x2.numerator, x2.denominator)).cos_pi()
            # unit-ness by congruence: cos(pi x) = +-1 iff x is an integer
            unit = x.denominator == 1
            zero = (2 * x).denominator == 1 and not unit
            if zero:
                sign = 0
            else:
                # cos(pi x) > 0 iff floor(x + 1/2) is even
                positive = math.floor(x2 + Fraction(1, 2)) % 2 == 0
                sign = 1 if positive or a % 2 == 0 else -1
            out.append(ResidueBase(a, BoundedReal(val), sym, unit, sign))
    return out


@dataclass(frozen=True)
class ClassificationReport:
    kind: SeriesKind
    p: int
    q: int
    cls: ConvergenceClass
    unit_residues: List[Tuple[int, int]]
    a0: Optional[int]
    paired: Optional[int]
    a0_base: Optional[int]
    witness: str
    reduced_from: Optional[Tuple[int, int]] = None
    alpha_range: str = field(default=ALPHA_RANGE)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "p": self.p,
            "q": self.q,
            "class": self.cls.value,
            "unit_residues": [{"a": a, "sign_pattern": "+1" if s > 0 else "-1"} for a, s in self.unit_residues],
            "a0": self.a0,
            "paired_residue": self.paired,
            "a0_base": self.a0_base,
            "witness": self.witness,
            "reduced_from": list(self.reduced_from) if self.reduced_from else None,
            "alpha_range": self.alpha_range,
        }


def _class_from_table(kind: SeriesKind, p: int, q: int) -> Tuple[ConvergenceClass, str]:
    if kind is SeriesKind.COS:
        if p % 2 == 0 or q % 2 == 0:
            which = "p" if p % 2 == 0 else "q"
            return ConvergenceClass.DIVERGES, f"{which} even"
        return ConvergenceClass.CONDITIONAL, "p and q odd"
    if q % 2 == 1:
        return ConvergenceClass.ABSOLUTE, "q odd"
    if q % 4 == 2:
        return ConvergenceClass.CONDITIONAL, "q = 2 (mod 4)"
    return ConvergenceClass.DIVERGES, "q = 0 (mod 4)"


def classify(kind, p: int, q: int, reduce: bool = True) -> ClassificationReport:
    """Convergence class of the series for theta = p/q, uniform in alpha on (0, 1]."""
    kind = SeriesKind.parse(kind)
    p0, q0 = int(p), int(q)
    p, q, was_reduced = _reduced(p0, q0, reduce)
    cls, why = _class_from_table(kind, p, q)
    units = []
    for a in range(1, 2 * q + 1):
        x = _base_position(kind, a, p, q)
        if x.denominator == 1:
            # base is (-1)^x; raised to n = a (mod 2)
            sign = -1 if (x.numerator % 2 and a % 2) else 1
            units.append((a, sign))
    a0 = find_a0(kind, p, q)
    a0_base = None
    paired = None
    if a0 is not None:
        x = _base_position(kind, a0, p, q)
        a0_base = -1 if x.numerator % 2 else 1
        paired = paired_residue(kind, p, q)
    return ClassificationReport(
        kind, p, q, cls, units, a0, paired, a0_base, why, (p0, q0) if was_reduced else None
    )
