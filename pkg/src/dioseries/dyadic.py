"""Non-negative integers as sums of distinct powers of two with possibly symbolic exponents.

The Liouville schedule grows like a tower of exponentials: the fourth exponent
already has ~10^72 binary digits.  Writing each value as sum_i 2^(E_i), where an
exponent E_i is a plain int when it fits and another Dyadic otherwise, keeps
every quantity exact.  The binary representation is unique, so structural
equality is numeric equality.
"""

from __future__ import annotations

from collections import Counter
from functools import cmp_to_key
from typing import Iterable, Union

# exponents at or below this many bits stay plain ints
INT_EXP_BITS = 4096

Exp = Union[int, "Dyadic"]


def _norm_exp(e) -> Exp:
    if isinstance(e, Dyadic):
        small = e.as_small_int()
        return small if small is not None else e
    return int(e)


def _exp_add(a: Exp, b: Exp) -> Exp:
    if isinstance(a, int) and isinstance(b, int):
        r = a + b
        if r.bit_length() <= INT_EXP_BITS:
            return r
    return _norm_exp(Dyadic.of(a) + Dyadic.of(b))


def _exp_cmp(a: Exp, b: Exp) -> int:
    ai, bi = isinstance(a, int), isinstance(b, int)
    if ai and bi:
        return (a > b) - (a < b)
    if ai:
        return -1  # symbolic exponents are always larger than int ones
    if bi:
        return 1
    return a.compare(b)


_exp_key = cmp_to_key(_exp_cmp)


class Dyadic:
    __slots__ = ("exps", "_hash")

    def __init__(self, exps: Iterable[Exp] = ()):
        counts = Counter(_norm_exp(e) for e in exps)
        # carry: 2^E + 2^E = 2^(E+1)
        while True:
            dup = next((e for e, c in counts.items() if c >= 2), None)
            if dup is None:
                break
            c = counts.pop(dup)
            if c % 2:
                counts[dup] = 1
            counts[_exp_add(dup, 1)] += c // 2
        self.exps = frozenset(e for e, c in counts.items() if c)
        self._hash = hash(self.exps)

    @classmethod
    def of(cls, x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        x = int(x)
        if x < 0:
            raise ValueError("Dyadic values are non-negative")
        return cls(i for i in range(x.bit_length()) if (x >> i) & 1)

    @classmethod
    def pow2(cls, e) -> "Dyadic":
        return cls([e])

    def as_small_int(self, max_bits: int = INT_EXP_BITS):
        if not all(isinstance(e, int) for e in self.exps):
            return None
        if self.exps and max(self.exps) >= max_bits:
            return None
        return sum(1 << e for e in self.exps)

    def to_int(self) -> int:
        v = self.as_small_int(max_bits=1 << 24)
        if v is None:
            raise OverflowError("value too large to materialize")
        return v

    @property
    def is_int(self) -> bool:
        return self.as_small_int(max_bits=1 << 24) is not None

    # arithmetic
    def __add__(self, other) -> "Dyadic":
        other = Dyadic.of(other)
        return Dyadic(list(self.exps) + list(other.exps))

    __radd__ = __add__

    def shift(self, k) -> "Dyadic":
        """self * 2^k."""
        return Dyadic(_exp_add(e, k) for e in self.exps)

    def __mul__(self, other) -> "Dyadic":
        other = Dyadic.of(other)
        return Dyadic(_exp_add(a, b) for a in self.exps for b in other.exps)

    __rmul__ = __mul__

    # ordering
    def _sorted(self):
        return sorted(self.exps, key=_exp_key, reverse=True)

    def compare(self, other) -> int:
        other = Dyadic.of(other)
        a, b = self._sorted(), other._sorted()
        for x, y in zip(a, b):
            c = _exp_cmp(x, y)
            if c:
                return c
        return (len(a) > len(b)) - (len(a) < len(b))

    def __eq__(self, other):
        if isinstance(other, int):
            other = Dyadic.of(other) if other >= 0 else None
        return isinstance(other, Dyadic) and self.exps == other.exps

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __str__(self) -> str:
        v = self.as_small_int(max_bits=1 << 16)
        if v is not None:
            return str(v)
        parts = []
        for e in self._sorted():
            parts.append("2^" + (str(e) if isinstance(e, int) and e >= 0 else f"({e})"))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Dyadic({self})"
