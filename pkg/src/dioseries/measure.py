"""Wallis integrals and the averaged absolute series.

Over theta in (0, 1) the mean of |sin(pi n theta)|^n is 2 I_n / pi with
I_n = int_0^{pi/2} sin^n x dx, so E[T_N] = sum_{n<=N} 2 I_n / (pi n^alpha).
Since I_n ~ sqrt(pi / 2n) the expectation stays bounded exactly when alpha > 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np
from flint import arb, fmpq

from . import kernels
from .ball import BoundedReal, to_arb, working_precision
from .errors import PrecisionExhausted, PreconditionError
from .series import _alpha_float, _check_alpha, _check_N

RNG_NAME = "numpy.random.PCG64"
THETA_BITS = 127
MIN_SAMPLES = 30
CENSUS_THRESHOLD = 1e-3


@dataclass(frozen=True)
class WallisValue:
    """I_n = factor * pi when has_pi (even n), else I_n = factor."""

    n: int
    factor: Fraction
    has_pi: bool
    value: BoundedReal

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "exact": f"({self.factor})*pi" if self.has_pi else str(self.factor),
            "value": self.value.to_json(),
        }


def wallis_factor(n: int) -> Tuple[Fraction, bool]:
    """Exact closed form: pi C(n, n/2) / 2^(n+1) for even n, 2^(n-1) ((n-1)/2)!^2 / n! for odd n."""
    if n % 2 == 0:
        return Fraction(math.comb(n, n // 2), 1 << (n + 1)), True
    h = (n - 1) // 2
    return Fraction((1 << (n - 1)) * math.factorial(h) ** 2, math.factorial(n)), False


def wallis_ball(n: int, bits: int = 128) -> BoundedReal:
    """sqrt(pi) Gamma((n+1)/2) / (2 Gamma(n/2 + 1)), via log-gamma so large n stays cheap."""
    with working_precision(bits):
        a = arb(n + 1) / 2
        b = arb(n) / 2 + 1
        return BoundedReal(arb.pi().sqrt() * (a.lgamma() - b.lgamma()).exp() / 2)


def wallis(n: int) -> WallisValue:
    if int(n) != n or n < 0:
        raise PreconditionError("n must be a non-negative integer")
    n = int(n)
    factor, has_pi = wallis_factor(n)
    return WallisValue(n, factor, has_pi, wallis_ball(n))


def wallis_factors(n_max: int) -> Iterator[Tuple[int, fmpq]]:
    """Rational parts of I_0 .. I_{n_max} from I_n = (n-1)/n I_{n-2}, starting at I_0 = pi/2, I_1 = 1."""
    prev2, prev1 = fmpq(1, 2), fmpq(1)
    yield 0, prev2
    if n_max >= 1:
        yield 1, prev1
    for n in range(2, n_max + 1):
        cur = prev2 * fmpq(n - 1, n)
        yield n, cur
        prev2, prev1 = prev1, cur


def wallis_identity_holds(n_max: int) -> bool:
    """n I_n I_{n-1} = pi/2 for 1 <= n <= n_max, as an exact rational identity (one factor carries pi)."""
    half = fmpq(1, 2)
    prev = None
    for n, f in wallis_factors(n_max):
        if prev is not None and n * f * prev != half:
            return False
        prev = f
    return True


def _weights(N: int, bits: int):
    """Balls for w_n = 2 I_n / pi, n = 1..N; w_0 = 1, w_1 = 2/pi, w_n = w_{n-2} (n-1)/n."""
    with working_precision(bits):
        out = []
        w2, w1 = arb(1), 2 / arb.pi()
        out.append(w1)
        for n in range(2, N + 1):
            w = w2 * (n - 1) / n
            out.append(w)
            w2, w1 = w1, w
        return out


def expected_abs_sum(alpha, N: int, bits: int = 96) -> BoundedReal:
    """sum_{n<=N} 2 I_n / (pi n^alpha)."""
    alpha = _check_alpha(alpha)
    N = _check_N(N)
    with working_precision(bits):
        a = to_arb(alpha)
        s = arb(0)
        for n, w in enumerate(_weights(N, bits), start=1):
            s += w * arb(n) ** (-a)
        return BoundedReal(s)


def increment_exponent(alpha, n_lo: int = 1000, n_hi: int = 100000, points: int = 20) -> float:
    """Fitted d log(2 I_n / (pi n^alpha)) / d log n; about -(alpha + 1/2)."""
    a = float(_check_alpha(alpha))
    ns = np.unique(np.geomspace(n_lo, n_hi, points).astype(np.int64))
    vals = [float(wallis_ball(int(n)).ball.mid()) * 2 / math.pi / n**a for n in ns]
    return float(np.polyfit(np.log(ns), np.log(vals), 1)[0])


@dataclass(frozen=True)
class MonteCarloReport:
    alpha: Fraction
    N: int
    sample_count: int
    seed: int
    rng: str
    mean: float
    std_error: float
    expected: BoundedReal
    z_score: float
    within_3se: bool
    max_sample_radius: float
    tail_threshold: float
    tail_below_fraction: float

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "N": self.N,
            "samples": self.sample_count,
            "seed": self.seed,
            "rng": self.rng,
            "theta_bits": THETA_BITS,
            "mean": self.mean,
            "std_error": self.std_error,
            "expected": self.expected.to_json(),
            "z_score": self.z_score,
            "within_3se": self.within_3se,
            "max_sample_radius": self.max_sample_radius,
            "tail_threshold": self.tail_threshold,
            "tail_below_fraction": self.tail_below_fraction,
        }


def sample_thetas(samples: int, seed: int) -> list:
    """theta = T / 2^127 with T uniform on [1, 2^127); returned as the integers T."""
    gen = np.random.Generator(np.random.PCG64(seed))
    out = []
    while len(out) < samples:
        hi, lo = (int(x) for x in gen.integers(0, 1 << 64, size=2, dtype=np.uint64))
        t = ((hi << 64) | lo) >> 1
        if t:
            out.append(t)
    return out


def mc_estimate(alpha, N: int, samples: int = 200, seed: int = 0, backend: Optional[str] = None) -> MonteCarloReport:
    """Sample mean of T_N(theta) = sum_{n<=N} |sin(pi n theta)|^n / n^alpha against its exact expectation."""
    alpha = _check_alpha(alpha)
    if isinstance(N, int) and N > kernels.MAX_INDEX:
        raise PrecisionExhausted(f"N={N} beyond the {THETA_BITS}-bit sample precision")
    N = _check_N(N)
    if int(samples) != samples or samples < MIN_SAMPLES:
        raise PreconditionError(f"samples must be at least {MIN_SAMPLES}, got {samples}")
    samples, seed = int(samples), int(seed)
    be = kernels.get_backend(backend)
    af, ae = _alpha_float(alpha)
    half = N // 2
    values, radii, tails = [], [], []
    # theta/2 = T / 2^128 exactly, so the fixed-point angle carries no error
    for t in sample_thetas(samples, seed):
        limbs = kernels.split_limbs(t)
        head = be.angle_sum(limbs, 0.0, False, False, af, ae, 1, half + 1)
        tail = be.angle_sum(limbs, 0.0, False, False, af, ae, half + 1, N + 1)
        values.append(head[0] + tail[0])
        radii.append(head[1] + head[2] + tail[1] + tail[2])
        tails.append(tail[0])
    v = np.array(values)
    mean = float(math.fsum(values) / samples)
    se = float(v.std(ddof=1) / math.sqrt(samples))
    expected = expected_abs_sum(alpha, N)
    z = (mean - float(expected)) / se if se > 0 else math.inf
    below = float(np.mean(np.array(tails) < CENSUS_THRESHOLD))
    return MonteCarloReport(
        alpha, N, samples, seed, RNG_NAME, mean, se, expected, float(z), abs(z) <= 3.0,
        float(max(radii)), CENSUS_THRESHOLD, below,
    )
