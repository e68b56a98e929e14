"""Per-term float64 kernels with rigorous a-priori error radii.

Plain Python so numba can compile them.  Error model: every libm call
(sin, tan, log, log1p, exp, expm1) is assumed accurate to 8 units in the
last place; ``C`` below is 16u, which covers compound rounding with margin.

Angle representation: theta/2 mod 1 as a 128-bit fixed-point integer split
into four 32-bit limbs c1 (most significant) .. c4.  For n < 2**31 every
limb product fits in int64, so frac(n*theta/2) is exact up to dropping the
two lowest limbs of the result.
"""

import math

U = 2.0 ** -53
C = 16.0 * U
TINY = 1e-300
INV_2_63 = 2.0 ** -63
Q62 = 1 << 62
M32 = 0xFFFFFFFF
M31 = 0x7FFFFFFF
PI = math.pi


def reduce_fixed(n, c1, c2, c3, c4):
    """Return (parity of floor(n*theta), frac(n*theta) * 2**63) as int64."""
    acc = n * c4
    carry = acc >> 32
    acc = n * c3 + carry
    carry = acc >> 32
    acc = n * c2 + carry
    r2 = acc & M32
    carry = acc >> 32
    acc = n * c1 + carry
    r1 = acc & M32
    parity = r1 >> 31
    f63 = ((r1 & M31) << 32) | r2
    return parity, f63


def angle_term(n, c1, c2, c3, c4, theta_err, kind_cos, signed, alpha, alpha_err):
    """(e, e_err, value, radius) for the n-th term.

    e is the distance of n*theta to the nearest point where |f| = 1, so that
    |f(pi n theta)| = cos(pi e).  value is |f|^n / n^alpha, signed if asked.
    """
    # inlined reduce_fixed: numba cannot call an uncompiled helper
    acc = n * c4
    acc = n * c3 + (acc >> 32)
    acc = n * c2 + (acc >> 32)
    r2 = acc & M32
    acc = n * c1 + (acc >> 32)
    r1 = acc & M32
    parity = r1 >> 31
    f63 = ((r1 & M31) << 32) | r2
    if f63 <= Q62:
        dint = f63
    else:
        dint = Q62 - (f63 - Q62)
    dhalf = Q62 - dint
    if kind_cos:
        e = float(dint) * INV_2_63
        d = float(dhalf) * INV_2_63
    else:
        e = float(dhalf) * INV_2_63
        d = float(dint) * INV_2_63
    common = 2.0 * n * theta_err + 2.0 ** -62
    e_err = common + U * e
    d_err = common + U * d
    ln_n = math.log(n)
    if d - d_err <= 0.0:
        # magnitude may vanish: |f| = sin(pi d) <= pi d
        dhi = d + d_err
        base = PI * dhi
        if base > 1.0:
            base = 1.0
        hi = math.exp(n * math.log(base) - (alpha - alpha_err) * ln_n) * (1.0 + C) + TINY
        if signed and (n & 1) == 1:
            return e, e_err, 0.0, hi
        return e, e_err, 0.5 * hi, 0.5 * hi
    if e <= 0.25:
        s = math.sin(0.5 * PI * e)
        t = 2.0 * s * s
        g = math.log1p(-t)
        g_round = C * (abs(g) + t)
        ehi = e + e_err
        if ehi > 0.3:
            ehi = 0.3
        g_in = PI * math.tan(PI * ehi) * e_err
    else:
        g = math.log(math.sin(PI * d))
        g_round = C * (1.0 + abs(g))
        g_in = d_err / (d - d_err)
    x = n * g - alpha * ln_n
    dx = n * (g_round + g_in) + alpha_err * ln_n + C * (n * abs(g) + alpha * ln_n + abs(x)) + C
    v = math.exp(x)
    r = v * math.expm1(dx) * (1.0 + C) + TINY
    if signed and (n & 1) == 1:
        if kind_cos:
            pos = (parity == 0 and f63 < Q62) or (parity == 1 and f63 > Q62)
        else:
            pos = parity == 0
        if not pos:
            v = -v
    return e, e_err, v, r


def power_term(n, lb, lb_rad, sg, alpha, alpha_err):
    """sg * exp(n*lb - alpha*log n) with its radius; lb = log|base|."""
    if sg == 0:
        return 0.0, 0.0
    ln_n = math.log(n)
    x = n * lb - alpha * ln_n
    dx = n * lb_rad + alpha_err * ln_n + C * (n * abs(lb) + alpha * ln_n + abs(x)) + C
    v = math.exp(x)
    r = v * math.expm1(dx) * (1.0 + C) + TINY
    if sg < 0:
        v = -v
    return v, r


def pair_term(x, delta, alpha, alpha_err):
    """x^-alpha - (x + delta)^-alpha without cancellation, with its radius."""
    ln_x = math.log(x)
    u = delta / x
    y = math.log1p(u)
    z = alpha * y
    w = -math.expm1(-z)
    v = math.exp(-alpha * ln_x) * w
    rel = (
        C * (2.0 * alpha * ln_x + 8.0 + 4.0 / (1.0 + u) + 2.0 * abs(z))
        + alpha_err * ln_x
        + (1.0 + abs(z)) * alpha_err / alpha
    )
    return v, abs(v) * rel + TINY
