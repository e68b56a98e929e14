"""Vectorized fallback.  Same term formulas as the compiled path; sums use math.fsum per block."""

import math

import numpy as np

from ._scalar import C, INV_2_63, M31, M32, PI, Q62, TINY, U

BLOCK = 1 << 20


def _power_block(n, lb, lb_rad, sg, alpha, alpha_err):
    ln_n = np.log(n.astype(np.float64))
    nf = n.astype(np.float64)
    x = nf * lb - alpha * ln_n
    dx = nf * lb_rad + alpha_err * ln_n + C * (nf * np.abs(lb) + alpha * ln_n + np.abs(x)) + C
    v = np.exp(x)
    r = v * np.expm1(dx) * (1.0 + C) + TINY
    zero = sg == 0
    v = np.where(sg < 0, -v, v)
    v = np.where(zero, 0.0, v)
    r = np.where(zero, 0.0, r)
    return v, r


def angle_block(n, limbs, theta_err, kind_cos, signed, alpha, alpha_err):
    c1, c2, c3, c4 = (np.int64(c) for c in limbs)
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
    q = np.int64(Q62)
    dint = np.where(f63 <= q, f63, q - (f63 - q))
    dhalf = q - dint
    if kind_cos:
        e = dint.astype(np.float64) * INV_2_63
        d = dhalf.astype(np.float64) * INV_2_63
    else:
        e = dhalf.astype(np.float64) * INV_2_63
        d = dint.astype(np.float64) * INV_2_63
    nf = n.astype(np.float64)
    common = 2.0 * nf * theta_err + 2.0 ** -62
    e_err = common + U * e
    d_err = common + U * d
    ln_n = np.log(nf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        near = e <= 0.25
        s = np.sin(0.5 * PI * e)
        t = 2.0 * s * s
        g_near = np.log1p(-t)
        g_near_round = C * (np.abs(g_near) + t)
        ehi = np.minimum(e + e_err, 0.3)
        g_near_in = PI * np.tan(PI * ehi) * e_err
        d_safe = np.where(near, 0.25, d)
        g_far = np.log(np.sin(PI * d_safe))
        g_far_round = C * (1.0 + np.abs(g_far))
        g_far_in = d_err / (d_safe - d_err)
        g = np.where(near, g_near, g_far)
        g_tot = np.where(near, g_near_round + g_near_in, g_far_round + g_far_in)
        x = nf * g - alpha * ln_n
        dx = nf * g_tot + alpha_err * ln_n + C * (nf * np.abs(g) + alpha * ln_n + np.abs(x)) + C
        v = np.exp(x)
        r = v * np.expm1(dx) * (1.0 + C) + TINY
        if signed:
            odd = (n & 1) == 1
            if kind_cos:
                pos = ((parity == 0) & (f63 < q)) | ((parity == 1) & (f63 > q))
            else:
                pos = parity == 0
            v = np.where(odd & ~pos, -v, v)
        zero = d - d_err <= 0.0
        if zero.any():
            base = np.minimum(PI * (d + d_err), 1.0)
            hi = np.exp(nf * np.log(base) - (alpha - alpha_err) * ln_n) * (1.0 + C) + TINY
            if signed:
                odd_zero = zero & ((n & 1) == 1)
                v = np.where(odd_zero, 0.0, np.where(zero, 0.5 * hi, v))
                r = np.where(odd_zero, hi, np.where(zero, 0.5 * hi, r))
            else:
                v = np.where(zero, 0.5 * hi, v)
                r = np.where(zero, 0.5 * hi, r)
    return e, e_err, v, r


class _Acc:
    def __init__(self):
        self.sums = []
        self.rads = []
        self.abss = []
        self.count = 0

    def add(self, v, r):
        self.sums.append(math.fsum(v))
        self.rads.append(math.fsum(r))
        self.abss.append(math.fsum(np.abs(v)))
        self.count += len(v)

    def finish(self):
        total = math.fsum(self.sums)
        # each block fsum is correctly rounded; the final fsum is too
        err = U * math.fsum(abs(x) for x in self.sums) + U * abs(total) + TINY
        grow = 1.0 + 4.0 * U * (len(self.sums) + 2)
        return total, err, math.fsum(self.rads) * grow, math.fsum(self.abss) * grow


def _ranges(n_start, n_stop):
    for lo in range(n_start, n_stop, BLOCK):
        yield np.arange(lo, min(lo + BLOCK, n_stop), dtype=np.int64)


def periodic_sum(logb, logb_rad, sgn, alpha, alpha_err, n_start, n_stop):
    period = len(logb)
    acc = _Acc()
    for n in _ranges(n_start, n_stop):
        r = n % period
        v, rr = _power_block(n, logb[r], logb_rad[r], sgn[r], alpha, alpha_err)
        acc.add(v, rr)
    return acc.finish()


def progression_sum(lb, lb_rad, sg, a, step, count, alpha, alpha_err):
    acc = _Acc()
    for l in _ranges(0, count):
        n = a + step * l
        sgv = np.full(len(n), sg)
        v, rr = _power_block(n, lb, lb_rad, sgv, alpha, alpha_err)
        acc.add(v, rr)
    return acc.finish()


def pair_sum(c, d, step, count, alpha, alpha_err):
    acc = _Acc()
    delta = float(d - c)
    for l in _ranges(0, count):
        x = (step * l + c).astype(np.float64)
        ln_x = np.log(x)
        u = delta / x
        z = alpha * np.log1p(u)
        v = np.exp(-alpha * ln_x) * -np.expm1(-z)
        rel = (
            C * (2.0 * alpha * ln_x + 8.0 + 4.0 / (1.0 + u) + 2.0 * np.abs(z))
            + alpha_err * ln_x
            + (1.0 + np.abs(z)) * alpha_err / alpha
        )
        acc.add(v, np.abs(v) * rel + TINY)
    return acc.finish()


def angle_sum(limbs, theta_err, kind_cos, signed, alpha, alpha_err, n_start, n_stop):
    acc = _Acc()
    for n in _ranges(n_start, n_stop):
        _, _, v, r = angle_block(n, limbs, theta_err, kind_cos, signed, alpha, alpha_err)
        acc.add(v, r)
    return acc.finish()


def angle_terms(limbs, theta_err, kind_cos, signed, alpha, alpha_err, n_start, n_stop):
    n = np.arange(n_start, n_stop, dtype=np.int64)
    return angle_block(n, limbs, theta_err, kind_cos, signed, alpha, alpha_err)
