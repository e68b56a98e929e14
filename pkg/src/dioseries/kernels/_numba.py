"""Compiled loops.  Compensated (Neumaier) summation over the whole range."""

import numpy as np
from numba import njit

from . import _scalar

U = _scalar.U
TINY = _scalar.TINY

_angle_term = njit(cache=True)(_scalar.angle_term)
_power_term = njit(cache=True)(_scalar.power_term)
_pair_term = njit(cache=True)(_scalar.pair_term)


@njit(cache=True)
def _finish(s, comp, rad, abs_s, count):
    total = s + comp
    err = 4.0 * U * abs(total) + 8.0 * count * U * U * abs_s + TINY
    grow = 1.0 + 2.0 * count * U
    return total, err, rad * grow, abs_s * grow


@njit(cache=True)
def periodic_sum(logb, logb_rad, sgn, alpha, alpha_err, n_start, n_stop):
    period = logb.shape[0]
    s = 0.0
    comp = 0.0
    rad = 0.0
    abs_s = 0.0
    for n in range(n_start, n_stop):
        r = n % period
        v, rr = _power_term(n, logb[r], logb_rad[r], sgn[r], alpha, alpha_err)
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        rad += rr
        abs_s += abs(v)
    return _finish(s, comp, rad, abs_s, n_stop - n_start)


@njit(cache=True)
def progression_sum(lb, lb_rad, sg, a, step, count, alpha, alpha_err):
    s = 0.0
    comp = 0.0
    rad = 0.0
    abs_s = 0.0
    for l in range(count):
        n = a + step * l
        v, rr = _power_term(n, lb, lb_rad, sg, alpha, alpha_err)
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        rad += rr
        abs_s += abs(v)
    return _finish(s, comp, rad, abs_s, count)


@njit(cache=True)
def pair_sum(c, d, step, count, alpha, alpha_err):
    s = 0.0
    comp = 0.0
    rad = 0.0
    abs_s = 0.0
    delta = float(d - c)
    for l in range(count):
        v, rr = _pair_term(float(step * l + c), delta, alpha, alpha_err)
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        rad += rr
        abs_s += abs(v)
    return _finish(s, comp, rad, abs_s, count)


@njit(cache=True)
def angle_sum(limbs, theta_err, kind_cos, signed, alpha, alpha_err, n_start, n_stop):
    c1, c2, c3, c4 = limbs[0], limbs[1], limbs[2], limbs[3]
    s = 0.0
    comp = 0.0
    rad = 0.0
    abs_s = 0.0
    for n in range(n_start, n_stop):
        _, _, v, rr = _angle_term(n, c1, c2, c3, c4, theta_err, kind_cos, signed, alpha, alpha_err)
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
        rad += rr
        abs_s += abs(v)
    return _finish(s, comp, rad, abs_s, n_stop - n_start)


@njit(cache=True)
def angle_terms(limbs, theta_err, kind_cos, signed, alpha, alpha_err, n_start, n_stop):
    c1, c2, c3, c4 = limbs[0], limbs[1], limbs[2], limbs[3]
    m = n_stop - n_start
    e = np.empty(m)
    e_err = np.empty(m)
    val = np.empty(m)
    rad = np.empty(m)
    for i in range(m):
        e[i], e_err[i], val[i], rad[i] = _angle_term(
            n_start + i, c1, c2, c3, c4, theta_err, kind_cos, signed, alpha, alpha_err
        )
    return e, e_err, val, rad
