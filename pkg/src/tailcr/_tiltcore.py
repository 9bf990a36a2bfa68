"""Compiled kernels for the tilting solver.

The outer multiplier is carried as ``e1 = 1 + lambda1`` (zero at uniform
weights) to avoid cancellation near the solution at the point estimate.
Status codes: 0 ok, 1 target outside (Z_k, Z_1), 2 no sign change,
3 iteration limit, 4 tail mass A1 outside (0, 1) or equal to p.
"""
import math

import numpy as np
from numba import njit

OK, INFEASIBLE, NO_SIGN_CHANGE, MAXITER, BAD_MASS = 0, 1, 2, 3, 4
EPS = 2.220446049250313e-16
H_TOL = 1e-15


@njit(cache=True)
def tilted_moments(z, lam):
    """Return (f, f') where f(lam) = sum e^{-lam z} z / sum e^{-lam z}."""
    m = -np.inf
    for i in range(z.size):
        v = -lam * z[i]
        if v > m:
            m = v
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for i in range(z.size):
        w = math.exp(-lam * z[i] - m)
        s0 += w
        s1 += w * z[i]
        s2 += w * z[i] * z[i]
    f = s1 / s0
    var = s2 / s0 - f * f
    if var < 0.0:
        var = 0.0
    return f, -var


@njit(cache=True)
def log_sum_exp_scaled(z, lam):
    """log sum_i exp(-lam z_i), max-shifted."""
    m = -np.inf
    for i in range(z.size):
        v = -lam * z[i]
        if v > m:
            m = v
    s = 0.0
    for i in range(z.size):
        s += math.exp(-lam * z[i] - m)
    return m + math.log(s)


@njit(cache=True)
def solve_inner(z, t):
    """Root of the decreasing f(lam) = t; z sorted nonincreasing.

    Safeguarded Newton inside a doubling bracket.
    """
    if not (z[z.size - 1] < t < z[0]):
        return INFEASIBLE, math.nan
    f0, d0 = tilted_moments(z, 0.0)
    if f0 == t:
        return OK, 0.0
    if t < f0:
        lo, hi = 0.0, 1.0
        found = False
        for _ in range(1100):
            fh, dh = tilted_moments(z, hi)
            if fh <= t:
                found = True
                break
            lo = hi
            hi *= 2.0
    else:
        lo, hi = -1.0, 0.0
        found = False
        for _ in range(1100):
            fl, dl = tilted_moments(z, lo)
            if fl >= t:
                found = True
                break
            hi = lo
            lo *= 2.0
    if not found:
        return MAXITER, math.nan
    x = 0.5 * (lo + hi)
    for _ in range(400):
        f, d = tilted_moments(z, x)
        r = f - t
        if r == 0.0:
            return OK, x
        if r > 0.0:
            lo = x
        else:
            hi = x
        if abs(r) <= 1e-15 * max(1.0, abs(t)) or hi - lo <= 4e-16 * max(1.0, abs(x)):
            return OK, x
        nx = x - r / d if d < 0.0 else 0.5 * (lo + hi)
        if not (lo < nx < hi):
            nx = 0.5 * (lo + hi)
        x = nx
    return OK, x


@njit(cache=True)
def tail_mass(e1, n, k):
    """A1 = 1 - ((n-k)/n) exp(-e1), written around its value k/n at e1 = 0."""
    return k / n - (n - k) / n * math.expm1(-e1)


@njit(cache=True)
def outer_h(e1, z, n, k, p, lx):
    """h = sum of exceedance weights - A1, after the inner solve at this e1.

    Returns (status, h, lam_hat, t, a1, log(a1/p), c0) with ``c0`` the common
    part of the exceedance log-weights, log(n q_i) = c0 - lam_hat z_i.
    """
    a1 = tail_mass(e1, n, k)
    if not (0.0 < a1 < 1.0):
        return BAD_MASS, math.nan, math.nan, math.nan, a1, math.nan, math.nan
    lap = math.log(a1 / p)
    if lap == 0.0:
        return BAD_MASS, math.nan, math.nan, math.nan, a1, lap, math.nan
    t = lx / lap
    st, lam = solve_inner(z, t)
    if st != OK:
        return st, math.nan, math.nan, t, a1, lap, math.nan
    c0 = -e1 + lam * (t - t * t / lx)
    h = math.exp(c0 + log_sum_exp_scaled(z, lam)) / n - a1
    return OK, h, lam, t, a1, lap, c0


@njit(cache=True)
def _feasible_toward_zero(e, z, n, k, p, lx):
    """Shrink e towards 0 until the inner problem is feasible."""
    for _ in range(80):
        st, h, lam, t, a1, lap, c0 = outer_h(e, z, n, k, p, lx)
        if st == OK:
            return OK, e, h
        e *= 0.5
    return st, e, math.nan


@njit(cache=True)
def solve_outer(z, n, k, p, lx, e_lo, e_hi, expansions):
    """Root of h on [e_lo, e_hi] by Illinois false position (stops at |h| <= 1e-15).

    The bracket is widened (x2 on both sides) up to ``expansions`` times when
    its endpoints do not straddle zero. Returns (status, e1, h_lo, h_hi).
    """
    e_min = math.log1p(-k / n)
    st_a, a, fa = _feasible_toward_zero(e_lo, z, n, k, p, lx)
    st_b, b, fb = _feasible_toward_zero(e_hi, z, n, k, p, lx)
    rounds = 0
    while st_a == OK and st_b == OK and fa * fb > 0.0 and rounds < expansions:
        rounds += 1
        na = 2.0 * a
        if na <= e_min:
            na = 0.5 * (a + e_min)
        st_a, a, fa = _feasible_toward_zero(na, z, n, k, p, lx)
        st_b, b, fb = _feasible_toward_zero(2.0 * b, z, n, k, p, lx)
    if st_a != OK or st_b != OK:
        return INFEASIBLE, math.nan, fa, fb
    if fa == 0.0:
        return OK, a, fa, fb
    if fb == 0.0:
        return OK, b, fa, fb
    if fa * fb > 0.0:
        return NO_SIGN_CHANGE, math.nan, fa, fb
    h_lo, h_hi = fa, fb
    for _ in range(400):
        c = b - fb * (b - a) / (fb - fa)
        if not (min(a, b) < c < max(a, b)):
            c = 0.5 * (a + b)
        st, fc, lam, t, a1, lap, c0 = outer_h(c, z, n, k, p, lx)
        if st != OK:
            c = 0.5 * (a + b)
            st, fc, lam, t, a1, lap, c0 = outer_h(c, z, n, k, p, lx)
            if st != OK:
                return st, math.nan, h_lo, h_hi
        if abs(fc) <= H_TOL or abs(b - a) <= 4.0 * EPS * abs(c) + 1e-300:
            return OK, c, h_lo, h_hi
        if fc * fb < 0.0:
            a, fa = b, fb
        else:
            fa *= 0.5
        b, fb = c, fc
    if abs(fb) <= 1e-12:
        return OK, b, h_lo, h_hi
    return MAXITER, b, h_lo, h_hi
