"""Censored likelihood-ratio statistic for an extreme quantile.

Maximizing the censored likelihood under the quantile constraint reduces to
one scalar multiplier ``lam`` solving ``g(lam) = 0``, where

    g(lam) = G / (1 - lam G / k) + log((n - lam) p / (k - lam)),
    G = gamma_hat * log(x_p / threshold),

subject to ``1 - lam G / k > 0`` and ``lam < k``. ``g`` is strictly increasing
on that set, so the root is unique and can be bracketed.
"""
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError, NoRootError
from .normal import half_width
from .region import search_region
from .special import chi2_1_quantile
from .tail import hill, weissman_quantile

STAT_FLOOR = -1e-9


@dataclass(frozen=True)
class LrSolution:
    lam: float
    gamma_bar: float
    c_bar: float
    stat: float
    g_residual: float


def _slope(ts, x_p, gamma=None):
    if not x_p > 0:
        raise DomainError("x_p must be positive")
    if gamma is None:
        gamma = hill(ts)
    return gamma * math.log(x_p / ts.threshold)


def feasible_interval(ts, p, x_p, gamma=None):
    """Open interval of multipliers satisfying the positivity constraints."""
    G = _slope(ts, x_p, gamma)
    k = ts.k
    upper = min(k, k / G) if G > 0 else float(k)
    lower = k / G if G < 0 else -math.inf
    return lower, upper


def _g(lam, G, n, k, p):
    return G / (1.0 - lam * G / k) + math.log((n - lam) * p / (k - lam))


def g_eval(lam, ts, p, x_p, gamma=None):
    """Evaluate ``g(lam)``; raises DomainError outside the feasible set."""
    G = _slope(ts, x_p, gamma)
    k = ts.k
    if not (lam < k and 1.0 - lam * G / k > 0):
        raise DomainError(f"multiplier {lam!r} violates the feasibility constraints")
    return _g(lam, G, ts.n, k, p)


def solve_lambda(ts, p, x_p, gamma=None, start=0.0):
    """Unique root of ``g`` on the feasible set.

    The search starts at ``start`` (must be feasible), walks towards the
    relevant feasible limit (geometrically towards a finite limit, by doubling
    towards minus infinity) until ``g`` changes sign, then refines with Brent's
    method.

    Raises:
        NoRootError: if no sign change is found.
    """
    if gamma is None:
        gamma = hill(ts)
    G = _slope(ts, x_p, gamma)
    n, k = ts.n, ts.k
    lower, upper = feasible_interval(ts, p, x_p, gamma)
    if not lower < start < upper:
        raise DomainError(f"start {start!r} outside feasible interval ({lower}, {upper})")

    def g(lam):
        return _g(lam, G, n, k, p)

    g0 = g(start)
    if g0 == 0.0:
        return start
    a = b = start
    ga = gb = g0
    if g0 < 0.0:
        for j in range(1, 1100):
            b = upper - (upper - start) * 0.5 ** j
            if not b < upper:
                break
            gb = g(b)
            if gb > 0.0:
                break
            a, ga = b, gb
    else:
        step = max(1.0, abs(start))
        for j in range(1100):
            if math.isinf(lower):
                a = start - step * 2.0 ** j
            else:
                a = lower + (start - lower) * 0.5 ** (j + 1)
                if not a > lower:
                    break
            ga = g(a)
            if ga < 0.0:
                break
            b, gb = a, ga
    if not (ga < 0.0 < gb):
        raise NoRootError("g has no sign change on the feasible set",
                          {"a": a, "b": b, "g_a": ga, "g_b": gb,
                           "lower": lower, "upper": upper})
    return brentq(g, a, b, xtol=1e-13, rtol=8.9e-16, maxiter=500)


def lr_stat(ts, p, x_p, gamma=None, start=0.0):
    """Likelihood-ratio statistic ``l(x_p)`` with its constrained fit."""
    if gamma is None:
        gamma = hill(ts)
    n, k = ts.n, ts.k
    lam = solve_lambda(ts, p, x_p, gamma, start=start)
    G = _slope(ts, x_p, gamma)
    u = lam * G / k
    gamma_bar = gamma / (1.0 - u)
    c_bar = ts.threshold ** gamma_bar * (k - lam) / (n - lam)
    # log(r) - (r - 1) with r = 1 / (1 - u), written to avoid cancellation
    shape_term = -math.log1p(-u) - u / (1.0 - u)
    stat = (-2.0 * k * shape_term - 2.0 * k * math.log1p(-lam / k)
            + 2.0 * n * math.log1p(-lam / n))
    if stat < STAT_FLOOR:
        raise NoRootError(f"negative likelihood-ratio statistic {stat!r}", {"lam": lam})
    return LrSolution(lam=lam, gamma_bar=gamma_bar, c_bar=c_bar, stat=max(stat, 0.0),
                      g_residual=abs(_g(lam, G, n, k, p)))


def lr_region(ts, p, level, mode="bisect", step=0.1, check_interior=True):
    """Region ``{x_p : l(x_p) <= u_level}`` around the Weissman estimate."""
    g = hill(ts)
    x_hat = weissman_quantile(ts, p, g)
    u = chi2_1_quantile(level)
    w = half_width(ts, p, level, g)
    return search_region(lambda x: lr_stat(ts, p, x, g).stat, x_hat, u,
                         method="lr", level=level, mode=mode, step=step,
                         initial_log_step=abs(w) if w else 0.1,
                         check_interior=check_interior)
