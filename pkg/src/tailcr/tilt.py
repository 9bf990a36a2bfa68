"""Data-tilting statistic for an extreme quantile (Kullback-Leibler distance).

The weights minimizing ``sum q_i log(n q_i)`` under the quantile constraint
have the closed form

    censored:   n q_i = exp(-1 - lambda1)
    exceedance: n q_i = exp(-1 - lambda1 + lambda2 * (L/A2 - 1/A1 - A1 Z_i L / A2**2))

with ``L = log(x_p / threshold)``, ``A1 = 1 - ((n-k)/n) exp(-1 - lambda1)`` and
``A2 = A1 L / log(A1 / p)``. For fixed ``lambda1`` the exceedance weights are
an exponential tilt ``exp(-lam Z_i)`` whose tilted mean must hit
``t = L / log(A1 / p)``; the inner problem solves that for ``lam``. The outer
problem picks ``lambda1`` so the weights sum to one.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _tiltcore as core
from .errors import DomainError, EstimationError, InfeasibleTargetError, InvalidInputError, NoRootError
from .normal import half_width
from .region import search_region
from .special import chi2_1_quantile
from .tail import hill, weissman_quantile

OUTER_EXPANSIONS = 8
STAT_FLOOR = -1e-9


def distance(q, rho0=1.0):
    """Power-divergence distance of weights ``q`` from the uniform weights.

    ``rho0 = 1`` is ``sum q log(n q)``, ``rho0 = 0`` is ``-mean(log(n q))``;
    other values use ``(1 - mean((n q)**rho0)) / (rho0 (1 - rho0))``.
    ``0 log 0`` is taken as 0; a zero weight gives ``inf`` when ``rho0 <= 0``.

    Raises:
        InvalidInputError: if a weight is negative or the weights do not sum to 1.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise InvalidInputError("weights must be nonnegative")
    if abs(q.sum() - 1.0) > 1e-8:
        raise InvalidInputError(f"weights must sum to 1 (sum = {q.sum()!r})")
    n = q.size
    nq = n * q
    if rho0 == 1.0:
        pos = nq > 0
        return float(np.sum(q[pos] * np.log(nq[pos])))
    if rho0 == 0.0:
        if np.any(nq == 0):
            return math.inf
        return float(-np.mean(np.log(nq)))
    if rho0 < 0 and np.any(nq == 0):
        return math.inf
    return float((1.0 - np.mean(nq ** rho0)) / (rho0 * (1.0 - rho0)))


def tilted_fit(q_exceed, ts):
    """Weighted censored-likelihood fit ``(gamma(q), c(q))``.

    Only the exceedance weights enter: ``gamma(q) = sum q_i / sum q_i Z_i`` and
    ``c(q) = threshold**gamma(q) * sum q_i``.
    """
    q = np.asarray(q_exceed, dtype=float)
    if q.size != ts.k:
        raise InvalidInputError(f"need {ts.k} exceedance weights, got {q.size}")
    s = float(np.sum(q))
    w = float(np.dot(q, ts.z))
    if not (s > 0 and w > 0):
        raise EstimationError("degenerate weighted log-spacings")
    gamma = s / w
    return gamma, ts.threshold ** gamma * s


def _log_ratio(ts, x_p):
    if not x_p > 0:
        raise DomainError("x_p must be positive")
    return math.log(x_p / ts.threshold)


def weights_from_multipliers(lambda1, lambda2, x_p, ts, p):
    """Weights from the Lagrange multipliers, straight from the closed form.

    Returns ``(q_exceed, q_below)``: the ``k`` exceedance weights (ordered like
    ``ts.z``) and the common weight of the ``n - k`` censored points.

    Raises:
        DomainError: if ``A1`` is outside (0, 1) or ``log(A1/p) = 0``.
    """
    n, k = ts.n, ts.k
    L = _log_ratio(ts, x_p)
    s = math.exp(-1.0 - lambda1)
    a1 = 1.0 - (n - k) / n * s
    if not 0 < a1 < 1:
        raise DomainError(f"A1 = {a1!r} outside (0, 1)")
    lap = math.log(a1 / p)
    if lap == 0:
        raise DomainError("log(A1/p) = 0")
    a2 = a1 * L / lap
    expo = -1.0 - lambda1 + lambda2 * (L / a2 - 1.0 / a1 - a1 * ts.z * L / a2 ** 2)
    return np.exp(expo) / n, s / n


def inner_solve(lambda1, x_p, ts, p):
    """Solve the tilted-mean equation at fixed ``lambda1``.

    Returns ``(lam_hat, lambda2)``.

    Raises:
        InfeasibleTargetError: if the target mean lies outside ``(Z_k, Z_1)``.
    """
    n, k = ts.n, ts.k
    L = _log_ratio(ts, x_p)
    a1 = float(core.tail_mass(1.0 + lambda1, float(n), float(k)))
    if not 0 < a1 < 1:
        raise DomainError(f"A1 = {a1!r} outside (0, 1)")
    lap = math.log(a1 / p)
    t = L / lap
    st, lam = core.solve_inner(ts.z, t)
    if st == core.INFEASIBLE:
        raise InfeasibleTargetError(
            f"region endpoint beyond tiltable range: target {t:g} not in "
            f"({ts.z[-1]:g}, {ts.z[0]:g})")
    if st != core.OK:
        raise NoRootError("inner tilt solve failed", {"target": t, "status": st})
    return lam, lam * a1 * t / lap


def outer_bracket(ts, p):
    """Default bracket for ``1 + lambda1``.

    ``-log(1 + d) <= 1 + lambda1 <= -log(1 - d)`` with
    ``d = sqrt(k log(k/(n p))) / (n - k)``; ``d`` is capped at 1/2 when the
    formula is undefined or too wide.
    """
    n, k = ts.n, ts.k
    lr = ts.extrapolation(p)
    d = math.sqrt(k * lr) / (n - k) if lr > 0 else math.nan
    if d >= 0.5:
        d = 0.5
    elif not d > 0:
        d = min(0.5, 1.0 / math.sqrt(k))
    return -math.log1p(d), -math.log1p(-d)


@dataclass(frozen=True)
class TiltSolution:
    lambda1: float
    lambda2: float
    lambda_hat: float
    q_exceed: np.ndarray
    q_below: float
    n_below: int
    stat: float
    residuals: tuple
    target: float
    bracket_h: tuple

    @property
    def weights(self):
        """All ``n`` weights: exceedances first, then the censored block."""
        return np.concatenate([self.q_exceed, np.full(self.n_below, self.q_below)])


def _psi(e):
    """u log u - u + 1 at u = exp(e); nonnegative, exact to O(eps e^2)."""
    return e * np.exp(e) - np.expm1(e)


def outer_solve(x_p, ts, p, expansions=OUTER_EXPANSIONS):
    """Full tilting solution and statistic ``L(x_p) = 2 n D(q)``.

    Raises:
        InfeasibleTargetError: the inner problem is infeasible across the bracket.
        NoRootError: the outer equation has no sign change after expansion.
    """
    n, k = ts.n, ts.k
    L = _log_ratio(ts, x_p)
    e_lo, e_hi = outer_bracket(ts, p)
    st, e1, h_lo, h_hi = core.solve_outer(ts.z, float(n), float(k), float(p), L,
                                          e_lo, e_hi, expansions)
    if st == core.INFEASIBLE:
        raise InfeasibleTargetError(
            "region endpoint beyond tiltable range: inner target outside (Z_k, Z_1)")
    if st != core.OK:
        raise NoRootError("no sign change in the weight-sum equation",
                          {"h_lo": h_lo, "h_hi": h_hi, "status": st})
    st, h, lam, t, a1, lap, c0 = core.outer_h(e1, ts.z, float(n), float(k), float(p), L)
    log_nq = c0 - lam * ts.z
    q_exc = np.exp(log_nq) / n
    q_below = math.exp(-e1) / n
    # sum (u log u - u + 1) equals sum u log u on the constraint sum u = n
    stat = 2.0 * float((n - k) * _psi(-e1) + np.sum(_psi(log_nq)))
    if stat < STAT_FLOOR:
        raise NoRootError(f"negative tilting statistic {stat!r}", {"e1": e1})
    s = float(q_exc.sum())
    w = float(np.dot(q_exc, ts.z))
    sum_resid = abs(s + (n - k) * q_below - 1.0)
    quant_resid = abs(s / w * L - math.log(s / p))
    return TiltSolution(lambda1=e1 - 1.0, lambda2=lam * a1 * t / lap, lambda_hat=lam,
                        q_exceed=q_exc, q_below=q_below, n_below=n - k, stat=max(stat, 0.0),
                        residuals=(sum_resid, quant_resid), target=t,
                        bracket_h=(h_lo, h_hi))


def tilt_stat(ts, p, x_p):
    return outer_solve(x_p, ts, p).stat


def tilt_region(ts, p, level, mode="bisect", step=0.1, check_interior=True):
    """Region ``{x_p : L(x_p) <= u_level}`` around the Weissman estimate.

    Probe points where the tilt is infeasible count as outside the region;
    ``diagnostics["infeasible"]`` records how many were hit.
    """
    g = hill(ts)
    x_hat = weissman_quantile(ts, p, g)
    u = chi2_1_quantile(level)
    w = half_width(ts, p, level, g)
    return search_region(lambda x: outer_solve(x, ts, p).stat, x_hat, u,
                         method="tilt", level=level, mode=mode, step=step,
                         initial_log_step=abs(w) if w else 0.1,
                         check_interior=check_interior)
