"""Confidence regions and the shared endpoint search used by the LR and tilt methods."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import TailcrError, UnboundedRegionError

METHODS = ("normal", "lr", "tilt")
ENDPOINT_TOL = 1e-6
MAX_DOUBLINGS = 60
INTERIOR_CHECKS = 32


@dataclass
class Region:
    """A confidence set ``[lo, hi]`` for an extreme quantile.

    ``endpoint_residuals`` holds ``|stat(lo) - u|`` and ``|stat(hi) - u|``
    (zero for the closed-form normal interval).
    """

    lo: float
    hi: float
    level: float
    method: str
    center: float
    endpoint_residuals: tuple = (0.0, 0.0)
    diagnostics: dict = field(default_factory=dict)

    @property
    def length(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi


def _safe(stat, x):
    """Statistic value, with solver failures mapped to +inf (outside the region)."""
    try:
        v = stat(x)
    except TailcrError:
        return math.inf
    return v if math.isfinite(v) else math.inf


def _crossing(stat, log_center, direction, u, step, counters):
    """Locate where ``stat`` first exceeds ``u`` walking away from the center.

    Works on the log scale: the offset doubles until the statistic exceeds
    ``u``, then the crossing is refined inside the last bracket.
    Returns ``(x, residual)``.
    """
    def phi(offset):
        v = _safe(stat, math.exp(log_center + direction * offset))
        if math.isinf(v):
            counters["infeasible"] += 1
        return v - u

    inside, outside = 0.0, step
    f_out = phi(outside)
    n = 0
    while f_out <= 0.0:
        n += 1
        if n > MAX_DOUBLINGS:
            raise UnboundedRegionError(
                f"statistic stayed below {u:g} out to log-offset {outside:g}")
        inside, outside = outside, 2.0 * outside
        f_out = phi(outside)
    # Pull an infeasible outer end back until the statistic is finite there,
    # so Brent sees a continuous function.
    for _ in range(200):
        if math.isfinite(f_out):
            break
        mid = 0.5 * (inside + outside)
        f_mid = phi(mid)
        if f_mid <= 0.0:
            inside = mid
        else:
            outside, f_out = mid, f_mid
        if outside - inside <= 1e-15 * max(1.0, outside):
            break
    if not math.isfinite(f_out):
        counters["boundary"] += 1
        x = math.exp(log_center + direction * outside)
        return x, math.inf
    f_in = phi(inside)
    if f_in == 0.0:
        root = inside
    else:
        root = brentq(phi, inside, outside, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    resid = abs(phi(root))
    if resid > ENDPOINT_TOL:
        # refine by plain bisection on the sign change
        lo, hi = inside, outside
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if phi(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, hi):
                break
        root = hi if abs(phi(hi)) < abs(phi(lo)) else lo
        resid = abs(phi(root))
    return math.exp(log_center + direction * root), resid


def _step_side(stat, center, direction, u, delta, counters, max_steps=10_000_000):
    """Additive scan: move by ``delta`` until the statistic exceeds ``u``."""
    x = center
    for _ in range(max_steps):
        nxt = x + direction * delta
        if nxt <= 0.0:
            return x, math.nan
        v = _safe(stat, nxt)
        if math.isinf(v):
            counters["infeasible"] += 1
        if v > u:
            return nxt, abs(v - u) if math.isfinite(v) else math.inf
        x = nxt
    raise UnboundedRegionError(f"step scan did not leave the region in {max_steps} steps")


def search_region(stat, center, u, *, method, level, mode="bisect", step=None,
                  initial_log_step=0.1, check_interior=True):
    """Maximal interval around ``center`` on which ``stat <= u``.

    Args:
        stat: callable ``x -> statistic``; may raise ``TailcrError`` where undefined.
        center: a point with ``stat(center) <= u`` (the point estimate).
        u: critical value.
        mode: ``"bisect"`` (doubling in log x, then root refinement) or
            ``"step"`` (additive scan with increment ``step``).
        initial_log_step: first offset in log x for bisect mode.
        check_interior: evaluate the statistic at interior points and fall back
            to a fine additive scan if any exceeds ``u``.
    """
    counters = {"infeasible": 0, "boundary": 0}
    diagnostics = {"mode": mode}
    if mode == "step":
        if step is None or not step > 0:
            raise ValueError("step mode needs a positive step")
        lo, r_lo = _step_side(stat, center, -1.0, u, step, counters)
        hi, r_hi = _step_side(stat, center, +1.0, u, step, counters)
    elif mode == "bisect":
        log_c = math.log(center)
        lo, r_lo = _crossing(stat, log_c, -1.0, u, initial_log_step, counters)
        hi, r_hi = _crossing(stat, log_c, +1.0, u, initial_log_step, counters)
        if check_interior:
            grid = np.exp(np.linspace(math.log(lo), math.log(hi), INTERIOR_CHECKS + 2)[1:-1])
            bad = [x for x in grid if _safe(stat, x) > u + ENDPOINT_TOL]
            if bad:
                diagnostics["multimodal"] = True
                fine = (hi - lo) / 400.0
                lo, r_lo = _step_side(stat, center, -1.0, u, fine, counters)
                hi, r_hi = _step_side(stat, center, +1.0, u, fine, counters)
    else:
        raise ValueError(f"unknown region mode {mode!r}")
    diagnostics.update(counters)
    return Region(lo=lo, hi=hi, level=level, method=method, center=center,
                  endpoint_residuals=(r_lo, r_hi), diagnostics=diagnostics)
