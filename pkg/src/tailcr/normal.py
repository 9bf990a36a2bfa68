"""Normal-approximation interval and its second-order coverage expansion."""
import math
import warnings

from .region import Region
from .special import normal_cdf, normal_pdf, two_sided_z
from .tail import hill, weissman_quantile


def half_width(ts, p, level, gamma=None):
    """Log-scale half width ``z * log(k/(n p)) / (gamma * sqrt(k))``."""
    if gamma is None:
        gamma = hill(ts)
    return two_sided_z(level) * ts.extrapolation(p) / (gamma * math.sqrt(ts.k))


def normal_region(ts, p, level):
    """Interval ``x_hat * exp(-+ w)`` around the Weissman estimate.

    When ``k/(n p) <= 1`` the band collapses or flips; the endpoints are then
    reordered and the case is flagged in ``diagnostics``.
    """
    g = hill(ts)
    x_hat = weissman_quantile(ts, p, g)
    w = half_width(ts, p, level, g)
    diagnostics = {}
    if ts.extrapolation(p) <= 0:
        warnings.warn("k/(n p) <= 1: normal interval is degenerate outside the extrapolation regime")
        diagnostics["no_extrapolation"] = True
    lo, hi = sorted((x_hat * math.exp(-w), x_hat * math.exp(w)))
    return Region(lo=lo, hi=hi, level=level, method="normal", center=x_hat,
                  diagnostics=diagnostics)


def studentized_error(ts, p, x_p):
    """``gamma_hat sqrt(k) / log(k/(n p)) * log(x_hat / x_p)``; N(0,1) in the limit."""
    g = hill(ts)
    x_hat = weissman_quantile(ts, p, g)
    return g * math.sqrt(ts.k) / ts.extrapolation(p) * math.log(x_hat / x_p)


def predicted_coverage(k, n, p, level):
    """Leading-order two-sided coverage ``alpha - z phi(z) / log(k/(n p))**2``."""
    z = two_sided_z(level)
    return level - z * normal_pdf(z) / math.log(k / (n * p)) ** 2


def cdf_expansion(x, k, n, p, gamma, rho, a_val):
    """Second-order approximation to the CDF of the studentized log-quantile error.

    Args:
        x: evaluation point.
        gamma: tail exponent in whichever convention the caller chooses.
        rho: second-order index (< 0).
        a_val: the rate function evaluated at ``n/k``.
    """
    phi = normal_pdf(x)
    lr = math.log(k / (n * p))
    return (normal_cdf(x)
            + phi * (1.0 + 2.0 * x * x) / (3.0 * math.sqrt(k))
            - phi * gamma / (1.0 - rho) * math.sqrt(k) * a_val
            - 0.5 * x * phi / lr ** 2)
