"""Order-statistic view of a sample and the censored-likelihood estimators.

Everything downstream depends on the data only through the random threshold
``X_{n,n-k}`` and the log-spacings ``Z_i = log(X_{n,n-i+1} / X_{n,n-k})``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EstimationError, InvalidInputError


@dataclass(frozen=True)
class TailSample:
    """Top-k summary of a positive sample.

    Attributes:
        n: total sample size.
        k: number of upper order statistics above the threshold.
        threshold: the (k+1)-th largest value, ``X_{n,n-k}``.
        z: log-spacings ``Z_1 >= ... >= Z_k >= 0`` (read-only array).
    """

    n: int
    k: int
    threshold: float
    z: np.ndarray

    @property
    def log_ratio(self):
        """``log(k / n)``; with ``p`` gives the extrapolation factor."""
        return math.log(self.k / self.n)

    def extrapolation(self, p):
        """``log(k / (n p))``, the log distance from the threshold level to ``p``."""
        return math.log(self.k / (self.n * p))


def make_tail_sample(data, k):
    """Sort a copy of ``data`` and extract the top-``k`` log-spacings.

    Ties with the threshold are kept as zero spacings so that exactly ``k``
    exceedance slots exist by order-statistic position.

    Raises:
        InvalidInputError: if ``k`` is out of range or the threshold is not positive.
    """
    x = np.asarray(data, dtype=float).ravel()
    n = x.size
    k = int(k)
    if not 1 <= k < n:
        raise InvalidInputError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("data contains non-finite values")
    top = np.sort(x)[::-1][: k + 1]
    threshold = float(top[k])
    if not threshold > 0:
        raise InvalidInputError(
            f"threshold X(n-k) = {threshold!r} must be > 0; reduce k or filter the data"
        )
    z = np.log(top[:k] / threshold)
    z.setflags(write=False)
    return TailSample(n=n, k=k, threshold=threshold, z=z)


def hill(ts):
    """Hill estimate of the tail exponent: ``1 / mean(Z)``."""
    m = float(np.mean(ts.z))
    if not m > 0:
        raise EstimationError("all log-spacings are zero; Hill estimator undefined")
    return 1.0 / m


def c_hat(ts, gamma):
    """Scale estimate ``(k/n) * threshold**gamma``."""
    return ts.k / ts.n * ts.threshold ** gamma


def weissman_quantile(ts, p, gamma=None):
    """Extreme quantile estimate ``threshold * (k/(n p))**(1/gamma)``."""
    if not 0 < p < 1:
        raise DomainError(f"tail probability must lie in (0, 1), got {p!r}")
    if gamma is None:
        gamma = hill(ts)
    return ts.threshold * math.exp(ts.extrapolation(p) / gamma)


def censored_loglik(ts, gamma, c):
    """Censored log-likelihood of the Pareto tail model at the random threshold.

    ``k log(c gamma) - (gamma+1) sum log X_top + (n-k) log(1 - c T**-gamma)``
    """
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    tail_mass = c * ts.threshold ** (-gamma)
    if not 0 < tail_mass < 1:
        raise DomainError(f"censoring probability c*T^-gamma = {tail_mass!r} outside (0, 1)")
    sum_log_top = ts.k * math.log(ts.threshold) + float(np.sum(ts.z))
    return (ts.k * math.log(c * gamma) - (gamma + 1.0) * sum_log_top
            + (ts.n - ts.k) * math.log1p(-tail_mass))


@dataclass(frozen=True)
class TailFit:
    gamma_hat: float
    c_hat: float
    x_hat_p: float
    p: float


def fit_tail(ts, p):
    g = hill(ts)
    return TailFit(gamma_hat=g, c_hat=c_hat(ts, g), x_hat_p=weissman_quantile(ts, p, g), p=p)
