"""Burr and Frechet models used as simulation ground truth.

Both families have closed-form upper quantiles, so every "true" quantile in
the simulation harness comes from exact inversion rather than a root search.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class SecondOrder:
    """Second-order regular variation parameters.

    ``gamma`` is the tail exponent of ``1 - F`` (``1 - F(x) ~ x**-gamma``);
    ``rate`` is the function ``t -> A(t)``.
    """

    gamma: float
    rho: float
    rate: Callable[[float], float]

    @property
    def extreme_value_index(self):
        """The reciprocal convention ``1/gamma``."""
        return 1.0 / self.gamma

    def gamma_as(self, convention="exponent"):
        if convention == "exponent":
            return self.gamma
        if convention == "index":
            return self.extreme_value_index
        raise ValueError(f"unknown gamma convention {convention!r}")


@dataclass(frozen=True)
class HeavyDist:
    """A Burr(a, b) or Frechet(a) distribution on (0, inf).

    Burr: ``F(x) = 1 - (1 + x**(b-a))**(-a/(b-a))`` with ``b > a > 0``.
    Frechet: ``F(x) = exp(-x**-a)`` with ``a > 0``.
    """

    kind: str
    a: float
    b: float = float("nan")

    def __post_init__(self):
        if self.kind == "burr":
            if not (self.a > 0 and self.b > self.a):
                raise InvalidInputError(f"Burr requires b > a > 0, got a={self.a}, b={self.b}")
        elif self.kind == "frechet":
            if not self.a > 0:
                raise InvalidInputError(f"Frechet requires a > 0, got a={self.a}")
        else:
            raise InvalidInputError(f"unknown distribution kind {self.kind!r}")

    @classmethod
    def burr(cls, a, b):
        return cls("burr", float(a), float(b))

    @classmethod
    def frechet(cls, a):
        return cls("frechet", float(a))

    @property
    def label(self):
        if self.kind == "burr":
            return f"burr({self.a:g},{self.b:g})"
        return f"frechet({self.a:g})"

    def cdf(self, x):
        return cdf(self, x)

    def sf(self, x):
        return survival(self, x)

    def upper_quantile(self, p):
        return upper_quantile(self, p)


def _as_positive(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("x must be strictly positive")
    return arr


def survival(dist, x):
    """``1 - F(x)`` evaluated without cancellation in the far tail."""
    arr = _as_positive(x)
    if dist.kind == "burr":
        d = dist.b - dist.a
        out = np.exp(-(dist.a / d) * np.log1p(arr ** d))
    else:
        out = -np.expm1(-arr ** -dist.a)
    return out if out.ndim else float(out)


def cdf(dist, x):
    """Distribution function F(x) for x > 0.

    Raises:
        DomainError: for nonpositive ``x``.
    """
    arr = _as_positive(x)
    if dist.kind == "burr":
        d = dist.b - dist.a
        out = -np.expm1(-(dist.a / d) * np.log1p(arr ** d))
    else:
        out = np.exp(-arr ** -dist.a)
    return out if out.ndim else float(out)


def upper_quantile(dist, p):
    """The x with ``1 - F(x) = p``, by exact inversion.

    Raises:
        DomainError: if ``p`` is not strictly inside (0, 1).
    """
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("tail probability must lie in (0, 1)")
    if dist.kind == "burr":
        d = dist.b - dist.a
        # p**(-d/a) - 1, kept accurate as p -> 1
        out = np.expm1(-(d / dist.a) * np.log(arr)) ** (1.0 / d)
    else:
        out = (-np.log1p(-arr)) ** (-1.0 / dist.a)
    return out if out.ndim else float(out)


def uniforms(rng, n):
    """``n`` i.i.d. uniforms on the open interval (0, 1).

    Built from 52 random bits as ``(m + 0.5) / 2**52``: every value and its
    complement ``1 - u`` is exactly representable, so neither endpoint can
    occur (heavy-tailed inversion diverges there).
    """
    m = rng.integers(0, 2 ** 52, size=n, dtype=np.int64)
    return (m + 0.5) / 2.0 ** 52


def sample(dist, n, rng):
    """Draw ``n`` values by inverse transform: ``x_i = upper_quantile(dist, 1 - u_i)``."""
    if n < 1:
        raise InvalidInputError("sample size must be at least 1")
    u = uniforms(rng, n)
    return upper_quantile(dist, 1.0 - u)


def second_order(dist):
    """Second-order parameters ``(gamma, rho, A)`` of the model.

    ``gamma`` uses the exponent convention (both families have exponent a).
    """
    a = dist.a
    if dist.kind == "burr":
        d = dist.b - a
        rho = -d / a
        return SecondOrder(gamma=a, rho=rho, rate=lambda t: t ** (-d / a) / a)
    return SecondOrder(gamma=a, rho=-1.0, rate=lambda t: 1.0 / (2.0 * a * t))


def parse_dist(kind, a, b=None):
    """Build a HeavyDist from CLI-style arguments."""
    kind = kind.lower()
    if kind == "burr":
        if b is None:
            raise InvalidInputError("Burr needs both --a and --b")
        return HeavyDist.burr(a, b)
    if kind in ("frechet", "fréchet"):
        return HeavyDist.frechet(a)
    raise InvalidInputError(f"unknown distribution {kind!r} (expected burr or frechet)")
