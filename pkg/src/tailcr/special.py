"""Standard normal and chi-square(1) kernels.

Only ``math`` is used so results are identical on every platform that ships
a correctly rounded ``erfc``.
"""
import math

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Wichura (1988), algorithm AS 241 (PPND16). Coefficients in increasing power.
_A = (3.387132872796366608, 133.14166789178437745, 1971.5909503065514427,
      13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
      33430.575583588128105, 2509.0809287301226727)
_B = (1.0, 42.313330701600911252, 687.1870074920579083, 5394.1960214247511077,
      21213.794301586595867, 39307.89580009271061, 28729.085735721942674,
      5226.495278852545925)
_C = (1.42343711074968357734, 4.6303378461565452959, 5.7694972214606914055,
      3.64784832476320460504, 1.27045825245236838258, 0.24178072517745061177,
      0.0227238449892691845833, 7.7454501427834140764e-4)
_D = (1.0, 2.05319162663775882187, 1.6763848301838038494,
      0.68976733498510000455, 0.14810397642748007459, 0.0151986665636164571966,
      5.475938084995344946e-4, 1.05075007164441684324e-9)
_E = (6.6579046435011037772, 5.4637849111641143699, 1.7848265399172913358,
      0.29656057182850489123, 0.026532189526576123093, 0.0012426609473880784386,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 0.59983220655588793769, 0.13692988092273580531,
      0.014875361290850615025, 7.868691311456132591e-4, 1.8463183175100546818e-5,
      1.4215117583164458887e-7, 2.04426310338993978564e-15)


def _poly(coef, x):
    acc = 0.0
    for c in reversed(coef):
        acc = acc * x + c
    return acc


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {alpha!r}")


def normal_pdf(x):
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def normal_cdf(x):
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x):
    """Upper tail 1 - Phi(x), accurate for large positive x."""
    return 0.5 * math.erfc(x / _SQRT2)


def normal_pdf_cdf(x):
    """Return ``(phi(x), Phi(x))`` for the standard normal."""
    return normal_pdf(x), normal_cdf(x)


def normal_quantile(q):
    """Inverse of the standard normal CDF.

    A rational approximation gives ~1e-16 relative accuracy; one Newton step
    against ``erfc`` removes any residual from coefficient rounding.

    Raises:
        DomainError: if ``q`` is not strictly inside (0, 1).
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {q!r}")
    r = q - 0.5
    if abs(r) <= 0.425:
        s = 0.180625 - r * r
        x = r * _poly(_A, s) / _poly(_B, s)
    else:
        s = q if r < 0.0 else 1.0 - q
        s = math.sqrt(-math.log(s))
        if s <= 5.0:
            s -= 1.6
            x = _poly(_C, s) / _poly(_D, s)
        else:
            s -= 5.0
            x = _poly(_E, s) / _poly(_F, s)
        if r < 0.0:
            x = -x
    # Newton polish on whichever tail keeps the residual well conditioned.
    if x > 0.0:
        resid = (1.0 - q) - normal_sf(x)
    else:
        resid = normal_cdf(x) - q
    return x - resid / normal_pdf(x)


def two_sided_z(alpha):
    """z with P(|N(0,1)| <= z) = alpha."""
    _check_level(alpha)
    return normal_quantile(0.5 + 0.5 * alpha)


def chi2_1_quantile(alpha):
    """Level-``alpha`` critical point of chi-square with one degree of freedom."""
    z = two_sided_z(alpha)
    return z * z
