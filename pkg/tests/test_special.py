import math

import mpmath as mp
import numpy as np
import pytest

from tailcr.errors import DomainError
from tailcr.special import chi2_1_quantile, normal_cdf, normal_pdf_cdf, normal_quantile, two_sided_z

mp.mp.dps = 40


def mp_quantile(q):
    q = mp.mpf(q)
    if q < 0.5:
        return -float(mp.sqrt(2) * mp.erfinv(1 - 2 * q)) if q > 1e-30 else float(
            mp.findroot(lambda x: mp.log(mp.ncdf(x)) - mp.log(q), -30))
    return float(mp.sqrt(2) * mp.erfinv(2 * q - 1))


@pytest.mark.parametrize("q", [1e-300, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7,
                               0.95, 0.975, 0.999, 1 - 1e-10])
def test_quantile_against_high_precision(q):
    assert normal_quantile(q) == pytest.approx(mp_quantile(q), abs=1e-10, rel=1e-14)


def test_quantile_known_values():
    assert normal_quantile(0.5) == 0.0
    assert normal_quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-12)


def test_quantile_inverse_identity():
    for q in np.linspace(0.001, 0.999, 999):
        assert normal_cdf(normal_quantile(q)) == pytest.approx(q, abs=1e-10)


def test_cdf_quantile_roundtrip_on_range():
    for x in np.linspace(-6, 6, 1201):
        # conditioning: an ulp of the cdf near 1 moves x by about eps / pdf(x)
        tol = 1e-12 + 2.3e-16 / normal_pdf_cdf(x)[0]
        assert normal_quantile(normal_cdf(x)) == pytest.approx(x, abs=tol)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_quantile_domain(q):
    with pytest.raises(DomainError):
        normal_quantile(q)


def test_two_sided_and_chi2():
    assert two_sided_z(0.9) == pytest.approx(1.6448536269514722, abs=1e-12)
    assert two_sided_z(0.95) == pytest.approx(1.959963984540054, abs=1e-12)
    assert chi2_1_quantile(0.9) == pytest.approx(2.705543454095414, abs=1e-10)
    assert chi2_1_quantile(0.95) == pytest.approx(3.841458820694126, abs=1e-10)
    assert two_sided_z(1e-300) == 0.0
    assert chi2_1_quantile(1e-300) == 0.0
    with pytest.raises(DomainError):
        two_sided_z(1.0)


@pytest.mark.parametrize("alpha", [0.01, 0.5, 0.8, 0.9, 0.95, 0.99, 0.999])
def test_chi2_consistency(alpha):
    r = math.sqrt(chi2_1_quantile(alpha))
    assert normal_cdf(r) - normal_cdf(-r) == pytest.approx(alpha, abs=1e-9)


def test_pdf_cdf():
    phi, cdf = normal_pdf_cdf(0.0)
    assert phi == pytest.approx(0.3989422804014327, abs=1e-15)
    assert cdf == 0.5
    for x in np.linspace(-8, 8, 161):
        assert normal_pdf_cdf(x)[1] + normal_pdf_cdf(-x)[1] == pytest.approx(1.0, abs=1e-12)
        assert normal_pdf_cdf(x)[1] == pytest.approx(float(mp.ncdf(x)), abs=1e-12)
    assert normal_pdf_cdf(1.6448536)[1] == pytest.approx(0.95, abs=1e-7)
