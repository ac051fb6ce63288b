import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from wpclink.channel import (EffectiveChannel, NakagamiLink, ccdf, effective,
                             pdf, sample)
from wpclink.specfun import gamma_upper_int, reg_lower_gamma


def test_effective_combining():
    ch = effective(NakagamiLink(m=2, n_antennas=3, mean_gain=1.0))
    assert ch.shape == 6 and ch.rate == pytest.approx(2.0)


def test_effective_rayleigh_case():
    # m = 1 single antenna reduces to an exponential gain
    ch = effective(NakagamiLink(m=1, n_antennas=1, mean_gain=0.5))
    assert ch.shape == 1 and ch.rate == pytest.approx(2.0)


def test_effective_rate_arithmetic():
    ch = effective(NakagamiLink(m=5, n_antennas=2, mean_gain=3.012e-5))
    assert ch.shape == 10
    assert ch.rate == pytest.approx(5 / 3.012e-5, rel=1e-12)
    assert ch.rate == pytest.approx(166003, rel=1e-4)


def test_link_validation():
    with pytest.raises(ValueError):
        NakagamiLink(m=0, n_antennas=1, mean_gain=1.0)
    with pytest.raises(ValueError):
        NakagamiLink(m=1, n_antennas=1, mean_gain=0.0)
    with pytest.raises(ValueError):
        EffectiveChannel(shape=2, rate=-1.0)


def test_pdf_exponential_at_origin():
    ch = EffectiveChannel(shape=1, rate=2.0)
    assert pdf(ch, 0.0) == 2.0


def test_pdf_shape2_value():
    ch = EffectiveChannel(shape=2, rate=1.0)
    assert pdf(ch, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_pdf_normalizes():
    ch = EffectiveChannel(shape=6, rate=2.0)
    val, err = scipy_quad(lambda x: pdf(ch, x), 0.0, 60.0)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_pdf_domain_error():
    with pytest.raises(ValueError):
        pdf(EffectiveChannel(1, 1.0), -0.1)


def test_ccdf_full_mass_at_zero():
    for shape, rate in [(1, 1.0), (4, 0.3), (12, 66400.0)]:
        assert ccdf(EffectiveChannel(shape, rate), 0.0) == 1.0


def test_ccdf_exponential_tail():
    ch = EffectiveChannel(shape=1, rate=2.0)
    assert ccdf(ch, 1.0) == pytest.approx(math.exp(-2.0), rel=1e-14)
    # shape-1 series path is the closed form itself
    assert ccdf(ch, 0.77) == math.exp(-2.0 * 0.77)


def test_ccdf_floor_calibration_point():
    ch = EffectiveChannel(shape=2, rate=66400.0)
    # e^-z (1 + z) at z = rate * x; oracle value computed directly
    x = 1.7154e-6
    z = 66400.0 * x
    assert ccdf(ch, x) == pytest.approx(math.exp(-z) * (1 + z), rel=1e-14)
    assert ccdf(ch, x) == pytest.approx(0.99398, abs=5e-5)


def test_ccdf_matches_upper_gamma():
    for shape in (1, 3, 7):
        ch = EffectiveChannel(shape, 1.7)
        for x in (0.0, 0.4, 2.5, 9.0):
            expected = gamma_upper_int(shape, ch.rate * x) / math.factorial(shape - 1)
            assert ccdf(ch, x) == pytest.approx(expected, rel=1e-13)


def test_ccdf_monotone_and_pdf_nonnegative():
    ch = EffectiveChannel(shape=4, rate=3.0)
    grid = np.linspace(0.0, 10.0, 400)
    c_vals = [ccdf(ch, x) for x in grid]
    assert all(b <= a + 1e-15 for a, b in zip(c_vals, c_vals[1:]))
    assert all(pdf(ch, x) >= 0.0 for x in grid)


def test_ccdf_derivative_is_minus_pdf():
    ch = EffectiveChannel(shape=3, rate=2.0)
    lam = ch.rate
    for x in np.linspace(1e-3 / lam, 10.0 / lam, 25):
        h = 1e-5 * max(1.0, x)
        num = -(ccdf(ch, x + h) - ccdf(ch, x - h)) / (2.0 * h)
        assert num == pytest.approx(pdf(ch, x), abs=1e-6, rel=1e-6)


def test_ccdf_extreme_argument():
    ch = EffectiveChannel(shape=3, rate=1.0)
    assert ccdf(ch, 1e6) == 0.0
    assert ccdf(ch, math.inf) == 0.0


class _StubRng:
    def __init__(self, values):
        self._values = list(values)

    def random(self):
        return self._values.pop(0)


def test_sample_inverse_cdf_construction():
    ch = EffectiveChannel(shape=1, rate=1.0)
    u = 0.37
    assert sample(ch, _StubRng([u])) == pytest.approx(-math.log(u), rel=1e-15)


def test_sample_mean():
    ch = EffectiveChannel(shape=6, rate=2.0)
    rng = np.random.default_rng(123)
    n = 10 ** 6
    draws = np.fromiter((sample(ch, rng) for _ in range(n)), dtype=float, count=n)
    mean = draws.mean()
    se = draws.std(ddof=1) / math.sqrt(n)
    assert abs(mean - 3.0) < 3.0 * se
    assert np.all(draws > 0.0)


def test_sample_ccdf_point():
    ch = EffectiveChannel(shape=6, rate=2.0)
    rng = np.random.default_rng(456)
    n = 10 ** 5
    x = 3.0  # the mean
    draws = np.fromiter((sample(ch, rng) for _ in range(n)), dtype=float, count=n)
    p_hat = float(np.mean(draws > x))
    p_true = ccdf(ch, x)
    se = math.sqrt(p_true * (1.0 - p_true) / n)
    assert abs(p_hat - p_true) < 3.0 * se


def test_sample_kolmogorov_smirnov():
    ch = EffectiveChannel(shape=3, rate=1.5)
    rng = np.random.default_rng(789)
    n = 10 ** 5
    draws = np.sort(np.fromiter((sample(ch, rng) for _ in range(n)),
                                dtype=float, count=n))
    cdf = np.array([reg_lower_gamma(ch.shape, ch.rate * x) for x in draws])
    ranks = np.arange(1, n + 1) / n
    d_stat = float(np.max(np.maximum(ranks - cdf, cdf - (ranks - 1.0 / n))))
    critical_1pct = 1.6276 / math.sqrt(n)
    assert d_stat < critical_1pct
