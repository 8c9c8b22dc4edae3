"""
Tests for the standard-normal primitives.
"""

import logging
import math

import numpy as np
import pytest
from scipy import stats

from src.gauss import (
    Z_LIMIT,
    DomainError,
    inv_mills_lower,
    inv_mills_upper,
    standardize,
    std_normal_log_cdf,
    std_normal_log_pdf,
    std_normal_log_sf,
    std_normal_pdf,
)
from src.utils import finite_difference


class TestDensity:
    """Tests for phi and log phi"""

    def test_pdf_at_zero(self):
        assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)

    def test_pdf_at_one(self):
        assert std_normal_pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-12)

    def test_pdf_symmetric(self):
        assert std_normal_pdf(-1.0) == std_normal_pdf(1.0)

    def test_log_pdf_matches_pdf(self):
        z = np.linspace(-5, 5, 11)
        np.testing.assert_allclose(np.exp(std_normal_log_pdf(z)), std_normal_pdf(z), rtol=1e-14)

    def test_scalar_in_scalar_out(self):
        """Floats come back as floats, arrays as arrays"""
        assert isinstance(std_normal_pdf(0.5), float)
        assert isinstance(std_normal_log_cdf(0.5), float)
        assert std_normal_log_cdf(np.array([0.5, 1.0])).shape == (2,)


class TestLogCdf:
    """Tests for log Phi and log(1 - Phi)"""

    def test_log_cdf_at_zero(self):
        assert std_normal_log_cdf(0.0) == pytest.approx(-math.log(2.0), rel=1e-15)

    def test_log_cdf_far_left_tail(self):
        """No underflow at z = -10"""
        assert std_normal_log_cdf(-10.0) == pytest.approx(-53.23128515051247, rel=1e-9)

    def test_log_cdf_right_tail(self):
        assert std_normal_log_cdf(8.0) == pytest.approx(-6.22096057427178e-16, rel=1e-6)

    def test_log_cdf_at_limit_is_finite(self):
        assert np.isfinite(std_normal_log_cdf(-Z_LIMIT))

    def test_log_cdf_matches_scipy_oracle(self):
        z = np.linspace(-37.0, 8.0, 451)
        np.testing.assert_allclose(std_normal_log_cdf(z), stats.norm.logcdf(z), rtol=1e-12)

    def test_log_sf_examples(self):
        assert std_normal_log_sf(0.0) == pytest.approx(-math.log(2.0), rel=1e-15)
        assert std_normal_log_sf(10.0) == pytest.approx(-53.23128515051247, rel=1e-9)
        assert std_normal_log_sf(-8.0) == pytest.approx(-6.22096057427178e-16, rel=1e-6)

    def test_log_sf_is_reflected_log_cdf(self):
        """Exact by delegation"""
        z = np.linspace(-37.0, 37.0, 741)
        assert np.array_equal(std_normal_log_cdf(z), std_normal_log_sf(-z))

    def test_complement_identity(self):
        z = np.linspace(-37.0, 37.0, 7401)
        total = np.exp(std_normal_log_cdf(z)) + np.exp(std_normal_log_sf(z))
        assert np.max(np.abs(total - 1.0)) <= 1e-12

    def test_monotone(self):
        z = np.linspace(-37.0, 37.0, 10001)
        assert np.all(np.diff(std_normal_log_cdf(z)) >= 0)


class TestMillsRatio:
    """Tests for the inverse Mills ratios"""

    def test_lower_examples(self):
        assert inv_mills_lower(0.0) == pytest.approx(0.7978845608028654, rel=1e-14)
        assert inv_mills_lower(-1.0) == pytest.approx(1.525135276160981, rel=1e-9)

    def test_lower_asymptote(self):
        ratio = inv_mills_lower(-30.0) / 30.0
        assert 1.0 <= ratio <= 1.01

    def test_upper_is_reflected_lower(self):
        assert inv_mills_upper(1.0) == inv_mills_lower(-1.0)
        assert inv_mills_upper(0.0) == pytest.approx(0.7978845608028654, rel=1e-14)
        assert 1.0 <= inv_mills_upper(30.0) / 30.0 <= 1.01

    def test_positive(self):
        z = np.linspace(-37.0, 37.0, 101)
        assert np.all(inv_mills_lower(z) > 0)
        assert np.all(inv_mills_upper(z) > 0)

    @pytest.mark.parametrize("z", [-5.0, -2.0, -1.0, 0.0, 1.0, 2.0])
    def test_derivative_of_log_cdf(self, z):
        """d/dz log Phi(z) is the lower Mills ratio"""
        numeric = finite_difference(lambda x: std_normal_log_cdf(x[0]), [z])[0]
        assert numeric == pytest.approx(inv_mills_lower(z), rel=1e-6)


class TestDomainGuard:
    """Tests for input validation and clamping"""

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(DomainError):
            std_normal_log_cdf(bad)
        with pytest.raises(DomainError):
            std_normal_pdf(bad)
        with pytest.raises(DomainError):
            inv_mills_upper(bad)

    def test_non_finite_in_array_rejected(self):
        with pytest.raises(DomainError):
            std_normal_log_sf(np.array([0.0, np.nan]))

    def test_clamp_beyond_limit(self, caplog):
        """Points past |z| = 37 are clamped with a warning"""
        with caplog.at_level(logging.WARNING, logger="src.gauss"):
            value = std_normal_log_cdf(-40.0)
        assert value == std_normal_log_cdf(-Z_LIMIT)
        assert "Clamping" in caplog.text

    def test_no_warning_inside_limit(self, caplog):
        with caplog.at_level(logging.WARNING, logger="src.gauss"):
            std_normal_log_cdf(np.linspace(-37.0, 37.0, 11))
        assert caplog.text == ""

    def test_standardize(self):
        assert standardize(3.0, 1.0, 2.0) == pytest.approx(1.0)
        with pytest.raises(DomainError):
            standardize(1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            standardize(1.0, 0.0, float("inf"))
