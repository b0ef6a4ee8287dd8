import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from corrwiretap.channel import (
    ChannelParams,
    SnrPair,
    instantaneous_secrecy_capacity,
    joint_cdf,
    joint_pdf_bessel,
    joint_pdf_series,
    normalized_pdf,
    series_coefficient,
)
from corrwiretap.closedform import SeriesControl
from corrwiretap.errors import ConvergenceFailure, DomainError

snr = st.floats(min_value=0.0, max_value=1e6, allow_nan=False)


class TestParams:
    @pytest.mark.parametrize("l1,l2,rho", [(0, 1, 0), (1, -1, 0), (1, 1, -0.1), (1, 1, 0.995), (1, 1, 1.0),
                                           (math.inf, 1, 0), (1, 1, math.nan)])
    def test_rejects(self, l1, l2, rho):
        with pytest.raises(DomainError):
            ChannelParams(l1, l2, rho)

    def test_accepts_edges(self):
        ChannelParams(1e-3, 1e3, 0.0)
        ChannelParams(1, 1, 0.99)

    def test_from_db(self):
        p = ChannelParams.from_snr_db(20.0, 0.5)
        assert p.lambda1 == pytest.approx(100.0) and p.lambda2 == pytest.approx(100.0)

    def test_snr_pair(self):
        with pytest.raises(DomainError):
            SnrPair(-1.0, 0.0)
        with pytest.raises(DomainError):
            SnrPair(0.0, math.inf)


class TestCoefficient:
    def test_examples(self):
        assert series_coefficient(0, 0.5) == 2.0
        assert series_coefficient(1, 0.5) == 4.0
        assert all(series_coefficient(k, 0.0) == 0.0 for k in range(1, 10))

    def test_log_space_branch_continuous(self):
        for k in (19, 20, 21, 22, 40):
            direct = 0.3**k / (math.factorial(k) ** 2 * 0.7 ** (2 * k + 1))
            assert series_coefficient(k, 0.3) == pytest.approx(direct, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            series_coefficient(1, 1.0)
        with pytest.raises(DomainError):
            series_coefficient(-1, 0.5)


class TestPdf:
    def test_independent_origin(self):
        assert joint_pdf_bessel(ChannelParams(1, 1, 0), SnrPair(0, 0)) == 1.0

    @pytest.mark.parametrize("p", [ChannelParams(2, 3, 0.4), ChannelParams(0.1, 10, 0.9), ChannelParams(5, 5, 0)])
    def test_origin(self, p):
        expected = 1 / ((1 - p.rho) * p.lambda1 * p.lambda2)
        assert joint_pdf_bessel(p, SnrPair(0, 0)) == pytest.approx(expected, rel=1e-15)
        assert joint_pdf_series(p, SnrPair(0, 0)) == pytest.approx(expected, rel=1e-15)

    def test_series_matches_bessel_point(self):
        p = ChannelParams(2, 1, 0.5)
        s = SnrPair(1, 1)
        assert joint_pdf_series(p, s) == pytest.approx(joint_pdf_bessel(p, s), rel=1e-10)

    def test_rho_zero_single_term(self):
        p = ChannelParams(2, 3, 0.0)
        s = SnrPair(1.5, 0.7)
        assert joint_pdf_series(p, s) == pytest.approx(math.exp(-1.5 / 2 - 0.7 / 3) / 6, rel=1e-15)

    def test_grid_rho_08(self):
        p = ChannelParams(1.5, 0.7, 0.8)
        for a in np.linspace(0.1, 6, 5):
            for b in np.linspace(0.1, 3, 5):
                s = SnrPair(a, b)
                assert joint_pdf_series(p, s) == pytest.approx(joint_pdf_bessel(p, s), rel=1e-10)

    @pytest.mark.parametrize("rho", [0.0, 0.3, 0.6, 0.9])
    def test_forms_agree_wide(self, rho):
        p = ChannelParams(3.0, 2.0, rho)
        for a in np.geomspace(1e-3, 200, 15):
            for b in np.geomspace(1e-3, 150, 15):
                s = SnrPair(a, b)
                fb = joint_pdf_bessel(p, s)
                if fb > 1e-300:
                    assert joint_pdf_series(p, s) == pytest.approx(fb, rel=1e-9)

    def test_symmetry_normalised(self):
        p = ChannelParams(4.0, 0.5, 0.7)
        for a, b in [(0.3, 0.2), (5.0, 1.0), (12.0, 0.01)]:
            swapped = SnrPair(b * p.lambda1 / p.lambda2, a * p.lambda2 / p.lambda1)
            assert joint_pdf_bessel(p, SnrPair(a, b)) == pytest.approx(joint_pdf_bessel(p, swapped), rel=1e-13)

    def test_series_cap(self):
        with pytest.raises(ConvergenceFailure) as info:
            joint_pdf_series(ChannelParams(1, 1, 0.9), SnrPair(30, 30), SeriesControl(k_max=10))
        assert info.value.partial > 0

    def test_normalisation_series(self):
        p = ChannelParams(1, 1, 0.5)
        f = lambda v, u: joint_pdf_series(p, SnrPair(u, v))
        val, _ = integrate.dblquad(f, 0, 40, 0, 40, epsabs=1e-10)
        assert val == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.2, 1.0, 4.0])
    def test_exponential_marginal(self, alpha):
        p = ChannelParams(2.0, 1.5, 0.6)
        val, _ = integrate.quad(lambda b: joint_pdf_bessel(p, SnrPair(alpha, b)), 0, 60, epsabs=1e-13, limit=200)
        assert val == pytest.approx(math.exp(-alpha / 2.0) / 2.0, abs=1e-6)

    def test_normalized_pdf_vectorised(self):
        u = np.array([0.1, 1.0, 3.0])
        v = np.array([0.2, 1.0, 2.5])
        out = normalized_pdf(u, v, 0.5)
        assert out.shape == (3,)
        assert out[1] == pytest.approx(joint_pdf_bessel(ChannelParams(1, 1, 0.5), SnrPair(1, 1)))


class TestCdf:
    def test_independent(self):
        p = ChannelParams(2, 3, 0)
        assert joint_cdf(p, 1, 2) == pytest.approx((1 - math.exp(-0.5)) * (1 - math.exp(-2 / 3)), rel=1e-14)

    def test_against_quadrature(self):
        p = ChannelParams(1.5, 0.5, 0.9)
        val, _ = integrate.dblquad(lambda b, a: joint_pdf_bessel(p, SnrPair(a, b)), 0, 2.0, 0, 0.4, epsabs=1e-12)
        assert joint_cdf(p, 2.0, 0.4) == pytest.approx(val, abs=1e-9)

    def test_marginal_limit(self):
        p = ChannelParams(1.5, 0.5, 0.7)
        assert joint_cdf(p, 2.0, math.inf) == pytest.approx(1 - math.exp(-2.0 / 1.5), rel=1e-12)


class TestInstantaneous:
    def test_equal(self):
        for a in (0.0, 1.0, 123.4):
            assert instantaneous_secrecy_capacity(SnrPair(a, a)) == 0.0

    def test_one_nat(self):
        assert instantaneous_secrecy_capacity(SnrPair(math.e - 1, 0)) == pytest.approx(1.0, rel=1e-15)

    def test_ln2(self):
        assert instantaneous_secrecy_capacity(SnrPair(3, 1)) == pytest.approx(math.log(2), rel=1e-15)

    @given(snr, snr)
    def test_nonnegative_and_zero_iff(self, a, b):
        c = instantaneous_secrecy_capacity(SnrPair(a, b))
        assert c >= 0.0
        if a <= b:
            assert c == 0.0
        else:
            assert c == pytest.approx(math.log1p(a) - math.log1p(b), rel=1e-9, abs=1e-300)
