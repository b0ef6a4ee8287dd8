import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrwiretap.channel import ChannelParams, series_coefficient
from corrwiretap.closedform import (
    SeriesControl,
    _outage_term_literal,
    average_secrecy_capacity,
    capacity_term,
    outage_probability,
    outage_term,
    r1_term,
    r2_term,
)
from corrwiretap.errors import ConvergenceFailure, DomainError
from corrwiretap.oracle import capacity_by_quadrature, outage_by_quadrature

# mpmath, 30 digits, by direct integration of the component integrals
R1_K0_UNIT = 0.41568305387908278199  # e E1(1) - e^2 E1(2) / 2
R2_K0_UNIT = 0.18066430844411129235
R1_K2 = 0.07004772931771845920  # (2, 1, 0.5)
R2_K2 = 0.03876865779476401405
CAP_10_5_0 = 0.79210693962786612257
CAP_2_1_HALF = 0.40984031139343136478


class TestControl:
    @pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(rel_tol=-1.0), dict(consecutive_passes=0), dict(k_max=-1)])
    def test_rejects(self, kw):
        with pytest.raises(DomainError):
            SeriesControl(**kw)


class TestTerms:
    def test_k0_unit(self):
        p = ChannelParams(1, 1, 0)
        assert r1_term(p, 0) == pytest.approx(R1_K0_UNIT, rel=1e-12)
        assert r2_term(p, 0) == pytest.approx(R2_K0_UNIT, rel=1e-12)

    def test_k2(self):
        p = ChannelParams(2, 1, 0.5)
        assert r1_term(p, 2) == pytest.approx(R1_K2, rel=1e-10)
        assert r2_term(p, 2) == pytest.approx(R2_K2, rel=1e-10)

    @pytest.mark.parametrize("k", range(6))
    def test_normalised_matches_raw(self, k):
        p = ChannelParams(3.0, 1.5, 0.6)
        raw = series_coefficient(k, p.rho) * (r1_term(p, k) - r2_term(p, k))
        assert capacity_term(p, k) == pytest.approx(raw, rel=1e-9, abs=1e-15)

    def test_rho_zero_terms(self):
        p = ChannelParams(10, 5, 0)
        assert capacity_term(p, 3) == 0.0
        assert outage_term(p, 1.0, 3) == 0.0

    @pytest.mark.parametrize("k", range(5))
    def test_literal_outage_term(self, k):
        p = ChannelParams(10, 5, 0.6)
        assert _outage_term_literal(p, 1.0, k) == pytest.approx(outage_term(p, 1.0, k), rel=1e-10)

    def test_uncorrected_diverges(self):
        p = ChannelParams(10, 5, 0.6)
        raw = [_outage_term_literal(p, 1.0, k, corrected=False) for k in range(0, 40, 10)]
        assert all(b > a for a, b in zip(raw[1:], raw[2:]))
        assert raw[-1] > 1.0

    def test_negative_k(self):
        with pytest.raises(DomainError):
            capacity_term(ChannelParams(1, 1, 0.5), -1)


class TestCapacity:
    def test_independent_value(self):
        res = average_secrecy_capacity(ChannelParams(10, 5, 0))
        assert res.terms_used == 1
        assert res.value == pytest.approx(CAP_10_5_0, rel=1e-13)
        assert res.bits == pytest.approx(CAP_10_5_0 / math.log(2), rel=1e-13)

    def test_correlated_value(self):
        assert average_secrecy_capacity(ChannelParams(2, 1, 0.5)).value == pytest.approx(CAP_2_1_HALF, rel=1e-11)

    def test_against_quadrature_rho0(self):
        p = ChannelParams(10, 5, 0)
        assert average_secrecy_capacity(p).value == pytest.approx(capacity_by_quadrature(p).value, rel=1e-8)

    def test_against_quadrature_rho_half(self):
        p = ChannelParams(10, 10, 0.5)
        assert average_secrecy_capacity(p).value == pytest.approx(capacity_by_quadrature(p).value, rel=1e-7)

    def test_decreasing_in_rho(self):
        vals = [average_secrecy_capacity(ChannelParams(10, 10, r)).value for r in (0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.99)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_increasing_in_lambda1(self):
        vals = [average_secrecy_capacity(ChannelParams(l1, 3, 0.7)).value for l1 in (0.1, 1, 3, 10, 100, 1000)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_tolerance_stability(self):
        p = ChannelParams(31.62, 31.62, 0.9)
        a = average_secrecy_capacity(p, SeriesControl(rel_tol=1e-10)).value
        b = average_secrecy_capacity(p, SeriesControl(rel_tol=1e-13)).value
        assert abs(a - b) <= 1e-9 * b

    def test_cap_reached(self):
        with pytest.raises(ConvergenceFailure) as info:
            average_secrecy_capacity(ChannelParams(10, 10, 0.9), SeriesControl(k_max=10))
        assert info.value.terms_used == 11
        assert 0.0 < info.value.partial

    def test_near_unit_correlation(self):
        res = average_secrecy_capacity(ChannelParams(10, 10, 0.99))
        assert 0.0 < res.value < average_secrecy_capacity(ChannelParams(10, 10, 0.9)).value
        assert res.terms_used > 100

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(min_value=0.01, max_value=1000.0),
        st.floats(min_value=0.01, max_value=1000.0),
        st.floats(min_value=0.0, max_value=0.95),
    )
    def test_bounded(self, l1, l2, rho):
        c = average_secrecy_capacity(ChannelParams(l1, l2, rho)).value
        # E[max(0, ln(1+a) - ln(1+b))] <= E[ln(1+a)] <= ln(1+l1)
        assert 0.0 <= c <= math.log1p(l1) + 1e-12


class TestOutage:
    @pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
    def test_zero_rate_equal_snr(self, rho):
        # exchangeable pair: P(alpha <= beta) = 1/2 for every rho
        assert outage_probability(ChannelParams(7, 7, rho), 0.0).value == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("l1,l2", [(1, 1), (2, 1), (1, 4), (100, 3), (0.05, 20)])
    def test_zero_rate_independent_pin(self, l1, l2):
        res = outage_probability(ChannelParams(l1, l2, 0.0), 0.0)
        assert res.value == pytest.approx(l2 / (l1 + l2), abs=1e-12)

    def test_zero_rate_shrinks_with_correlation(self):
        # the weaker eavesdropper wins less often as the gains lock together
        vals = [outage_probability(ChannelParams(2, 1, r), 0.0).value for r in (0, 0.4, 0.8, 0.95)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_against_quadrature(self):
        p = ChannelParams(10, 5, 0.6)
        assert outage_probability(p, 1.0).value == pytest.approx(outage_by_quadrature(p, 1.0).value, abs=1e-9)

    def test_monotone_in_rate(self):
        p = ChannelParams(10, 3, 0.7)
        vals = [outage_probability(p, r).value for r in (0, 0.1, 0.5, 1, 2, 4, 8)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_huge_rate(self):
        assert outage_probability(ChannelParams(10, 3, 0.7), 30.0).value > 1 - 1e-6

    def test_shape_reported(self):
        res = outage_probability(ChannelParams(4, 2, 0.3), math.log(3))
        assert res.y == pytest.approx(0.5) and res.mu == pytest.approx(1.5)

    @pytest.mark.parametrize("rate", [-0.1, math.inf, math.nan])
    def test_bad_rate(self, rate):
        with pytest.raises(DomainError):
            outage_probability(ChannelParams(1, 1, 0.5), rate)
