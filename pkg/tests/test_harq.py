"""Transmission-time distribution and small-theta throughput tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harq_ee import (
    fixed_outage_throughput,
    moments_total_time,
    nakagami,
    pmf_transmission_time,
    pmf_transmission_time_poisson,
    rayleigh,
    rayleigh_poisson_moments,
    throughput_small_theta,
    transmission_stats,
)

models = st.one_of(
    st.builds(rayleigh, st.floats(0.2, 5.0)),
    st.builds(nakagami, st.floats(0.5, 6.0), st.floats(0.2, 5.0)),
)


def erlang3_quantile_oracle(p):
    """Bisection on the three-block Erlang CDF 1 - e^{-x}(1 + x + x^2/2)."""
    lo, hi = 0.0, 50.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1 - math.exp(-mid) * (1 + mid + mid * mid / 2) > p:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestPmf:
    def test_single_round_deadline(self):
        stats = pmf_transmission_time(rayleigh(1.0), 1, 0.1)
        assert stats.pmf_T[0] == pytest.approx(0.9, abs=1e-12)
        assert stats.outage == 0.1

    def test_three_round_poisson_oracle(self):
        # Poisson cross-check: T - 1 is Poisson(q) for unit-mean Rayleigh
        q = erlang3_quantile_oracle(0.1)
        assert q == pytest.approx(1.1020653282493214, abs=1e-11)
        stats = pmf_transmission_time(rayleigh(1.0), 3, 0.1)
        assert stats.quantile_q == pytest.approx(q, abs=1e-10)
        assert stats.pmf_T[0] == pytest.approx(math.exp(-q), abs=1e-10)
        assert stats.pmf_T[1] == pytest.approx(q * math.exp(-q), abs=1e-10)

    @given(model=models, M=st.integers(1, 9), eps=st.floats(0.005, 0.95))
    def test_normalization(self, model, M, eps):
        stats = pmf_transmission_time(model, M, eps)
        assert abs(stats.pmf_T.sum() - (1.0 - eps)) <= 1e-12
        assert np.all(stats.pmf_T >= 0)

    def test_poisson_form_rejects_nakagami(self):
        with pytest.raises(ValueError):
            pmf_transmission_time_poisson(nakagami(2.0, 1.0), 3, 0.1)

    def test_poisson_form_scales_with_mean_power(self):
        stats = pmf_transmission_time(rayleigh(2.5), 4, 0.2)
        poisson = pmf_transmission_time_poisson(rayleigh(2.5), 4, 0.2)
        np.testing.assert_allclose(stats.pmf_T, poisson, atol=1e-12)


class TestMoments:
    def test_geometric_closed_form(self):
        # M = 1 makes the total time geometric with success probability 1 - eps
        stats = transmission_stats(rayleigh(1.0), 1, 0.1)
        assert stats.mu == pytest.approx(1.0 / 0.9, abs=1e-12)
        assert stats.sigma2 == pytest.approx(0.1 / 0.81, abs=1e-12)

    def test_geometric_any_fading(self):
        stats = transmission_stats(nakagami(3.5, 0.7), 1, 0.3)
        assert stats.mu == pytest.approx(1.0 / 0.7, abs=1e-12)
        assert stats.sigma2 == pytest.approx(0.3 / 0.49, abs=1e-12)

    def test_small_eps_mu_approaches_conditional_mean(self):
        eps = 1e-9
        stats = transmission_stats(rayleigh(1.0), 3, eps)
        t = np.arange(1, 4)
        assert stats.mu == pytest.approx(float(np.dot(t, stats.pmf_T)), abs=1e-7)

    @given(model=models, M=st.integers(1, 9), eps=st.floats(0.01, 0.9))
    @settings(max_examples=60)
    def test_rayleigh_form_matches_general(self, model, M, eps):
        if model.family != "rayleigh":
            return
        stats = transmission_stats(model, M, eps)
        mu_p, sigma2_p = rayleigh_poisson_moments(model, M, eps)
        assert abs(stats.mu - mu_p) <= 1e-12 * max(1.0, stats.mu)
        assert abs(stats.sigma2 - sigma2_p) <= 1e-12 * max(1.0, stats.sigma2)

    def test_mu_nondecreasing_in_eps(self):
        for model in (rayleigh(1.0), nakagami(2.0, 1.0)):
            for M in (1, 3, 6):
                mus = [transmission_stats(model, M, e).mu for e in np.linspace(0.02, 0.9, 45)]
                assert all(b >= a - 1e-12 for a, b in zip(mus, mus[1:]))

    def test_moments_reject_mismatched_deadline(self):
        stats = pmf_transmission_time(rayleigh(1.0), 3, 0.1)
        with pytest.raises(ValueError):
            moments_total_time(stats, M=4)

    def test_independent_of_snr_by_construction(self):
        # mu and sigma2 take no snr input; identical stats feed every snr point
        a = transmission_stats(rayleigh(1.0), 3, 0.1)
        b = transmission_stats(rayleigh(1.0), 3, 0.1)
        assert (a.mu, a.sigma2) == (b.mu, b.sigma2)


class TestThroughput:
    def test_zero_theta_is_rate_over_mu(self):
        assert throughput_small_theta(0.5, 2.0, 1.3, 0.0) == 0.25

    def test_zero_rate(self):
        assert throughput_small_theta(0.0, 2.0, 1.3, 0.7) == 0.0

    def test_clamped_at_expansion_root(self):
        # R = 2 mu^2 / (sigma^2 theta) zeroes the expansion; beyond it, clamp
        mu, sigma2, theta = 2.0, 1.5, 0.4
        root = 2 * mu * mu / (sigma2 * theta)
        assert throughput_small_theta(root, mu, sigma2, theta) == 0.0
        assert throughput_small_theta(2 * root, mu, sigma2, theta) == 0.0

    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            throughput_small_theta(-0.1, 2.0, 1.0, 0.1)

    def test_fixed_outage_zero_snr(self):
        assert fixed_outage_throughput(rayleigh(1.0), 1, 0.1, 0.0, 0.0) == 0.0

    def test_fixed_outage_hand_composed(self):
        # oracle: log2(1 - ln 0.9) * 0.9 for M = 1, eps = 0.1, theta = 0, snr = 1
        oracle = math.log2(1.0 - math.log(0.9)) * 0.9
        assert oracle == pytest.approx(0.13006528595086547, abs=1e-15)
        got = fixed_outage_throughput(rayleigh(1.0), 1, 0.1, 0.0, 1.0)
        assert got == pytest.approx(oracle, abs=1e-12)

    def test_low_snr_slope_matches_limit(self):
        # d r_avg / d snr at 0+ equals quantile / (mu ln 2)
        model, M, eps, theta = rayleigh(1.0), 3, 0.1, 0.1
        stats = transmission_stats(model, M, eps)
        expected = stats.quantile_q / (stats.mu * math.log(2.0))
        h = 1e-7
        fd = (
            fixed_outage_throughput(model, M, eps, theta, 2 * h)
            - fixed_outage_throughput(model, M, eps, theta, h)
        ) / h
        assert fd == pytest.approx(expected, rel=1e-5)
