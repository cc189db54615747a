"""Transmission-time distribution and throughput of chase-combining HARQ.

A message is retransmitted until the accumulated (maximum-ratio-combined)
channel power crosses the decoding threshold, up to a deadline of M rounds;
crossing the deadline is an outage and the message restarts. The number of
rounds T of a single attempt has pmf

    Pr{T = t} = F_{t-1}(q) - F_t(q),        t = 1..M,

where F_t is the CDF of the t-block power sum and q the decoding threshold.
The total time including geometric restarts has closed-form mean and
variance, which feed the small-QoS-exponent throughput expansion

    r_avg = R / mu - R^2 sigma^2 theta / (2 mu^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fading import RAYLEIGH, FadingModel, sum_cdf, sum_quantile

LN2 = math.log(2.0)


@dataclass
class TransmissionStats:
    """Per-message transmission-time statistics under a deadline of M rounds.

    Attributes:
        pmf_T: Pr{T = t} for t = 1..M (length-M vector).
        outage: probability the message is undecoded after M rounds.
        quantile_q: decoding threshold on the accumulated block power.
        mu: mean of the total time including restarts (None until computed).
        sigma2: variance of the total time including restarts.
    """

    pmf_T: np.ndarray
    outage: float
    quantile_q: float
    mu: float | None = None
    sigma2: float | None = None

    @property
    def deadline(self) -> int:
        return len(self.pmf_T)


def stats_at_threshold(model: FadingModel, M: int, threshold: float) -> TransmissionStats:
    """Transmission-time pmf when decoding requires the M-round power sum >= threshold.

    Canonical CDF-difference path; works for any fading family.
    """
    if M < 1 or M != int(M):
        raise ValueError(f"deadline M must be a positive integer, got {M}")
    if not (threshold >= 0):
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    M = int(M)
    cdfs = np.array([sum_cdf(model, t, threshold) for t in range(M + 1)])
    pmf = cdfs[:-1] - cdfs[1:]
    # Tiny negative residue from CDF roundoff is clipped, never real mass.
    pmf = np.clip(pmf, 0.0, None)
    return TransmissionStats(pmf_T=pmf, outage=float(cdfs[-1]), quantile_q=float(threshold))


def pmf_transmission_time(model: FadingModel, M: int, eps: float) -> TransmissionStats:
    """Transmission-time pmf at the rate that meets outage target eps exactly."""
    q = sum_quantile(model, M, eps)
    stats = stats_at_threshold(model, M, q)
    stats.outage = float(eps)  # exact by construction of q
    return stats


def pmf_transmission_time_poisson(model: FadingModel, M: int, eps: float) -> np.ndarray:
    """Rayleigh-only cross-check pmf: T - 1 is Poisson with mean q / E{z}."""
    if model.family != RAYLEIGH:
        raise ValueError("the Poisson form of the pmf holds only for Rayleigh fading")
    lam = sum_quantile(model, M, eps) / model.mean_power
    t = np.arange(1, int(M) + 1)
    return np.exp(-lam) * lam ** (t - 1) / np.array([math.factorial(k) for k in t - 1])


def moments_total_time(stats: TransmissionStats, M: int | None = None) -> tuple[float, float]:
    """Mean and variance of the total transmission time including restarts.

    Every deadline violation costs M rounds and restarts the message, so the
    restart count is geometric with failure probability eps:

        mu      = (1/(1-eps)) sum t Pr{T=t} + M eps / (1-eps)
        E{Th^2} = (1/(1-eps)) sum t^2 Pr{T=t}
                  + (2 M eps/(1-eps)^2) sum t Pr{T=t}
                  + M^2 eps (1+eps) / (1-eps)^2

    Returns (mu, sigma2) with sigma2 = E{Th^2} - mu^2; both are +inf when
    eps = 1 (the message never gets through).
    """
    if M is None:
        M = stats.deadline
    elif M != stats.deadline:
        raise ValueError(f"M={M} disagrees with pmf length {stats.deadline}")
    return _moments_from_pmf(stats.pmf_T, stats.outage, M)


def _moments_from_pmf(pmf, eps: float, M: int) -> tuple[float, float]:
    if eps >= 1.0:
        return math.inf, math.inf
    t = np.arange(1, M + 1)
    s1 = float(np.dot(t, pmf))
    s2 = float(np.dot(t * t, pmf))
    fail = eps / (1.0 - eps)
    mu = s1 / (1.0 - eps) + M * fail
    second = (
        s2 / (1.0 - eps)
        + 2.0 * M * eps * s1 / (1.0 - eps) ** 2
        + M * M * eps * (1.0 + eps) / (1.0 - eps) ** 2
    )
    return mu, second - mu * mu


def rayleigh_poisson_moments(model: FadingModel, M: int, eps: float) -> tuple[float, float]:
    """Rayleigh-only simplified moments, written directly on the Poisson pmf.

    Cross-check path for moments_total_time; uses the algebraically
    rearranged variance with the M^2 eps/(1-eps)^2 tail term.
    """
    pmf = pmf_transmission_time_poisson(model, M, eps)
    t = np.arange(1, int(M) + 1)
    s1 = float(np.dot(t, pmf))
    s2 = float(np.dot(t * t, pmf))
    mu = s1 / (1.0 - eps) + M * eps / (1.0 - eps)
    sigma2 = s2 / (1.0 - eps) - (s1 / (1.0 - eps)) ** 2 + M * M * eps / (1.0 - eps) ** 2
    return mu, sigma2


def transmission_stats(model: FadingModel, M: int, eps: float) -> TransmissionStats:
    """pmf plus restart moments in one call (the usual entry point)."""
    stats = pmf_transmission_time(model, M, eps)
    stats.mu, stats.sigma2 = moments_total_time(stats)
    return stats


def throughput_small_theta(R: float, mu: float, sigma2: float, theta: float) -> float:
    """First-order-in-theta effective capacity of the HARQ link, clamped at 0.

    The expansion R/mu - R^2 sigma^2 theta / (2 mu^3) goes negative for large
    R; negative throughput is meaningless and would corrupt the optimal-rate
    search, hence the clamp.
    """
    if R < 0:
        raise ValueError(f"rate must be nonnegative, got {R}")
    if theta < 0:
        raise ValueError(f"QoS exponent must be nonnegative, got {theta}")
    if R == 0.0 or math.isinf(mu):
        return 0.0
    return max(0.0, R / mu - R * R * sigma2 * theta / (2.0 * mu ** 3))


def fixed_outage_rate(model: FadingModel, M: int, eps: float, snr: float) -> float:
    """Transmission rate (bits/s/Hz) that yields outage probability eps at this snr."""
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")
    return math.log2(1.0 + sum_quantile(model, M, eps) * snr)


def fixed_outage_throughput(
    model: FadingModel, M: int, eps: float, theta: float, snr: float
) -> float:
    """Effective capacity at the outage-targeted rate for the given snr."""
    R = fixed_outage_rate(model, M, eps, snr)
    stats = transmission_stats(model, M, eps)
    return throughput_small_theta(R, stats.mu, stats.sigma2, theta)
