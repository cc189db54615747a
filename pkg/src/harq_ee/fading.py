"""Distributions of sums of i.i.d. per-block fading powers.

The per-block channel power z is exponential for Rayleigh fading and
Gamma-distributed for Nakagami-m fading, so the sum of t independent blocks
is Gamma in both cases:

* Rayleigh:    sum of t blocks ~ Gamma(shape t,   scale E{z})
* Nakagami-m:  sum of t blocks ~ Gamma(shape t*m, scale E{z}/m)

Rayleigh coincides with Nakagami at m = 1. Everything downstream (outage
probabilities, transmission-time pmfs, rate thresholds) is expressed through
the CDF and quantile of these sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammainc, gammaincinv

RAYLEIGH = "rayleigh"
NAKAGAMI = "nakagami"

# Quantile residual guaranteed by sum_quantile: |cdf(result) - p| <= this.
QUANTILE_TOL = 1e-12


@dataclass(frozen=True)
class FadingModel:
    """Family and parameters of the per-block fading power distribution.

    Attributes:
        family: "rayleigh" or "nakagami".
        mean_power: E{z} > 0 (dimensionless).
        m_shape: Nakagami shape m >= 0.5; must be None for Rayleigh.
    """

    family: str
    mean_power: float = 1.0
    m_shape: float | None = None

    def __post_init__(self):
        if self.family not in (RAYLEIGH, NAKAGAMI):
            raise ValueError(f"unknown fading family {self.family!r}")
        if not (self.mean_power > 0 and math.isfinite(self.mean_power)):
            raise ValueError(f"mean_power must be positive, got {self.mean_power}")
        if self.family == RAYLEIGH:
            if self.m_shape is not None:
                raise ValueError("m_shape only applies to Nakagami fading")
        else:
            if self.m_shape is None or not (self.m_shape >= 0.5 and math.isfinite(self.m_shape)):
                raise ValueError(f"Nakagami requires m_shape >= 0.5, got {self.m_shape}")

    @property
    def block_shape(self) -> float:
        """Gamma shape parameter of a single block (1 for Rayleigh, m otherwise)."""
        return 1.0 if self.family == RAYLEIGH else float(self.m_shape)

    @property
    def block_scale(self) -> float:
        """Gamma scale parameter of a single block (mean / shape)."""
        return self.mean_power / self.block_shape


def rayleigh(mean_power: float = 1.0) -> FadingModel:
    return FadingModel(RAYLEIGH, mean_power)


def nakagami(m_shape: float, mean_power: float = 1.0) -> FadingModel:
    return FadingModel(NAKAGAMI, mean_power, m_shape)


def sum_cdf(model: FadingModel, t: int, x: float) -> float:
    """CDF of the sum of t i.i.d. block powers: Pr{z_1 + ... + z_t <= x}.

    The empty sum (t = 0) is identically zero, so its CDF is 1 for every
    x >= 0; this convention makes Pr{T = 1} = 1 - F_1(q) fall out of the
    CDF-difference formula for the transmission-time pmf.
    """
    t = _check_round_count(t)
    if not (x >= 0):
        raise ValueError(f"x must be nonnegative, got {x}")
    if t == 0:
        return 1.0
    shape = t * model.block_shape
    return float(gammainc(shape, x / model.block_scale))


def sum_quantile(model: FadingModel, t: int, p: float) -> float:
    """Inverse of sum_cdf in x: the value q with Pr{sum of t blocks <= q} = p.

    p = 0 and p = 1 are rejected: they correspond to a zero rate or certain
    outage and every caller degenerates there. The result satisfies
    |sum_cdf(model, t, result) - p| <= 1e-12 (bisection polish kicks in on
    the rare arguments where the library inverse alone falls short).
    """
    t = _check_round_count(t)
    if t == 0:
        raise ValueError("quantile of the empty sum is undefined")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    shape = t * model.block_shape
    scale = model.block_scale
    q = float(gammaincinv(shape, p)) * scale
    if abs(float(gammainc(shape, q / scale)) - p) <= QUANTILE_TOL:
        return q
    return _bisect_quantile(shape, scale, p, q)


def _check_round_count(t) -> int:
    if t != int(t) or t < 0:
        raise ValueError(f"t must be a nonnegative integer, got {t}")
    return int(t)


def _bisect_quantile(shape: float, scale: float, p: float, q0: float) -> float:
    # Bracket around the seed, then bisect on the monotone CDF.
    lo, hi = 0.0, max(q0, scale)
    while gammainc(shape, hi / scale) < p:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("quantile bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gammainc(shape, mid / scale) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)
