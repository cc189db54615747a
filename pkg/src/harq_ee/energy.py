"""Minimum energy per bit, wideband slope, and throughput-vs-energy curves.

Two rate regimes are covered for the chase-combining link:

* fixed outage: the rate tracks an outage target eps, and the minimum energy
  per bit / wideband slope have closed forms whose denominators split into a
  channel part (sigma^2 theta + mu^2 ln 2)/mu and a source burstiness part;
* optimal rate: the rate maximizes throughput at each snr. The minimum
  energy per bit is found by minimizing mu(eps) ln2 / q(eps) over the outage
  probability, which sidesteps differentiating a numeric argmax at snr = 0.
  No closed form for the slope exists in this regime, so it is reported as a
  finite-difference estimate off the low-snr curve.

The numeric slope estimator doubles as a cross-check of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IllConditionedError
from .fading import FadingModel, sum_cdf, sum_quantile
from .harq import (
    LN2,
    fixed_outage_rate,
    moments_total_time,
    stats_at_threshold,
    throughput_small_theta,
    transmission_stats,
)
from .optim import maximize_on_ray, minimize_unimodal
from .sources import DISCRETE_MARKOV, FLUID, MMPS, SourceModel, solve_throughput
from .util import parallel_map

FIXED = "fixed"
OPTIMAL = "optimal"

# Outage-domain search interval: open (0, 1) with room for the quantile.
_EPS_LO = 1e-9
_EPS_HI = 1.0 - 1e-9


@dataclass
class EeResult:
    """Minimum energy per bit (ratio) and wideband slope for one configuration."""

    eb_min: float
    s0: float
    regime: str
    eps_star: float | None = None
    a_coeff: float | None = None

    @property
    def eb_min_db(self) -> float:
        return 10.0 * math.log10(self.eb_min)


@dataclass(frozen=True)
class CurvePoint:
    snr: float
    r_avg: float
    eb_db: float


class OptimalPoint(NamedTuple):
    rate: float
    outage: float
    r_avg: float


def throughput_at(
    source: SourceModel,
    model: FadingModel,
    M: int,
    theta: float,
    snr: float,
    *,
    eps: float | None = None,
    rate: float | None = None,
) -> float:
    """Supportable average arrival rate at one snr, under either rate policy input.

    Exactly one of ``eps`` (outage-targeted rate) or ``rate`` (explicit rate)
    selects the operating point. theta = 0 means no queuing constraint; all
    source models then coincide with the effective-capacity value.
    """
    if (eps is None) == (rate is None):
        raise ValueError("pass exactly one of eps or rate")
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")
    if eps is not None:
        stats = transmission_stats(model, M, eps)
        R = math.log2(1.0 + stats.quantile_q * snr)
    else:
        R = float(rate)
        if R == 0.0:
            return 0.0
        if snr == 0.0:
            return 0.0  # certain outage
        threshold = math.expm1(R * LN2) / snr
        stats = stats_at_threshold(model, M, threshold)
        stats.mu, stats.sigma2 = moments_total_time(stats)
    c_e = throughput_small_theta(R, stats.mu, stats.sigma2, theta)
    if theta == 0.0:
        return c_e
    return solve_throughput(source, c_e, theta)


def _burstiness_term(source: SourceModel, theta: float) -> float:
    """Source contribution to the wideband-slope denominator (0 for constant rate)."""
    if source.kind == DISCRETE_MARKOV:
        p11, p22 = source.p11, source.p22
        zeta = (1.0 - p22) * (p11 + p22) / ((1.0 - p11) * (2.0 - p11 - p22))
        return theta * zeta
    if source.kind in (FLUID, MMPS):
        a, b = source.alpha, source.beta
        return 2.0 * theta * b / (a * (a + b))
    return 0.0


def ee_fixed_outage(
    source: SourceModel, model: FadingModel, M: int, eps: float, theta: float
) -> EeResult:
    """Closed-form minimum energy per bit and wideband slope, fixed-outage regime.

    Valid to first order in theta (small-QoS-exponent regime). The minimum
    energy per bit is source-independent except for the MMPS arrival model,
    which pays the Poisson factor (e^theta - 1)/theta; the slope denominator
    gains the source burstiness term.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    stats = transmission_stats(model, M, eps)
    eb_min = stats.mu * LN2 / stats.quantile_q
    denom = (stats.sigma2 * theta + stats.mu ** 2 * LN2) / stats.mu
    s0 = 2.0 * LN2 / (denom + _burstiness_term(source, theta))
    if source.kind == MMPS:
        poisson_factor = math.expm1(theta) / theta
        eb_min *= poisson_factor
        s0 /= poisson_factor
    return EeResult(eb_min=eb_min, s0=s0, regime=FIXED)


def optimal_rate_at_snr(
    source: SourceModel, model: FadingModel, M: int, theta: float, snr: float
) -> OptimalPoint:
    """Throughput-maximizing rate at one snr (search in the rate domain).

    Bracket expansion followed by golden-section to 1e-9 in R; the bracket
    invariant is checked at runtime and violations raise BracketError.
    """
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")

    def objective(R):
        return throughput_at(source, model, M, theta, snr, rate=R)

    scale = M * model.mean_power * snr
    r0 = math.log2(1.0 + 1e-6 * scale)
    r_cap = math.log2(1.0 + 1e12 * scale)
    r_star, r_avg = maximize_on_ray(objective, r0, r_cap, tol=1e-9)
    outage = sum_cdf(model, M, math.expm1(r_star * LN2) / snr)
    return OptimalPoint(rate=r_star, outage=outage, r_avg=r_avg)


def optimal_outage_at_snr(
    source: SourceModel, model: FadingModel, M: int, theta: float, snr: float
) -> OptimalPoint:
    """Equivalent optimal-rate search in the outage domain (eps in (0, 1))."""
    if snr <= 0:
        raise ValueError(f"snr must be positive, got {snr}")

    def negated(eps):
        return -throughput_at(source, model, M, theta, snr, eps=eps)

    eps_star, neg = minimize_unimodal(negated, _EPS_LO, _EPS_HI, tol=1e-9)
    rate = fixed_outage_rate(model, M, eps_star, snr)
    return OptimalPoint(rate=rate, outage=eps_star, r_avg=-neg)


def ee_optimal_rate(
    source: SourceModel,
    model: FadingModel,
    M: int,
    theta: float,
    *,
    slope_snrs=(1e-4, 1e-3, 1e-2),
    compute_slope: bool = True,
) -> EeResult:
    """Minimum energy per bit in the optimal-rate regime.

    Minimizes mu(eps) ln2 / q(eps) over the outage probability; the minimizer
    eps_star equals the snr -> 0 limit of the optimal outage, and the limit
    rate slope is a = q(eps_star)/ln2. The wideband slope has no closed form
    here and is estimated numerically from the optimal-policy curve (pass
    compute_slope=False to skip it; s0 is then nan).
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")

    def objective(eps):
        stats = transmission_stats(model, M, eps)
        return stats.mu * LN2 / stats.quantile_q

    eps_star, eb_min = minimize_unimodal(objective, _EPS_LO, _EPS_HI, tol=1e-9)
    a_coeff = sum_quantile(model, M, eps_star) / LN2
    if source.kind == MMPS:
        eb_min *= math.expm1(theta) / theta
    s0 = math.nan
    if compute_slope:
        pts = curve(source, model, M, OPTIMAL, theta, sorted(slope_snrs))
        _, s0 = slope_numeric(pts)
    return EeResult(eb_min=eb_min, s0=s0, regime=OPTIMAL, eps_star=eps_star, a_coeff=a_coeff)


def curve(
    source: SourceModel,
    model: FadingModel,
    M: int,
    policy: str,
    theta: float,
    snr_grid,
    eps: float | None = None,
) -> list[CurvePoint]:
    """Throughput-vs-energy-per-bit samples along an ascending snr grid.

    Points where the supportable rate is zero carry eb_db = +inf.
    """
    snrs = [float(s) for s in snr_grid]
    if not snrs or any(s <= 0 for s in snrs) or any(
        b <= a for a, b in zip(snrs, snrs[1:])
    ):
        raise ValueError("snr_grid must be positive and strictly ascending")
    if policy == FIXED:
        if eps is None:
            raise ValueError("fixed policy needs eps")
        fn = lambda s: throughput_at(source, model, M, theta, s, eps=eps)
    elif policy == OPTIMAL:
        fn = lambda s: optimal_rate_at_snr(source, model, M, theta, s).r_avg
    else:
        raise ValueError(f"policy must be 'fixed' or 'optimal', got {policy!r}")
    r_avgs = parallel_map(fn, snrs)
    return [
        CurvePoint(snr=s, r_avg=r, eb_db=10.0 * math.log10(s / r) if r > 0 else math.inf)
        for s, r in zip(snrs, r_avgs)
    ]


def slope_numeric(points) -> tuple[float, float]:
    """(eb_min, s0) estimated from low-snr curve points by extrapolation to 0.

    Fits r(snr)/snr with a polynomial through the points (a one-sided
    finite-difference stencil with Richardson-style extrapolation, using the
    exact anchor r(0) = 0); the value and derivative at 0 give the first two
    snr-derivatives of the throughput. Needs >= 3 points with min(snr) <=
    1e-3 and max(snr) <= 0.1; degenerate or badly scaled stencils raise
    IllConditionedError.
    """
    pts = [(p.snr, p.r_avg) if isinstance(p, CurvePoint) else (p[0], p[1]) for p in points]
    if len(pts) < 3:
        raise IllConditionedError("need at least three curve points near snr = 0")
    snr = np.array([p[0] for p in pts], dtype=float)
    r = np.array([p[1] for p in pts], dtype=float)
    if np.any(snr <= 0) or np.any(np.diff(snr) <= 0):
        raise IllConditionedError("snr stencil must be positive and strictly ascending")
    if snr[0] > 1e-3 or snr[-1] > 0.1:
        raise IllConditionedError("stencil too far from snr = 0 for a trustworthy limit")
    if np.any(r <= 0):
        raise IllConditionedError("zero-throughput point in the stencil")
    g = r / snr
    t = snr / snr[-1]  # scaled abscissa for conditioning
    V = np.vander(t, N=len(t), increasing=True)
    cond = np.linalg.cond(V)
    if cond > 1e8:
        raise IllConditionedError(f"stencil Vandermonde condition {cond:.3g} too large")
    coef = np.linalg.solve(V, g)
    g0 = float(coef[0])  # = dr/dsnr at 0
    g1 = float(coef[1]) / snr[-1]  # = d2r/dsnr2 at 0, halved
    if g0 <= 0 or g1 >= 0:
        raise IllConditionedError("extrapolated derivatives have unphysical signs")
    eb_min = 1.0 / g0
    s0 = -(g0 * g0) * LN2 / g1
    return eb_min, s0
