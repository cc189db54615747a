"""Arrival-process log moment generating functions and throughput solvers.

The maximum average arrival rate a queue can carry under QoS exponent theta
solves the large-deviations balance

    Lambda_a(theta) + Lambda_c(-theta) = 0,

with Lambda_c(-theta) = -theta * C_E for effective capacity C_E. Four source
models are supported: constant rate, ON-OFF discrete-time Markov, ON-OFF
Markov fluid, and ON-OFF Markov-modulated Poisson (MMPS). For each, the
balance is inverted in closed form; squaring the radical during inversion can
in principle introduce spurious roots, so branch validity is asserted after
the fact instead of assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportableLoadError

CONSTANT = "constant"
DISCRETE_MARKOV = "dmarkov"
FLUID = "fluid"
MMPS = "mmps"

_KINDS = (CONSTANT, DISCRETE_MARKOV, FLUID, MMPS)


@dataclass(frozen=True)
class SourceModel:
    """Two-state arrival source (or the constant-rate degenerate case).

    Discrete-time: p11 = Pr{stay OFF}, p22 = Pr{stay ON}; p22 = 1 is allowed
    and degenerates to the constant source. Continuous-time (fluid / MMPS):
    alpha = OFF->ON rate, beta = ON->OFF rate per block; beta = 0 likewise
    degenerates to the constant source.
    """

    kind: str
    p11: float | None = None
    p22: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == DISCRETE_MARKOV:
            if self.p11 is None or self.p22 is None:
                raise ValueError("discrete Markov source needs p11 and p22")
            if not (0.0 <= self.p11 < 1.0):
                raise ValueError(f"p11 must lie in [0, 1), got {self.p11}")
            if not (0.0 <= self.p22 <= 1.0):
                raise ValueError(f"p22 must lie in [0, 1], got {self.p22}")
        elif self.kind in (FLUID, MMPS):
            if self.alpha is None or self.beta is None:
                raise ValueError(f"{self.kind} source needs alpha and beta")
            if not (self.alpha > 0):
                raise ValueError(f"alpha must be positive, got {self.alpha}")
            if not (self.beta >= 0):
                raise ValueError(f"beta must be nonnegative, got {self.beta}")

    @property
    def p_on(self) -> float:
        """Stationary probability of the ON state (1 for the constant source)."""
        if self.kind == CONSTANT:
            return 1.0
        if self.kind == DISCRETE_MARKOV:
            return (1.0 - self.p11) / (2.0 - self.p11 - self.p22)
        return self.alpha / (self.alpha + self.beta)


def constant_source() -> SourceModel:
    return SourceModel(CONSTANT)


def discrete_markov(p11: float, p22: float) -> SourceModel:
    return SourceModel(DISCRETE_MARKOV, p11=p11, p22=p22)


def markov_fluid(alpha: float, beta: float) -> SourceModel:
    return SourceModel(FLUID, alpha=alpha, beta=beta)


def mmps(alpha: float, beta: float) -> SourceModel:
    return SourceModel(MMPS, alpha=alpha, beta=beta)


def lmgf_arrival(source: SourceModel, theta: float, rate_param: float) -> float:
    """Asymptotic log-MGF of the cumulative arrivals, per block.

    ``rate_param`` is the constant rate a, the ON-state rate r, or the
    ON-state Poisson intensity nu, according to the source kind.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if rate_param < 0:
        raise ValueError(f"rate parameter must be nonnegative, got {rate_param}")
    if source.kind == CONSTANT:
        return rate_param * theta
    if source.kind == DISCRETE_MARKOV:
        e = math.exp(rate_param * theta)
        p11, p22 = source.p11, source.p22
        disc = (p11 + p22 * e) ** 2 - 4.0 * (p11 + p22 - 1.0) * e
        return math.log(0.5 * (p11 + p22 * e + math.sqrt(disc)))
    # Fluid and MMPS share one algebraic form: MMPS substitutes the per-block
    # Poisson log-MGF (e^theta - 1) nu for theta * r.
    y = rate_param * theta if source.kind == FLUID else math.expm1(theta) * rate_param
    a, b = source.alpha, source.beta
    return 0.5 * (y - a - b + math.sqrt((y - a - b) ** 2 + 4.0 * a * y))


def solve_rate_param(source: SourceModel, c_e: float, theta: float) -> float:
    """State rate parameter (a, r, or nu) balancing arrivals against service.

    Closed-form inversion of the balance equation; raises
    UnsupportableLoadError when the inversion leaves the valid branch.
    """
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if c_e < 0:
        raise ValueError(f"effective capacity must be nonnegative, got {c_e}")
    if source.kind == CONSTANT:
        return c_e
    if source.kind == DISCRETE_MARKOV:
        p11, p22 = source.p11, source.p22
        um1 = math.expm1(theta * c_e)  # u - 1 with u = e^{theta C_E}
        u = 1.0 + um1
        denom = u * p22 + 1.0 - p11 - p22
        s = u * (u - p11) / denom
        if s <= 0:
            raise UnsupportableLoadError(
                f"discrete-Markov balance produced nonpositive spectral point s={s}"
            )
        if 2.0 * u - p11 - p22 * s < 0:
            raise UnsupportableLoadError(
                "discrete-Markov balance left the valid branch of the radical"
            )
        # s - 1 expressed without cancellation: keeps r accurate as C_E -> 0.
        sm1 = um1 * (u + 1.0 - p11 - p22) / denom
        return math.log1p(sm1) / theta
    # Fluid: r = C_E (theta C_E + alpha + beta) / (theta C_E + alpha).
    a, b = source.alpha, source.beta
    tc = theta * c_e
    r = c_e * (tc + a + b) / (tc + a)
    if 2.0 * tc - (theta * r - a - b) < 0:
        raise UnsupportableLoadError("fluid balance left the valid branch of the radical")
    if source.kind == FLUID:
        return r
    return theta * r / math.expm1(theta)


def solve_throughput(source: SourceModel, c_e: float, theta: float) -> float:
    """Maximum supportable average arrival rate: solved state rate times P_ON."""
    return solve_rate_param(source, c_e, theta) * source.p_on


def theta_zero_limit_check(source: SourceModel, c_e: float, thetas) -> np.ndarray:
    """|r_avg(theta) - C_E| over a theta sequence; vanishes linearly in theta.

    As the QoS constraint relaxes, every source model must collapse to the
    constant-arrival throughput C_E.
    """
    return np.array([abs(solve_throughput(source, c_e, th) - c_e) for th in thetas])
