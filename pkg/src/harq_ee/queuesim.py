"""Block-level buffer simulator validating the exponential overflow decay.

Feeds a buffer with arrivals from one of the source models at the rate the
balance solver declared supportable for a target QoS exponent, serves it
with a simulated chase-combining HARQ link (a completed message, whether
decoded or abandoned at the deadline, removes one rate-unit of bits), and
fits the decay exponent of the stationary overflow probability

    Pr{Q >= q} ~ varsigma * exp(-theta q)

over the linear tail of log Pr{Q >= q}. Fluid and MMPS sources are stepped
through each block with their exact exponential sojourn decomposition (the
per-block ON occupancy is read off the piecewise-linear cumulative ON-time
at block boundaries), so the exponent estimate carries no discretization
bias.

Deadline-violated HARQ cycles admit two accountings. The default,
on_abandon="restart", keeps the message's bits in the buffer and restarts
its transmission, matching the success-renewal service whose moments drive
the throughput solver; this is the accounting under which the solved load
reproduces the target exponent. on_abandon="drop" instead removes the
abandoned message's bits immediately; the buffer then drains faster than
the solver assumed and the fitted exponent exceeds the target. Removed and
delivered bits are tracked separately (they differ only under "drop").
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnstableQueueError
from .fading import FadingModel
from .harq import fixed_outage_rate, stats_at_threshold, throughput_small_theta, transmission_stats
from .montecarlo import chunk_rng
from .sources import CONSTANT, DISCRETE_MARKOV, FLUID, MMPS, SourceModel, solve_rate_param

MIN_BLOCKS = 10 ** 6

# Tail-fit window on the observed queue-length distribution.
_FIT_LO_PCT = 90.0
_FIT_HI_PCT = 99.9


@dataclass
class QueueTrace:
    """Overflow statistics of one simulated run."""

    thresholds: np.ndarray
    overflow_prob: np.ndarray
    theta_hat: float
    varsigma_hat: float
    rsquared: float
    mean_drift: float
    arrival_rate: float
    bits_removed: float
    bits_delivered: float


def simulate_queue(
    source: SourceModel,
    model: FadingModel,
    M: int,
    snr: float,
    theta_target: float,
    n_blocks: int,
    seed: int,
    *,
    eps: float | None = None,
    rate: float | None = None,
    load: float = 1.0,
    on_abandon: str = "restart",
    n_thresholds: int = 64,
) -> QueueTrace:
    """Simulate n_blocks of buffer evolution and fit the overflow exponent.

    The rate policy is either an outage target ``eps`` or an explicit
    ``rate``; arrivals run at ``load`` times the solved supportable rate.
    Raises UnstableQueueError on positive mean drift.
    """
    if (eps is None) == (rate is None):
        raise ValueError("pass exactly one of eps or rate")
    if on_abandon not in ("restart", "drop"):
        raise ValueError(f"on_abandon must be 'restart' or 'drop', got {on_abandon!r}")
    if n_blocks < MIN_BLOCKS:
        raise ValueError(f"n_blocks must be >= {MIN_BLOCKS} for a usable tail fit")
    if not (0.0 < load <= 1.0):
        raise ValueError(f"load must lie in (0, 1], got {load}")
    if theta_target <= 0:
        raise ValueError(f"theta_target must be positive, got {theta_target}")
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")

    if eps is not None:
        R = fixed_outage_rate(model, M, eps, snr)
        stats = transmission_stats(model, M, eps)
    else:
        R = float(rate)
        if R > 0 and snr == 0:
            raise UnstableQueueError("positive rate at zero snr never completes a message")
        threshold = math.expm1(R * math.log(2.0)) / snr if R > 0 else 0.0
        stats = transmission_stats_from_threshold(model, M, threshold)
    c_e = throughput_small_theta(R, stats.mu, stats.sigma2, theta_target)
    rate_param = solve_rate_param(source, c_e, theta_target) * load

    arr_rng = chunk_rng(seed, 1)
    srv_rng = chunk_rng(seed, 2)
    arrivals = _arrivals(source, rate_param, n_blocks, arr_rng)
    service, success_mask = _service(
        stats.pmf_T, stats.outage, M, R, n_blocks, srv_rng, on_abandon
    )

    diffs = arrivals - service
    mean_drift = float(diffs.mean())
    if mean_drift > 0:
        raise UnstableQueueError(f"positive mean drift {mean_drift:.3g}: queue is unstable")

    q_path = _lindley(diffs)
    q_prev = np.concatenate(([0.0], q_path[:-1]))
    # Service can only take what the buffer holds at that block.
    removed = np.minimum(service, q_prev + arrivals)
    bits_removed = float(removed[service > 0].sum())
    bits_delivered = float(removed[success_mask].sum())

    varsigma = float(np.mean(q_path > 0))
    thresholds, overflow, theta_hat, rsq = _tail_fit(q_path, n_thresholds)
    return QueueTrace(
        thresholds=thresholds,
        overflow_prob=overflow,
        theta_hat=theta_hat,
        varsigma_hat=varsigma,
        rsquared=rsq,
        mean_drift=mean_drift,
        arrival_rate=rate_param * source.p_on,
        bits_removed=bits_removed,
        bits_delivered=bits_delivered,
    )


def transmission_stats_from_threshold(model: FadingModel, M: int, threshold: float):
    from .harq import moments_total_time

    stats = stats_at_threshold(model, M, threshold)
    stats.mu, stats.sigma2 = moments_total_time(stats)
    return stats


def _lindley(diffs: np.ndarray) -> np.ndarray:
    """Reflected random walk Q_i = max(0, Q_{i-1} + d_i), vectorized."""
    walk = np.cumsum(diffs)
    floor = np.minimum(np.minimum.accumulate(walk), 0.0)
    return walk - floor


def _arrivals(source: SourceModel, rate_param: float, n: int, rng) -> np.ndarray:
    if source.kind == CONSTANT or rate_param == 0.0:
        return np.full(n, rate_param, dtype=float)
    if source.kind == DISCRETE_MARKOV:
        on = _discrete_on_states(source.p11, source.p22, n, rng)
        return rate_param * on
    on_time = _continuous_on_time(source.alpha, source.beta, n, rng)
    if source.kind == FLUID:
        return rate_param * on_time
    return rng.poisson(rate_param * on_time).astype(float)  # MMPS


def _discrete_on_states(p11: float, p22: float, n: int, rng) -> np.ndarray:
    """ON/OFF indicator per block from geometric sojourns of the two-state chain."""
    p_on = (1.0 - p11) / (2.0 - p11 - p22)
    state = 1 if rng.random() < p_on else 0
    if p22 >= 1.0:
        # ON is absorbing; stationarity puts the chain there from the start.
        return np.ones(n)
    pieces = []
    total = 0
    mean_cycle = 1.0 / (1.0 - p11) + 1.0 / (1.0 - p22)
    while total < n:
        batch = max(64, int(2.2 * (n - total) / mean_cycle) + 16)
        vals = np.empty(batch)
        vals[0::2] = state
        vals[1::2] = 1 - state
        exit_probs = np.where(vals == 1, 1.0 - p22, 1.0 - p11)
        runs = rng.geometric(exit_probs)
        pieces.append(np.repeat(vals, runs))
        total += int(runs.sum())
        state = 1 - int(vals[-1])
    return np.concatenate(pieces)[:n]


def _continuous_on_time(alpha: float, beta: float, n: int, rng) -> np.ndarray:
    """Exact per-block ON occupancy of the continuous two-state chain."""
    p_on = alpha / (alpha + beta)
    if beta == 0.0:
        return np.ones(n)
    state = 1 if rng.random() < p_on else 0
    knots = [np.array([0.0])]
    on_at = [np.array([0.0])]
    t_end, c_end = 0.0, 0.0
    mean_cycle = 1.0 / alpha + 1.0 / beta
    while t_end < n:
        batch = max(64, int(2.2 * (n - t_end) / mean_cycle) + 16)
        on_flags = np.empty(batch)
        on_flags[0::2] = state
        on_flags[1::2] = 1 - state
        rates = np.where(on_flags == 1, beta, alpha)
        sojourn = rng.exponential(1.0, size=batch) / rates
        t = t_end + np.cumsum(sojourn)
        c = c_end + np.cumsum(on_flags * sojourn)
        knots.append(t)
        on_at.append(c)
        t_end, c_end = float(t[-1]), float(c[-1])
        state = 1 - int(on_flags[-1])
    ts = np.concatenate(knots)
    cs = np.concatenate(on_at)
    # Cumulative ON time is piecewise linear with these exact knots, so
    # linear interpolation at block boundaries is exact (up to the roundoff
    # of the long cumsums, clipped back into [0, 1]).
    grid = np.interp(np.arange(n + 1, dtype=float), ts, cs)
    return np.clip(np.diff(grid), 0.0, 1.0)


def _service(pmf, outage, M, R, n, rng, on_abandon) -> tuple[np.ndarray, np.ndarray]:
    """Per-block removals from the simulated HARQ cycle process.

    Each cycle lasts t blocks (success, probability pmf[t-1]) or M blocks
    (deadline violation, probability outage). A success removes R bits; a
    violated deadline removes R only under the "drop" accounting, otherwise
    the message restarts and nothing leaves the buffer.
    """
    service = np.zeros(n)
    success_blocks = np.zeros(n, dtype=bool)
    if R == 0.0:
        return service, success_blocks
    probs = np.append(np.asarray(pmf, dtype=float), outage)
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    mean_cycle = float(np.dot(np.arange(1, M + 1), probs[:M]) + M * outage)
    t_end = 0
    while t_end < n:
        batch = max(64, int(1.05 * (n - t_end) / mean_cycle) + 16)
        draw = np.searchsorted(cum, rng.random(batch), side="right")
        durations = np.where(draw < M, draw + 1, M)
        ends = t_end + np.cumsum(durations) - 1
        keep = ends < n
        success = draw[keep] < M
        if on_abandon == "drop":
            service[ends[keep]] = R
        else:
            service[ends[keep][success]] = R
        success_blocks[ends[keep]] = success
        t_end = int(ends[-1]) + 1
    return service, success_blocks


def _tail_fit(q_path: np.ndarray, n_thresholds: int):
    q_max = float(q_path.max())
    if q_max == 0.0:
        thresholds = np.linspace(0.01, 1.0, n_thresholds)
        return thresholds, np.zeros(n_thresholds), math.inf, math.nan
    lo = float(np.percentile(q_path, _FIT_LO_PCT))
    hi = float(np.percentile(q_path, _FIT_HI_PCT))
    if hi <= lo:
        lo, hi = 0.5 * q_max, 0.999 * q_max
    thresholds = np.linspace(lo, hi, n_thresholds)
    q_sorted = np.sort(q_path)
    n = len(q_path)
    overflow = (n - np.searchsorted(q_sorted, thresholds, side="left")) / n
    mask = overflow > 0
    x, y = thresholds[mask], np.log(overflow[mask])
    if len(x) < 2:
        return thresholds, overflow, math.nan, math.nan
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    rsq = 1.0 - ss_res / ss_tot if ss_tot > 0 else math.nan
    return thresholds, overflow, -float(slope), rsq
