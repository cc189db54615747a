"""Energy efficiency of chase-combining HARQ links under statistical queuing constraints.

Computes and cross-validates minimum energy per bit, wideband slope, and
throughput-vs-energy curves for constant-rate and Markov-modulated arrival
sources, in fixed-outage and throughput-optimal-rate regimes, with Monte
Carlo and queue-level simulators as independent oracles.
"""

__version__ = "0.1.0"

from .energy import (
    CurvePoint,
    EeResult,
    OptimalPoint,
    curve,
    ee_fixed_outage,
    ee_optimal_rate,
    optimal_outage_at_snr,
    optimal_rate_at_snr,
    slope_numeric,
    throughput_at,
)
from .errors import (
    BracketError,
    IllConditionedError,
    NumericFailure,
    UnstableQueueError,
    UnsupportableLoadError,
)
from .fading import FadingModel, nakagami, rayleigh, sum_cdf, sum_quantile
from .harq import (
    TransmissionStats,
    fixed_outage_rate,
    fixed_outage_throughput,
    moments_total_time,
    pmf_transmission_time,
    pmf_transmission_time_poisson,
    rayleigh_poisson_moments,
    stats_at_threshold,
    throughput_small_theta,
    transmission_stats,
)
from .montecarlo import SimResult, SimSpec, sample_z, simulate
from .queuesim import QueueTrace, simulate_queue
from .sources import (
    SourceModel,
    constant_source,
    discrete_markov,
    lmgf_arrival,
    markov_fluid,
    mmps,
    solve_rate_param,
    solve_throughput,
    theta_zero_limit_check,
)

__all__ = [
    "__version__",
    "BracketError",
    "CurvePoint",
    "EeResult",
    "FadingModel",
    "IllConditionedError",
    "NumericFailure",
    "OptimalPoint",
    "QueueTrace",
    "SimResult",
    "SimSpec",
    "SourceModel",
    "TransmissionStats",
    "UnstableQueueError",
    "UnsupportableLoadError",
    "constant_source",
    "curve",
    "discrete_markov",
    "ee_fixed_outage",
    "ee_optimal_rate",
    "fixed_outage_rate",
    "fixed_outage_throughput",
    "lmgf_arrival",
    "markov_fluid",
    "mmps",
    "moments_total_time",
    "nakagami",
    "optimal_outage_at_snr",
    "optimal_rate_at_snr",
    "pmf_transmission_time",
    "pmf_transmission_time_poisson",
    "rayleigh",
    "rayleigh_poisson_moments",
    "sample_z",
    "simulate",
    "simulate_queue",
    "slope_numeric",
    "solve_rate_param",
    "solve_throughput",
    "stats_at_threshold",
    "sum_cdf",
    "sum_quantile",
    "theta_zero_limit_check",
    "throughput_at",
    "throughput_small_theta",
    "transmission_stats",
]
