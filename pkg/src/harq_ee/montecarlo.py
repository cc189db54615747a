"""Monte Carlo link simulator for chase-combining and incremental-redundancy HARQ.

Serves as the independent oracle for the analytic transmission-time module:
per message, i.i.d. block powers are drawn and the decoding rule applied
round by round up to the deadline,

    CC: log2(1 + snr * sum_{i<=t} z_i)      >= R
    IR: sum_{i<=t} log2(1 + snr * z_i)      >= R,

with deadline violations recorded as outages. Restart chains are never
simulated: the total-time moments come from the analytic restart formulas
fed with the empirical per-message pmf, which has strictly lower variance
and handles the geometric restart structure exactly.

Samples are partitioned into fixed-size chunks, each driven by its own
counter-based (Philox) stream keyed on (seed, chunk index), so results are
bit-identical no matter how many workers execute the chunks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fading import FadingModel
from .harq import _moments_from_pmf, throughput_small_theta
from .util import parallel_map

CC = "cc"
IR = "ir"

DEFAULT_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimSpec:
    """One simulation run: scheme, channel, operating point and sampling plan."""

    scheme: str
    model: FadingModel
    snr: float
    rate: float
    deadline: int
    n_samples: int
    seed: int
    theta: float = 0.0
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.scheme not in (CC, IR):
            raise ValueError(f"scheme must be 'cc' or 'ir', got {self.scheme!r}")
        if self.snr < 0:
            raise ValueError(f"snr must be nonnegative, got {self.snr}")
        if self.rate < 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")
        if self.deadline < 1 or self.deadline != int(self.deadline):
            raise ValueError(f"deadline must be a positive integer, got {self.deadline}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")


@dataclass
class SimResult:
    """Empirical transmission statistics with standard errors."""

    empirical_pmf: np.ndarray
    outage_rate: float
    mu_hat: float
    sigma2_hat: float
    r_avg_hat: float
    stderr_pmf: np.ndarray
    stderr_outage: float
    stderr_mu: float
    stderr_sigma2: float
    stderr_r_avg: float
    n_samples: int


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    """Independent keyed stream for one chunk (128-bit Philox key)."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(index)))


def sample_z(model: FadingModel, rng: np.random.Generator, size=None):
    """Draw block fading powers from the model's Gamma distribution."""
    return rng.gamma(model.block_shape, model.block_scale, size)


def simulate(spec: SimSpec) -> SimResult:
    """Run the link simulation and reduce to per-message statistics."""
    M = int(spec.deadline)
    edges = list(range(0, spec.n_samples, spec.chunk_size))
    chunks = [(i, min(spec.chunk_size, spec.n_samples - start)) for i, start in enumerate(edges)]
    counts_list = parallel_map(lambda c: _simulate_chunk(spec, *c), chunks)
    counts = np.sum(counts_list, axis=0)  # int64: exact merge in any order

    n = spec.n_samples
    pmf = counts[:M] / n
    outage = counts[M] / n
    mu_hat, sigma2_hat = _moments_from_pmf(pmf, outage, M)
    stderr_mu, stderr_sigma2, stderr_r = _delta_stderr(pmf, outage, M, n, spec.rate, spec.theta)
    r_avg_hat = throughput_small_theta(spec.rate, mu_hat, sigma2_hat, spec.theta)
    return SimResult(
        empirical_pmf=pmf,
        outage_rate=float(outage),
        mu_hat=mu_hat,
        sigma2_hat=sigma2_hat,
        r_avg_hat=r_avg_hat,
        stderr_pmf=np.sqrt(pmf * (1.0 - pmf) / n),
        stderr_outage=float(math.sqrt(outage * (1.0 - outage) / n)),
        stderr_mu=stderr_mu,
        stderr_sigma2=stderr_sigma2,
        stderr_r_avg=stderr_r,
        n_samples=n,
    )


def _simulate_chunk(spec: SimSpec, index: int, n: int) -> np.ndarray:
    M = int(spec.deadline)
    rng = chunk_rng(spec.seed, index)
    z = sample_z(spec.model, rng, size=(n, M))
    if spec.scheme == CC:
        if spec.rate == 0.0:
            threshold = 0.0
        elif spec.snr == 0.0:
            threshold = math.inf
        else:
            # (2^R - 1) / snr via expm1 to keep precision at small rates.
            threshold = math.expm1(spec.rate * math.log(2.0)) / spec.snr
        decoded = np.cumsum(z, axis=1) >= threshold
    else:
        decoded = np.cumsum(np.log2(1.0 + spec.snr * z), axis=1) >= spec.rate
    succeeded = decoded[:, -1]
    first_round = np.argmax(decoded, axis=1)  # 0-based round of first decode
    counts = np.zeros(M + 1, dtype=np.int64)
    counts[:M] = np.bincount(first_round[succeeded], minlength=M)
    counts[M] = n - int(succeeded.sum())
    return counts


def _delta_stderr(
    pmf: np.ndarray, outage: float, M: int, n: int, rate: float, theta: float
) -> tuple[float, float, float]:
    """Delta-method standard errors of mu_hat, sigma2_hat and r_avg_hat.

    All three estimators are smooth functions of the multinomial cell
    proportions (pmf bins plus outage); gradients are taken by central
    differences and pushed through the multinomial covariance.
    """
    if outage >= 1.0 - 1e-9:
        return math.inf, math.inf, math.inf
    pi = np.append(pmf, outage)
    h = 1e-6
    grads = np.zeros((3, M + 1))
    for i in range(M + 1):
        up, dn = pi.copy(), pi.copy()
        up[i] += h
        dn[i] -= h
        mu_u, s2_u = _moments_from_pmf(up[:M], up[M], M)
        mu_d, s2_d = _moments_from_pmf(dn[:M], dn[M], M)
        grads[0, i] = (mu_u - mu_d) / (2 * h)
        grads[1, i] = (s2_u - s2_d) / (2 * h)
        r_u = throughput_small_theta(rate, mu_u, s2_u, theta)
        r_d = throughput_small_theta(rate, mu_d, s2_d, theta)
        grads[2, i] = (r_u - r_d) / (2 * h)
    cov = (np.diag(pi) - np.outer(pi, pi)) / n
    variances = np.einsum("ki,ij,kj->k", grads, cov, grads)
    out = np.sqrt(np.clip(variances, 0.0, None))
    return float(out[0]), float(out[1]), float(out[2])
