"""Command-line surface emitting machine-readable results.

Five subcommands (`ee`, `curve`, `optrate`, `simulate`, `queue`) wrap the
library with defaults theta=0.1, eps=0.1, Rayleigh fading of unit mean power.
Parameters come from flags or a single JSON config file, flags winning.
Output is CSV (fixed header per command) or JSON (same rows plus the full
effective config and the library version). Exit codes: 0 success, 2 invalid
input, 3 numeric failure. dB values are rounded to 6 decimals only at
serialization; all other floats are emitted at full precision.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields

from . import __version__
from .energy import curve, ee_fixed_outage, ee_optimal_rate, optimal_rate_at_snr
from .errors import NumericFailure
from .fading import FadingModel
from .harq import LN2, fixed_outage_rate
from .montecarlo import SimSpec, simulate
from .queuesim import simulate_queue, transmission_stats_from_threshold
from .sources import SourceModel


@dataclass
class RunConfig:
    command: str
    source: str = "constant"
    p11: float = 0.5
    p22: float = 0.5
    alpha: float = 0.5
    beta: float = 0.5
    fading: str = "rayleigh"
    mean_power: float = 1.0
    m_shape: float = 2.0
    M: int = 1
    eps: float = 0.1
    theta: float = 0.1
    snr: float = 1.0
    snr_grid: str = "1e-4:1:25"
    scheme: str = "cc"
    rate: float | None = None
    samples: int = 10 ** 6
    seed: int = 0
    policy: str = "fixed"
    blocks: int = 10 ** 6
    load: float = 1.0
    out: str | None = None
    format: str = "csv"

    def source_model(self) -> SourceModel:
        kind = self.source
        if kind == "constant":
            return SourceModel(kind)
        if kind == "dmarkov":
            return SourceModel(kind, p11=self.p11, p22=self.p22)
        return SourceModel(kind, alpha=self.alpha, beta=self.beta)

    def fading_model(self) -> FadingModel:
        if self.fading == "rayleigh":
            return FadingModel("rayleigh", self.mean_power)
        return FadingModel(self.fading, self.mean_power, self.m_shape)


_DB_COLUMNS = {"eb_db", "eb_min_db"}

HEADERS = {
    "ee": ["source", "regime", "eb_min", "eb_min_db", "s0", "eps_star", "a"],
    "curve": ["snr", "r_avg", "eb_db"],
    "optrate": ["snr", "rate", "eps", "r_avg", "eb_db"],
    "simulate": ["t", "pmf_analytic", "pmf_empirical", "stderr"],
    "queue": ["q", "overflow_prob"],
}


def parse_snr_grid(text: str) -> list[float]:
    """'lo:hi:n' -> n log-spaced points; append ':lin' for linear spacing."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise ValueError(f"snr grid must look like lo:hi:n or lo:hi:n:lin, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo <= hi) or n < 1 or (n > 1 and lo == hi):
        raise ValueError(f"snr grid needs 0 < lo <= hi and n >= 1, got {text!r}")
    if n == 1:
        return [lo]
    if len(parts) == 4 and parts[3] == "lin":
        step = (hi - lo) / (n - 1)
        return [lo + step * i for i in range(n)]
    ratio = (hi / lo) ** (1.0 / (n - 1))
    return [lo * ratio ** i for i in range(n)]


def _cmd_ee(cfg: RunConfig):
    source = cfg.source_model()
    model = cfg.fading_model()
    if cfg.policy == "fixed":
        res = ee_fixed_outage(source, model, cfg.M, cfg.eps, cfg.theta)
    else:
        res = ee_optimal_rate(source, model, cfg.M, cfg.theta)
    rows = [[cfg.source, res.regime, res.eb_min, res.eb_min_db, res.s0, res.eps_star, res.a_coeff]]
    return rows, {}


def _cmd_curve(cfg: RunConfig):
    points = curve(
        cfg.source_model(),
        cfg.fading_model(),
        cfg.M,
        cfg.policy,
        cfg.theta,
        parse_snr_grid(cfg.snr_grid),
        eps=cfg.eps if cfg.policy == "fixed" else None,
    )
    return [[p.snr, p.r_avg, p.eb_db] for p in points], {}


def _cmd_optrate(cfg: RunConfig):
    source, model = cfg.source_model(), cfg.fading_model()
    rows = []
    for s in parse_snr_grid(cfg.snr_grid):
        pt = optimal_rate_at_snr(source, model, cfg.M, cfg.theta, s)
        eb_db = 10.0 * math.log10(s / pt.r_avg) if pt.r_avg > 0 else math.inf
        rows.append([s, pt.rate, pt.outage, pt.r_avg, eb_db])
    return rows, {}


def _cmd_simulate(cfg: RunConfig):
    model = cfg.fading_model()
    R = cfg.rate if cfg.rate is not None else fixed_outage_rate(model, cfg.M, cfg.eps, cfg.snr)
    spec = SimSpec(
        scheme=cfg.scheme,
        model=model,
        snr=cfg.snr,
        rate=R,
        deadline=cfg.M,
        n_samples=cfg.samples,
        seed=cfg.seed,
        theta=cfg.theta,
    )
    res = simulate(spec)
    if cfg.scheme == "cc":
        if R == 0.0 or cfg.snr == 0.0:
            threshold = 0.0 if R == 0.0 else math.inf
        else:
            threshold = math.expm1(R * LN2) / cfg.snr
        analytic = transmission_stats_from_threshold(model, cfg.M, threshold)
        pmf_analytic = analytic.pmf_T
        outage_analytic = analytic.outage
    else:
        pmf_analytic = [math.nan] * cfg.M  # no closed form for IR
        outage_analytic = math.nan
    rows = [
        [t + 1, pmf_analytic[t], res.empirical_pmf[t], res.stderr_pmf[t]]
        for t in range(cfg.M)
    ]
    extra = {
        "rate": R,
        "outage_rate": res.outage_rate,
        "outage_analytic": outage_analytic,
        "stderr_outage": res.stderr_outage,
        "mu_hat": res.mu_hat,
        "sigma2_hat": res.sigma2_hat,
        "stderr_mu": res.stderr_mu,
        "stderr_sigma2": res.stderr_sigma2,
        "r_avg_hat": res.r_avg_hat,
        "stderr_r_avg": res.stderr_r_avg,
    }
    return rows, extra


def _cmd_queue(cfg: RunConfig):
    trace = simulate_queue(
        cfg.source_model(),
        cfg.fading_model(),
        cfg.M,
        cfg.snr,
        cfg.theta,
        cfg.blocks,
        cfg.seed,
        eps=cfg.eps if cfg.rate is None else None,
        rate=cfg.rate,
        load=cfg.load,
    )
    rows = [[q, p] for q, p in zip(trace.thresholds, trace.overflow_prob)]
    extra = {
        "theta_hat": trace.theta_hat,
        "varsigma_hat": trace.varsigma_hat,
        "rsquared": trace.rsquared,
        "mean_drift": trace.mean_drift,
        "arrival_rate": trace.arrival_rate,
        "bits_removed": trace.bits_removed,
        "bits_delivered": trace.bits_delivered,
    }
    return rows, extra


_COMMANDS = {
    "ee": _cmd_ee,
    "curve": _cmd_curve,
    "optrate": _cmd_optrate,
    "simulate": _cmd_simulate,
    "queue": _cmd_queue,
}


def _csv_cell(value, column: str) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    if column in _DB_COLUMNS:
        return f"{v:.6f}"
    return repr(v)


def _json_value(value, column: str):
    if value is None or isinstance(value, (str, int)):
        return value
    v = float(value)
    if math.isinf(v) or math.isnan(v):
        return None
    if column in _DB_COLUMNS:
        return round(v, 6)
    return v


def render_csv(command: str, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = HEADERS[command]
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v, c) for v, c in zip(row, header)])
    return buf.getvalue()


def render_json(cfg: RunConfig, rows, extra) -> str:
    header = HEADERS[cfg.command]
    doc = {
        "command": cfg.command,
        "version": __version__,
        "config": asdict(cfg),
        "columns": header,
        "rows": [[_json_value(v, c) for v, c in zip(row, header)] for row in rows],
    }
    doc.update({k: _json_value(v, k) for k, v in extra.items()})
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="harq-ee", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("ee", "minimum energy per bit and wideband slope"),
        ("curve", "throughput vs energy-per-bit curve over an snr grid"),
        ("optrate", "throughput-maximizing rate per snr grid point"),
        ("simulate", "Monte Carlo link simulation at one operating point"),
        ("queue", "buffer simulation and overflow-exponent fit"),
    ]:
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--config", help="JSON config file; flags override its values")
        s.add_argument("--source", choices=["constant", "dmarkov", "fluid", "mmps"])
        s.add_argument("--p11", type=float)
        s.add_argument("--p22", type=float)
        s.add_argument("--alpha", type=float)
        s.add_argument("--beta", type=float)
        s.add_argument("--fading", choices=["rayleigh", "nakagami"])
        s.add_argument("--mean-power", dest="mean_power", type=float)
        s.add_argument("--m-shape", dest="m_shape", type=float)
        s.add_argument("--M", type=int)
        s.add_argument("--eps", type=float)
        s.add_argument("--theta", type=float)
        s.add_argument("--snr", type=float)
        s.add_argument("--snr-grid", dest="snr_grid")
        s.add_argument("--scheme", choices=["cc", "ir"])
        s.add_argument("--rate", type=float)
        s.add_argument("--samples", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--policy", choices=["fixed", "optimal"])
        s.add_argument("--blocks", type=int)
        s.add_argument("--load", type=float)
        s.add_argument("--out")
        s.add_argument("--format", choices=["csv", "json"])
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    allowed = {f.name for f in fields(RunConfig)} - {"command"}
    merged = {}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        if not isinstance(file_cfg, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = set(file_cfg) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for name in allowed:
        val = getattr(args, name, None)
        if val is not None:
            merged[name] = val
    return RunConfig(command=args.command, **merged)


def run(cfg: RunConfig) -> str:
    rows, extra = _COMMANDS[cfg.command](cfg)
    if cfg.format == "json":
        return render_json(cfg, rows, extra)
    return render_csv(cfg.command, rows)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        text = run(cfg)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"harq-ee: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"harq-ee: numeric failure: {exc}", file=sys.stderr)
        return 3
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
