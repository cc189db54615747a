#!/usr/bin/env python3
"""Regenerate the standard result tables (CSV) for the main experiments.

Writes into ./out (override with --outdir):

  ee_vs_eps.csv           minimum energy per bit and slope over an outage sweep
  ee_vs_deadline.csv      the same over the retransmission deadline
  curve_cc_fixed.csv      throughput vs energy per bit, fixed-outage rate
  curve_cc_optimal.csv    throughput vs energy per bit, optimal rate
  curve_burstiness.csv    ON-probability sweep for the two Markov source types
  curve_fluid_vs_mmps.csv fluid vs Poisson-modulated arrivals at two QoS levels
  mc_check.csv            Monte Carlo vs analytic transmission-time pmf

Run:  python scripts/reproduce_curves.py [--outdir out] [--samples 1000000]
"""

import argparse
import csv
import math
from pathlib import Path

from harq_ee import (
    SimSpec,
    constant_source,
    curve,
    discrete_markov,
    ee_fixed_outage,
    ee_optimal_rate,
    fixed_outage_rate,
    markov_fluid,
    mmps,
    nakagami,
    rayleigh,
    simulate,
    transmission_stats,
)

SNR_GRID = [10 ** (k / 8) for k in range(-32, 9)]  # 1e-4 .. 10, log-spaced


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def ee_sweeps(outdir):
    ray = rayleigh(1.0)
    const = constant_source()
    rows = []
    for eps in [i / 100 for i in range(1, 91)]:
        for theta in (0.01, 0.1):
            for M in (1, 3, 9):
                r = ee_fixed_outage(const, ray, M, eps, theta)
                rows.append([eps, theta, M, r.eb_min, r.eb_min_db, r.s0])
    write_csv(outdir / "ee_vs_eps.csv", ["eps", "theta", "M", "eb_min", "eb_min_db", "s0"], rows)

    rows = []
    for M in range(1, 13):
        r = ee_fixed_outage(const, ray, M, 0.1, 0.1)
        rows.append([M, r.eb_min, r.eb_min_db, r.s0])
    write_csv(outdir / "ee_vs_deadline.csv", ["M", "eb_min", "eb_min_db", "s0"], rows)


def rate_policy_curves(outdir):
    ray = rayleigh(1.0)
    const = constant_source()
    rows = []
    for M in (1, 3):
        for eps in (0.01, 0.1):
            for p in curve(const, ray, M, "fixed", 0.1, SNR_GRID, eps=eps):
                rows.append([M, eps, p.snr, p.r_avg, p.eb_db])
    write_csv(outdir / "curve_cc_fixed.csv", ["M", "eps", "snr", "r_avg", "eb_db"], rows)

    rows = []
    for M in (1, 3):
        opt = ee_optimal_rate(const, ray, M, 0.1, compute_slope=False)
        for p in curve(const, ray, M, "optimal", 0.1, SNR_GRID):
            rows.append([M, opt.eps_star, p.snr, p.r_avg, p.eb_db])
    write_csv(outdir / "curve_cc_optimal.csv", ["M", "eps_star", "snr", "r_avg", "eb_db"], rows)


def burstiness_curves(outdir):
    nak = nakagami(2.0, 1.0)
    rows = []
    for p_on in (0.2, 0.5, 1.0):
        for M in (3, 9):
            pairs = [
                ("dmarkov", discrete_markov(1 - p_on, p_on)),
                ("fluid", markov_fluid(p_on, 1 - p_on)),
            ]
            for name, src in pairs:
                for p in curve(src, nak, M, "fixed", 0.1, SNR_GRID, eps=0.1):
                    rows.append([name, p_on, M, p.snr, p.r_avg, p.eb_db])
    write_csv(
        outdir / "curve_burstiness.csv",
        ["source", "p_on", "M", "snr", "r_avg", "eb_db"],
        rows,
    )

    rows = []
    for theta in (0.01, 0.2):
        for name, src in [("fluid", markov_fluid(0.5, 0.5)), ("mmps", mmps(0.5, 0.5))]:
            for p in curve(src, nak, 3, "fixed", theta, SNR_GRID, eps=0.1):
                rows.append([name, theta, p.snr, p.r_avg, p.eb_db])
    write_csv(
        outdir / "curve_fluid_vs_mmps.csv",
        ["source", "theta", "snr", "r_avg", "eb_db"],
        rows,
    )


def mc_check(outdir, samples):
    ray = rayleigh(1.0)
    rows = []
    for scheme in ("cc", "ir"):
        for snr in (1e-3, 0.1, 1.0):
            rate = fixed_outage_rate(ray, 3, 0.1, snr)
            res = simulate(SimSpec(scheme, ray, snr, rate, 3, samples, 0, 0.1))
            stats = transmission_stats(ray, 3, 0.1)
            for t in range(3):
                rows.append(
                    [scheme, snr, t + 1, stats.pmf_T[t], res.empirical_pmf[t], res.stderr_pmf[t]]
                )
            rows.append([scheme, snr, "outage", 0.1, res.outage_rate, res.stderr_outage])
    write_csv(
        outdir / "mc_check.csv",
        ["scheme", "snr", "t", "pmf_analytic", "pmf_empirical", "stderr"],
        rows,
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--samples", type=int, default=10 ** 6)
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ee_sweeps(outdir)
    rate_policy_curves(outdir)
    burstiness_curves(outdir)
    mc_check(outdir, args.samples)


if __name__ == "__main__":
    main()
