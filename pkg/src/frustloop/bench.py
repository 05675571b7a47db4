"""Hardness-measurement harness.

Batched time-to-solution collection, log-normal percentile statistics,
reference sweep-budget and peak-density formulas, density scans with peak
detection, and size-scaling studies. Scans emit one JSON-serializable
record per grid point (full sample lists included) plus an optional CSV
summary.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from .generate import GenParams, generate_instance
from .solve import AnnealSchedule, solve_with_restarts

__all__ = [
    "HardnessStats",
    "lognormal_stats",
    "default_nsweep",
    "rho_peak_reference",
    "collect_point",
    "density_scan",
    "scaling_study",
    "fit_power_law",
    "fit_exponential",
    "write_jsonl",
    "write_csv_summary",
]


@dataclass(frozen=True)
class HardnessStats:
    k: int
    mu_hat: float
    sigma_hat: float
    p5: float
    p50: float
    p95: float
    geo_mean: float
    censored_count: int = 0


def lognormal_stats(samples, censored_count: int = 0) -> HardnessStats:
    """Log-normal summary of N_tot samples.

    mu_hat is the mean of logs, sigma_hat the (k-1)-normalized standard
    deviation of logs; the percentile estimates are exp(mu_hat +/- 2
    sigma_hat) and the median estimate exp(mu_hat).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 2:
        raise ValueError("need at least 2 samples for the spread estimate")
    if np.any(x < 1):
        raise ValueError("sweep counts must be >= 1")
    logs = np.log(x)
    mu = float(logs.mean())
    sigma = float(logs.std(ddof=1))
    return HardnessStats(
        k=int(x.size),
        mu_hat=mu,
        sigma_hat=sigma,
        p5=math.exp(mu - 2.0 * sigma),
        p50=math.exp(mu),
        p95=math.exp(mu + 2.0 * sigma),
        geo_mean=math.exp(mu),
        censored_count=censored_count,
    )


def default_nsweep(n: int, f: float, fit: str = "second") -> int:
    """Reference sweep budget from the calibration fits (size factor times
    frustration cubic). The second-iteration fit is the default; the first
    is kept for provenance."""
    if n < 2 or not 0.0 < f < 0.25:
        raise ValueError("need n >= 2 and 0 < f < 0.25")
    if fit == "second":
        val = (1.29 * n * n - 33.1 * n + 1664.0) * (
            41.4 * f**3 - 11.7 * f**2 + 1.06 * f - 0.018
        )
    elif fit == "first":
        val = (0.504 * n * n - 13.3 * n + 311.0) * (
            193.0 * f**3 - 52.7 * f**2 + 4.73 * f - 0.102
        )
    else:
        raise ValueError("fit must be 'second' or 'first'")
    if val <= 0:
        warnings.warn(
            f"sweep fit non-positive at n={n}, f={f}; clamping to 1", stacklevel=2
        )
        return 1
    return max(1, round(val))


def rho_peak_reference(n: int) -> float:
    """Fitted peak-hardness loop density 0.3035 + 0.2952 exp(-0.0196 n);
    intended for n >= 2 (smaller n evaluates the formula anyway)."""
    return 0.3035 + 0.2952 * math.exp(-0.0196 * n)


def _derived_seed(master: int, *key) -> int:
    return int(np.random.SeedSequence(master, spawn_key=tuple(key)).generate_state(1)[0])


def collect_point(n, m, f, rho, k, master_seed, point_idx=0, n_sweep=None,
                  max_runs=10_000, mode="random", d=0.5, beta_min=0.01):
    """Generate and solve k instances at one parameter point.

    Returns (samples, censored_count): N_tot per instance, with unsolved
    instances right-censored at n_sweep * max_runs. Seeds are derived from
    the master seed and (point, instance) indices, so grid points and
    instances can be computed in any order or in parallel.
    """
    if n_sweep is None:
        n_sweep = default_nsweep(n, f)
    samples = []
    censored = 0
    for idx in range(k):
        gseed = _derived_seed(master_seed, point_idx, idx, 0)
        sseed = _derived_seed(master_seed, point_idx, idx, 1)
        p = GenParams(n=n, m=m, f=f, rho=rho, seed=gseed, mode=mode, d=d)
        inst = generate_instance(p)
        sched = AnnealSchedule(n_sweep=n_sweep, max_runs=max_runs, seed=sseed,
                               beta_min=beta_min)
        rec = solve_with_restarts(inst, inst.ground_energy, sched)
        if rec.found:
            samples.append(rec.n_tot)
        else:
            samples.append(n_sweep * max_runs)
            censored += 1
    return samples, censored


def density_scan(n, f, densities, samples_per_point, master_seed, m=None,
                 n_sweep=None, max_runs=10_000, mode="random", d=0.5,
                 statistic="p95"):
    """Sweep loop density and locate the hardness peak.

    Returns (records, peak_rho); each record carries the density, the full
    sample list and the aggregated HardnessStats. The peak is the argmax
    of the configured statistic (p95 by default, p50 for median-based
    studies).
    """
    if not densities:
        raise ValueError("densities must be nonempty")
    if m is None:
        m = n
    records = []
    for point_idx, rho in enumerate(densities):
        samples, censored = collect_point(
            n, m, f, rho, samples_per_point, master_seed, point_idx,
            n_sweep=n_sweep, max_runs=max_runs, mode=mode, d=d,
        )
        stats = lognormal_stats(samples, censored)
        records.append({
            "n": n, "m": m, "f": f, "rho": rho, "mode": mode,
            "samples": samples, "stats": asdict(stats),
        })
    peak_rho = max(records, key=lambda r: r["stats"][statistic])["rho"]
    return records, peak_rho


def fit_power_law(sizes, values):
    """Least squares of ln N = ln A + b ln n; returns (A, b, residual)."""
    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    if x.size < 3:
        raise ValueError("need at least 3 sizes to fit")
    b, lna = np.polyfit(x, y, 1)
    resid = float(np.sum((y - (lna + b * x)) ** 2))
    return float(np.exp(lna)), float(b), resid


def fit_exponential(sizes, values):
    """Least squares of ln N = ln A + b n; returns (A, b, residual)."""
    x = np.asarray(sizes, dtype=np.float64)
    y = np.log(np.asarray(values, dtype=np.float64))
    if x.size < 3:
        raise ValueError("need at least 3 sizes to fit")
    b, lna = np.polyfit(x, y, 1)
    resid = float(np.sum((y - (lna + b * x)) ** 2))
    return float(np.exp(lna)), float(b), resid


def scaling_study(f, sizes, samples_per_point, master_seed, n_sweep=None,
                  max_runs=10_000, mode="random", d=0.5):
    """Geometric-mean TTS across sizes at the reference peak density.

    Fits both a power law and an exponential in log space and reports both
    with residuals; model selection is left to the caller.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be sorted ascending")
    records = []
    geo_means = []
    for point_idx, n in enumerate(sizes):
        rho = rho_peak_reference(n)
        samples, censored = collect_point(
            n, n, f, rho, samples_per_point, master_seed, point_idx,
            n_sweep=n_sweep, max_runs=max_runs, mode=mode, d=d,
        )
        stats = lognormal_stats(samples, censored)
        geo_means.append(stats.geo_mean)
        records.append({
            "n": n, "m": n, "f": f, "rho": rho, "mode": mode,
            "samples": samples, "stats": asdict(stats),
        })
    pa, pb, pres = fit_power_law(sizes, geo_means)
    ea, eb, eres = fit_exponential(sizes, geo_means)
    fits = {
        "power_law": {"A": pa, "b": pb, "residual": pres},
        "exponential": {"A": ea, "b": eb, "residual": eres},
    }
    return records, fits


def write_jsonl(records, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def write_csv_summary(records, path) -> None:
    cols = ["n", "f", "rho", "k", "mu_hat", "sigma_hat", "p5", "p50", "p95",
            "censored_count"]
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for rec in records:
            st = rec["stats"]
            w.writerow([rec["n"], rec["f"], rec["rho"], st["k"], st["mu_hat"],
                        st["sigma_hat"], st["p5"], st["p50"], st["p95"],
                        st["censored_count"]])
