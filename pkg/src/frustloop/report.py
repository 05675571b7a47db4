"""Render benchmark results to figures and a delimited summary.

Consumes the JSON-lines records produced by the bench module and writes
PNG figures (hardness curves, scaling fits) next to a CSV summary.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bench import fit_exponential, fit_power_law, write_csv_summary

__all__ = [
    "read_jsonl",
    "density_curve_figure",
    "scaling_figure",
    "render_report",
]


def read_jsonl(path):
    records = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def density_curve_figure(records, path):
    """Loop density vs sweep-count percentiles, one curve per (n, f)."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    by_key = {}
    for rec in records:
        by_key.setdefault((rec["n"], rec["f"]), []).append(rec)
    for (n, f), recs in sorted(by_key.items()):
        recs = sorted(recs, key=lambda r: r["rho"])
        rho = [r["rho"] for r in recs]
        p95 = [r["stats"]["p95"] for r in recs]
        p50 = [r["stats"]["p50"] for r in recs]
        p5 = [r["stats"]["p5"] for r in recs]
        line, = ax.plot(rho, p95, "o-", label=f"n={n}, f={f} (p95)")
        ax.fill_between(rho, p5, p95, alpha=0.15, color=line.get_color())
        ax.plot(rho, p50, "--", color=line.get_color(), alpha=0.7)
    ax.set_xlabel(r"loop density $\rho$")
    ax.set_ylabel(r"sweeps to solution $N_{tot}$")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def scaling_figure(records, path):
    """Size vs geometric-mean sweeps on log-log axes with both fits."""
    recs = sorted(records, key=lambda r: r["n"])
    sizes = np.array([r["n"] for r in recs], dtype=float)
    geo = np.array([r["stats"]["geo_mean"] for r in recs])
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(sizes, geo, "ko", label="geometric mean")
    if sizes.size >= 3:
        xs = np.linspace(sizes.min(), sizes.max(), 200)
        pa, pb, _ = fit_power_law(sizes, geo)
        ea, eb, _ = fit_exponential(sizes, geo)
        ax.plot(xs, pa * xs**pb, "-", label=f"power law $b$={pb:.2f}")
        ax.plot(xs, ea * np.exp(eb * xs), "--", label=f"exponential $b$={eb:.3f}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel(r"geometric mean $N_{tot}$")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report(records, out_dir):
    """Write the CSV summary and every applicable figure into out_dir.

    A density figure is drawn when records span multiple densities, a
    scaling figure when they span multiple sizes. Returns the written
    paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    csv_path = os.path.join(out_dir, "summary.csv")
    write_csv_summary(records, csv_path)
    written.append(csv_path)
    rhos = {r["rho"] for r in records}
    sizes = {r["n"] for r in records}
    if len(rhos) > 1:
        written.append(
            density_curve_figure(records, os.path.join(out_dir, "density_scan.png"))
        )
    if len(sizes) > 1:
        written.append(
            scaling_figure(records, os.path.join(out_dir, "scaling.png"))
        )
    return written
