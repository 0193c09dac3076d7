#!/usr/bin/env python3
"""Render a radiation-pattern figure from a pattern CSV.

Usage: plot_pattern.py PATTERN_CSV OUTPUT_IMAGE

One trace per (method, alpha_db) group, angle in degrees against the
transmit pattern in dB.  Legend strings are taken verbatim from the CSV.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

REQUIRED = ["theta_deg", "method", "alpha_db", "et_db"]


def load_groups(csv_path, required):
    frame = pd.read_csv(csv_path, dtype={"method": str, "alpha_db": str}, keep_default_na=False)
    missing = [c for c in required if c not in frame.columns]
    if missing:
        sys.exit(f"{csv_path}: missing column(s): {', '.join(missing)}")
    return frame


def trace_label(method, alpha):
    return f"{method} alpha={alpha} dB" if alpha else method


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="pattern CSV written by the simulation CLI")
    parser.add_argument("out", help="output image path")
    args = parser.parse_args(argv)

    frame = load_groups(args.csv, REQUIRED)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    n_traces = 0
    for (method, alpha), grp in frame.groupby(["method", "alpha_db"], sort=False):
        ax.plot(grp["theta_deg"].astype(float), grp["et_db"].astype(float),
                label=trace_label(method, alpha), linewidth=1.2)
        n_traces += 1
    ax.set_xlabel("angle off broadside (deg)")
    ax.set_ylabel("transmit pattern (dB)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({n_traces} traces)")


if __name__ == "__main__":
    main()
