#!/usr/bin/env python3
"""Render error-probability curves from a pe CSV.

Usage: plot_pe.py PE_CSV OUTPUT_IMAGE

Closed-form curves as lines on a log probability axis; Monte Carlo
estimates, when present, as markers with a 95% confidence band.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plot_pattern import load_groups, trace_label

REQUIRED = ["snr_db", "method", "alpha_db", "pe_closed_form",
            "pe_monte_carlo", "trials", "ci95"]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="pe CSV written by the simulation CLI")
    parser.add_argument("out", help="output image path")
    args = parser.parse_args(argv)

    frame = load_groups(args.csv, REQUIRED)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    n_curves = 0
    for (method, alpha), grp in frame.groupby(["method", "alpha_db"], sort=False):
        snr = grp["snr_db"].astype(float).to_numpy()
        cf = grp["pe_closed_form"].astype(float).to_numpy()
        line, = ax.semilogy(snr, cf, label=trace_label(method, alpha), linewidth=1.3)
        mc_raw = grp["pe_monte_carlo"].to_numpy()
        has_mc = np.array([v != "" for v in mc_raw])
        if has_mc.any():
            mc = grp["pe_monte_carlo"].to_numpy(str)[has_mc].astype(float)
            ci = grp["ci95"].to_numpy(str)[has_mc].astype(float)
            ax.plot(snr[has_mc], mc, "o", color=line.get_color(), markersize=4)
            ax.fill_between(snr[has_mc], np.maximum(mc - ci, 1e-12), mc + ci,
                            color=line.get_color(), alpha=0.2)
        n_curves += 1
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("probability of error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({n_curves} curves)")


if __name__ == "__main__":
    main()
