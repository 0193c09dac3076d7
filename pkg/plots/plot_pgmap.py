#!/usr/bin/env python3
"""Render path-gain heatmaps from a pgmap CSV.

Usage: plot_pgmap.py PGMAP_CSV OUTPUT_IMAGE

One panel per (method, alpha_db) group over the x-y lattice, values in
dB with a labeled colorbar; -inf cells (free-space singularities at the
array) are masked.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plot_pattern import load_groups, trace_label

REQUIRED = ["x_m", "y_m", "method", "alpha_db", "pg_db"]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="pgmap CSV written by the simulation CLI")
    parser.add_argument("out", help="output image path")
    args = parser.parse_args(argv)

    frame = load_groups(args.csv, REQUIRED)
    groups = list(frame.groupby(["method", "alpha_db"], sort=False))
    fig, axes = plt.subplots(1, len(groups), figsize=(4.2 * len(groups), 4.6),
                             squeeze=False, sharey=True)

    finite = frame["pg_db"].astype(float).replace(-np.inf, np.nan).dropna()
    vmin, vmax = finite.quantile(0.02), finite.max()

    mesh = None
    for ax, ((method, alpha), grp) in zip(axes[0], groups):
        xs = np.sort(grp["x_m"].astype(float).unique())
        ys = np.sort(grp["y_m"].astype(float).unique())
        lattice = grp.pivot_table(index="y_m", columns="x_m", values="pg_db").to_numpy(float)
        lattice = np.ma.masked_invalid(np.where(np.isneginf(lattice), np.nan, lattice))
        mesh = ax.pcolormesh(xs, ys, lattice, vmin=vmin, vmax=vmax, shading="nearest")
        ax.set_title(trace_label(method, alpha), fontsize=9)
        ax.set_xlabel("x (m)")
        ax.set_aspect("equal")
    axes[0][0].set_ylabel("y (m)")
    fig.colorbar(mesh, ax=axes[0].tolist(), label="path gain (dB)", shrink=0.9)
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out} ({len(groups)} panels)")


if __name__ == "__main__":
    main()
