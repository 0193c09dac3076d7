"""Command-line entry point.

Subcommands reproduce the experiment figures as CSV artifacts:

    bibeam pattern --scene scene.txt --out results --alpha=33 --alpha=-inf
    bibeam pgmap   --scene scene.txt --out results --alpha=39.2
    bibeam pe      --scene scene.txt --out results --alpha=18.2 \\
                   --snr-min=-33 --snr-max=-15 --snr-step=2 --trials=100000 --seed=1
    bibeam summary --scene scene.txt --out results --alpha=-inf --alpha=33

--alpha is repeatable; use the --alpha=-inf form for the null design.
When no --alpha is given the scene's own alpha_db is used.  A manifest
JSON is written next to every CSV.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .experiments import (SceneFormatError, _grid, parse_scene, run_pattern,
                          run_pe, run_pgmap, run_summary)
from .scene import default_scene


def _alpha_value(token: str) -> float:
    tok = token.strip().lower()
    if tok in ("-inf", "-infinity"):
        return float("-inf")
    try:
        return float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {token!r} (dB value or -inf)")


def _common(sub: argparse.ArgumentParser):
    sub.add_argument("--scene", type=Path, default=None,
                     help="scene file (omit for the reference deployment)")
    sub.add_argument("--out", type=Path, required=True, help="output directory")
    sub.add_argument("--alpha", type=_alpha_value, action="append", default=None,
                     metavar="DB", help="dynamic-range cap in dB, repeatable; -inf allowed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bibeam", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"bibeam {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("pattern", help="transmit radiation pattern sweep")
    _common(p)
    p.add_argument("--theta-min", type=float, default=-90.0, metavar="DEG")
    p.add_argument("--theta-max", type=float, default=90.0, metavar="DEG")
    p.add_argument("--theta-step", type=float, default=0.25, metavar="DEG")

    p = subs.add_parser("pgmap", help="path-gain map over the x-y plane")
    _common(p)
    p.add_argument("--grid-step", type=float, default=0.05, metavar="M")

    p = subs.add_parser("pe", help="error probability vs SNR")
    _common(p)
    p.add_argument("--snr-min", type=float, required=True, metavar="DB")
    p.add_argument("--snr-max", type=float, required=True, metavar="DB")
    p.add_argument("--snr-step", type=float, default=1.0, metavar="DB")
    p.add_argument("--trials", type=int, default=100000,
                   help="Monte Carlo trials per point (0: closed form only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = subs.add_parser("summary", help="figures of merit per design")
    _common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scene is not None:
            scene = parse_scene(args.scene)
            scene_file = str(args.scene)
        else:
            scene = default_scene()
            scene_file = "<defaults>"
    except (SceneFormatError, OSError) as e:
        print(f"scene error: {e}", file=sys.stderr)
        return 2

    alphas = args.alpha if args.alpha is not None else [scene.alpha_db]

    if args.subcommand == "pattern":
        path = run_pattern(scene, alphas, args.out, scene_file,
                           args.theta_min, args.theta_max, args.theta_step)
    elif args.subcommand == "pgmap":
        path = run_pgmap(scene, alphas, args.out, scene_file, grid_step=args.grid_step)
    elif args.subcommand == "pe":
        grid = _grid(args.snr_min, args.snr_max, args.snr_step)
        path = run_pe(scene, alphas, grid, args.trials, args.seed, args.out,
                      scene_file, workers=args.workers)
    else:
        path = run_summary(scene, alphas, args.out, scene_file)
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
