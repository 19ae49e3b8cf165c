"""Command-line entry point: ``duality-lab sweep | check | plotscript``."""

from __future__ import annotations

import argparse
import sys
from contextlib import nullcontext

from .commands import (
    EXIT_INPUT,
    cmd_check_random,
    cmd_check_scenario,
    cmd_plotscript,
    cmd_sweep,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="duality-lab", description="Wave-particle duality relations for "
                                "binary interferometers: parameter sweeps and verification runs.")
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="sweep one scenario parameter and write a CSV")
    sw.add_argument("--scenario", required=True, help="scenario file (JSON)")
    sw.add_argument("--param", required=True, help="alpha, R, R1, phi0 or kappa (angles in degrees)")
    sw.add_argument("--range", required=True, dest="range_", metavar="A:B:N", help="start:stop:steps")
    sw.add_argument("--out", required=True, help="output CSV path")
    sw.add_argument("--outputs", default="V",
                    help="comma-separated quantities, e.g. D_i,D_i_P_dec,D_i_P; suffix ^2 squares a column")

    ck = sub.add_parser("check", help="verify duality relations")
    grp = ck.add_mutually_exclusive_group(required=True)
    grp.add_argument("--random", nargs=2, type=int, metavar=("SEED", "N"), help="randomized suite")
    grp.add_argument("--scenario", help="scenario file (JSON)")
    ck.add_argument("--records", help="write one JSON record per check to this file ('-' for stdout)")

    ps = sub.add_parser("plotscript", help="emit a gnuplot script for a sweep CSV")
    ps.add_argument("csv")
    ps.add_argument("--out", help="write the script here instead of stdout")
    return p


def _open(path):
    if path is None:
        return nullcontext(None)
    if path == "-":
        return nullcontext(sys.stdout)
    return open(path, "w")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    if args.command == "sweep":
        outputs = [s.strip() for s in args.outputs.split(",") if s.strip()]
        return cmd_sweep(args.scenario, args.param, args.range_, args.out, outputs)
    if args.command == "check":
        try:
            ctx = _open(args.records)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        with ctx as rec:
            if args.random is not None:
                seed, n = args.random
                return cmd_check_random(seed, n, records=rec)
            return cmd_check_scenario(args.scenario, records=rec)
    if args.out:
        with open(args.out, "w") as fh:
            return cmd_plotscript(args.csv, out=fh)
    return cmd_plotscript(args.csv)


if __name__ == "__main__":
    sys.exit(main())
