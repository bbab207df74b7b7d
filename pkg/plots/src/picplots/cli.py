"""Batch plotting CLI.

    plots diagnostics run1/diagnostics.csv run2/diagnostics.csv -o figs/
    plots snapshot run1/snapshot_000500.bin --kind v_marginal_log -o figs/
    plots snapshot run1/snapshot_000000.bin --kind quiver_score \
          --csv run1/score_test_sbtm.csv -o figs/
"""

import argparse
import sys

from .figures import SNAPSHOT_KINDS, plot_diagnostics, plot_snapshot


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plots",
                                description="Render figures from simulation outputs.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("diagnostics", help="time-series figures from diagnostics CSVs")
    d.add_argument("csvs", nargs="+", metavar="CSV")
    d.add_argument("-o", "--out", required=True, metavar="DIR")
    d.add_argument("--linear-entropy", action="store_true",
                   help="plot entropy production on a linear axis")

    s = sub.add_parser("snapshot", help="particle/field views from one snapshot")
    s.add_argument("snapshot", metavar="FILE")
    s.add_argument("--kind", required=True, choices=SNAPSHOT_KINDS)
    s.add_argument("-o", "--out", required=True, metavar="DIR")
    s.add_argument("--component", type=int, default=1,
                   help="velocity component for marginals (0-based, default 1)")
    s.add_argument("--bins", type=int, default=80)
    s.add_argument("--no-overlay", action="store_true",
                   help="suppress the Maxwellian overlay on marginals")
    s.add_argument("--csv", help="score-test CSV for the quiver kinds")
    s.add_argument("--max-arrows", type=int, default=2000)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "diagnostics":
            paths = plot_diagnostics(args.csvs, args.out,
                                     log_entropy=not args.linear_entropy)
            for path in paths:
                print(path)
        else:
            path = plot_snapshot(args.snapshot, args.kind, args.out,
                                 component=args.component, bins=args.bins,
                                 overlay=not args.no_overlay, csv=args.csv,
                                 max_arrows=args.max_arrows)
            print(path)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
