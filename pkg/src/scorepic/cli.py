"""Command-line entry point.

    simulate --preset landau_damping --n 20000 --dv 2 --nu 0 --t-final 5
    simulate --config run.cfg --out results/
    simulate --preset two_stream --score-test --n 100000

Flags override config-file values, which override preset defaults.
"""

import argparse
import sys

from .config import DIVERGENCE_MODES, ESTIMATORS, MODES, PRESETS, build_config, load_config_file
from .run import run, score_test


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Collisional particle-in-cell simulator (VML/VPL) with "
                    "blob or neural score estimation.")
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--n", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--dv", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--estimator", choices=ESTIMATORS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="DIR", default="out")
    p.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    p.add_argument("--divergence", choices=DIVERGENCE_MODES)
    p.add_argument("--label")
    p.add_argument("--score-test", action="store_true",
                   help="compare estimators against the analytic t=0 score "
                        "instead of running the simulation")
    p.add_argument("--quiet", action="store_true")
    return p


OVERRIDE_KEYS = ("preset", "mode", "n", "M", "dt", "t_final", "nu", "dv", "K",
                 "estimator", "seed", "snapshot_every", "divergence", "label")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = load_config_file(args.config) if args.config else {}
        overrides = {k: getattr(args, k) for k in OVERRIDE_KEYS}
        config = build_config(file_values, overrides)
        if args.score_test:
            report = score_test(config, args.out)
            for name in sorted(report):
                print(f"{name}: mse={report[name]['mse']:.6e}")
        else:
            records = run(config, args.out, progress=not args.quiet)
            final = records[-1]
            print(f"done: {len(records) - 1} steps, E_total={final.E_total:.6f}, "
                  f"outputs in {args.out}")
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
