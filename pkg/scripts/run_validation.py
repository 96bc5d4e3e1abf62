#!/usr/bin/env python3
"""Run the full validation campaign and write one report per experiment.

Each experiment produces <name>.csv and <name>.verdict.txt under --out.
Exit status is 0 only if every verdict is PASS.
"""

import argparse
import sys

from pamfk.experiments import EXPERIMENTS, SweepSpec, write_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="validation_out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-samples", type=int, default=1000)
    ap.add_argument("--experiments", nargs="*", default=sorted(EXPERIMENTS),
                    choices=sorted(EXPERIMENTS))
    args = ap.parse_args()

    all_pass = True
    for name in args.experiments:
        spec = SweepSpec(master_seed=args.seed, n_samples=args.n_samples,
                         kind=name)
        report = EXPERIMENTS[name](spec)
        csv_path, _ = write_report(report, args.out)
        status = "PASS" if report.passed else "FAIL"
        print(f"{name:20s} {status}  -> {csv_path}")
        all_pass = all_pass and report.passed
    return 0 if all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
