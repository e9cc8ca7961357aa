"""Run the standard stability suite and print one row per case plus the spread."""

import argparse
import csv
import sys

from gaborstab.stabilitylab import StabilityReport, run_stability_experiment, standard_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--csv", help="also write the rows to this file")
    args = ap.parse_args()
    reports = [run_stability_experiment(c) for c in standard_suite(seed=args.seed)]
    rows = [r.row() for r in reports]
    w = csv.writer(sys.stdout)
    w.writerow(StabilityReport.COLUMNS)
    w.writerows(rows)
    ratios = [r.ratio for r in reports]
    print(f"# ratio spread max/min = {max(ratios) / min(ratios):.3f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            cw = csv.writer(fh)
            cw.writerow(StabilityReport.COLUMNS)
            cw.writerows(rows)


if __name__ == "__main__":
    main()
