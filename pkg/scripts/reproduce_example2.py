"""Exactness table for the Poisson / exponential example.

For x >= -log t the normalized maximum is exactly Gumbel; below that it equals
the empty-sample probability exp(-t).  Both sup errors are printed.
"""

import argparse
import csv
import sys

from maxcox.montecarlo import fmt
from maxcox.reproduce import example2_row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, nargs="+", default=[1.0, 10.0, 1000.0])
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["t", "sup_error", "argmax_x", "sup_error_x_ge_minus_log_t"])
    for t in args.t:
        row = example2_row(t)
        w.writerow([fmt(t), fmt(row.sup_error), fmt(row.argmax_x), fmt(row.sup_error_support)])


if __name__ == "__main__":
    main()
