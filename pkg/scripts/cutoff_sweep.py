"""Hardy and Poincare quotients of the cutoff family eps = 2^-k on (0, 1), one CSV block per s."""
import argparse
import csv
import sys

from fracorlicz.domain import IntervalUnion
from fracorlicz.nfunction import parse_nfunction
from fracorlicz.variational import CutoffFamily, cutoff_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nfunction", default="power:q=2")
    ap.add_argument("--s", type=float, nargs="+", default=[0.3, 0.5, 0.8])
    ap.add_argument("--k-min", type=int, default=2)
    ap.add_argument("--k-max", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    nf = parse_nfunction(args.nfunction)
    fam = CutoffFamily.dyadic(args.k_min, args.k_max)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["s", "eps", "hardy_quotient", "poincare_quotient", "poincare_over_first"])
    for s in args.s:
        rows = cutoff_sweep(nf, IntervalUnion(((0, 1),)), s, fam, workers=args.workers)
        for r in rows:
            w.writerow([s, r.eps, repr(r.hardy_quotient), repr(r.poincare_quotient),
                        repr(r.poincare_quotient / rows[0].poincare_quotient)])


if __name__ == "__main__":
    main()
