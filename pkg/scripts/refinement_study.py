"""Warm-started quotient estimates across a grid ladder, to judge whether a quotient stays positive."""
import argparse

from fracorlicz.domain import parse_domain
from fracorlicz.nfunction import parse_nfunction
from fracorlicz.variational import Budget, estimate_quotient


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="P1", choices=("H", "P1", "P2"))
    ap.add_argument("--nfunction", default="power:q=2")
    ap.add_argument("--domain", default="interval:0,1")
    ap.add_argument("--s", type=float, nargs="+", default=[0.3, 0.8])
    ap.add_argument("--grids", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    nf, D = parse_nfunction(args.nfunction), parse_domain(args.domain)
    print("s,grid,value,ratio_to_first")
    for s in args.s:
        est = estimate_quotient(args.kind, nf, D, s, Budget(tuple(args.grids), seed=args.seed))
        first = est.per_grid[0][1]
        for g, v in est.per_grid:
            print(f"{s},{g},{v!r},{v / first!r}")


if __name__ == "__main__":
    main()
