"""Print the verdict table for several q and report whether it matches the reference verdicts."""
import argparse
import sys

from fracorlicz.classifier import default_s_grid, table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    args = ap.parse_args()
    ok = True
    for q in args.q:
        rep = table1(default_s_grid(q), q)
        print(f"# q = {q}: {'matches' if rep.matches_golden else 'MISMATCH'}")
        print(rep.to_csv(), end="")
        for m in rep.mismatches:
            print(f"#   {m}")
        ok &= rep.matches_golden
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
