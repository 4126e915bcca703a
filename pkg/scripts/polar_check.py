"""Compare the planar modular on the unit square with its average over line sections."""
import argparse
import time

from fracorlicz.domain import Box
from fracorlicz.modular import polar_identity_check
from fracorlicz.nfunction import parse_nfunction
from fracorlicz.trial import Polynomial, TensorProduct


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nfunction", nargs="+", default=["power:q=2", "llogl"])
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--angles", type=int, nargs="+", default=[16, 64, 256])
    args = ap.parse_args()
    f = TensorProduct(Polynomial.bump(0, 1, 2), Polynomial.bump(0, 1, 2))
    print("nfunction,n_angles,lhs,rhs,relative_difference,seconds")
    for spec in args.nfunction:
        nf = parse_nfunction(spec)
        for n in args.angles:
            t0 = time.perf_counter()
            lhs, rhs = polar_identity_check(nf, Box((0, 0), (1, 1)), args.s, f, n)
            rel = abs(lhs.value - rhs.value) / lhs.value
            print(f"{spec},{n},{lhs.value!r},{rhs.value!r},{rel:.3e},{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
