"""Hausdorff dimension of E_2 (continued fractions with digits in {1, 2}).

Runs the restricted-alphabet Gauss solver over several levels and prints
the certified bracket next to the point estimate.

    python3 scripts/e2_dimension.py --levels 8 10 12 14
"""
import argparse
import time

from dimlab.thermo import Potential, solve_dimension_gauss

REFERENCE = 0.531280506277205  # literature value, for comparison only


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[6, 8, 10, 12, 14])
    ap.add_argument("--alphabet", default="1,2")
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    alphabet = tuple(int(a) for a in args.alphabet.split(","))

    print(f"{'n':>3} {'value':>12} {'lower':>10} {'upper':>10} {'width':>9} {'|v-ref|':>9} {'sec':>6}")
    for n in args.levels:
        t0 = time.perf_counter()
        r = solve_dimension_gauss(Potential(), tol=args.tol, alphabet=alphabet, n=n)
        lo, hi = r.bracket
        print(f"{n:>3} {r.value:>12.9f} {lo:>10.6f} {hi:>10.6f} {hi - lo:>9.2e} "
              f"{abs(r.value - REFERENCE) if alphabet == (1, 2) else float('nan'):>9.1e} "
              f"{time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
