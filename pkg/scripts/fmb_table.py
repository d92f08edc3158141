"""Table of F_m(B) dimension roots u(m, B) with certified brackets.

    python3 scripts/fmb_table.py --B 1.5 2 4 10 --m 1 2 3
"""
import argparse
import time

from dimlab.thermo import solve_fmb


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--B", type=float, nargs="+", default=[1.5, 2.0, 4.0, 10.0, 100.0])
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 5])
    ap.add_argument("--digit-cap", type=int, default=400)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--tol", type=float, default=1e-8)
    args = ap.parse_args()

    print(f"{'m':>3} {'B':>8} {'u':>12} {'lower':>10} {'upper':>10} {'sec':>6}")
    for m in args.m:
        for B in args.B:
            t0 = time.perf_counter()
            r = solve_fmb(m, B, tol=args.tol, digit_cap=args.digit_cap, n=args.n)
            lo, hi = r.bracket
            print(f"{m:>3} {B:>8g} {r.value:>12.8f} {lo:>10.6f} {hi:>10.6f} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
