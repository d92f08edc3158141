"""Pressure brackets P_n(0) for a beta-shift against log beta as the level grows.

For phi = 0 the pressure is the entropy, which equals log beta for every
beta > 1, so the bracket width is the only thing to watch.

    python3 scripts/beta_pressure_convergence.py --beta golden --levels 5 10 15 20 25
"""
import argparse
import math

from dimlab.symbolic import BetaSystem
from dimlab.thermo import Potential, aitken, pressure_beta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", default="golden")
    ap.add_argument("--levels", type=int, nargs="+", default=[5, 10, 15, 20, 25])
    args = ap.parse_args()

    system = BetaSystem.parse(args.beta)
    truth = system.log_beta
    print(f"{system!r}: log beta = {truth:.10f}")
    print(f"{'n':>4} {'lower':>12} {'upper':>12} {'estimate':>12} {'width':>10} {'|est-log b|':>12}")
    est = []
    for n in args.levels:
        br = pressure_beta(Potential(), system, n)
        est.append(br.estimate)
        print(f"{n:>4} {br.lower:>12.8f} {br.upper:>12.8f} {br.estimate:>12.8f} {br.width:>10.2e} "
              f"{abs(br.estimate - truth):>12.2e}")
    if len(est) >= 3:
        acc = aitken(est[-3:])
        print(f"Aitken on the last three estimates (not certified): {acc:.10f}, error {abs(acc - truth):.2e}")
    if math.isclose(float(system.beta), 2.0):
        print("integer beta: the bracket is exact at every level")


if __name__ == "__main__":
    main()
