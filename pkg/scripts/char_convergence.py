"""Convergence of the dyadic A_p estimate for |x|^a against the interval oracle.

Sweeps grid size and shift count at fixed depth and prints the relative error, which
shows why the coarse three-shift family misses the maximizing interval.

    python3 scripts/char_convergence.py --a 1/2 --p 2
"""

import argparse
from fractions import Fraction

from mlweights.numerics import CubeFamily, Grid, SampledWeight, estimate_Ap, oracle_Ap_power_1d
from mlweights.power_weights import PowerWeight


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", default="1/2")
    ap.add_argument("--p", default="2")
    ap.add_argument("--depth", type=int, default=10)
    args = ap.parse_args()
    a, p = Fraction(args.a), Fraction(args.p)
    oracle = oracle_Ap_power_1d(a, p)[0]
    print(f"# oracle sup over intervals: {oracle:.6f}")
    print("cells,shifts,estimate,rel_err")
    for cells in (2**12, 2**14, 2**16):
        g = Grid(1, 1.0, cells)
        w = SampledWeight.from_power(g, PowerWeight(a))
        for shifts in (3, 8, 16, 32):
            est = estimate_Ap(w, p, CubeFamily.dyadic(g, args.depth, shifts)).value
            print(f"{cells},{shifts},{est:.6f},{est / oracle - 1:+.4f}")


if __name__ == "__main__":
    main()
