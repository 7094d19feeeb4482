"""Successive sup-differences for partial sums of a geometric family of commutators.

    python3 scripts/series_demo.py --terms 8 --ratio 0.5
"""

import argparse

from mlweights.compactness import bump, series_compactness_demo, stress_family
from mlweights.numerics import Grid
from mlweights.operators import SampledFunction, ScaledOperator, fractional_operator


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=8)
    ap.add_argument("--ratio", type=float, default=0.5)
    ap.add_argument("--cells", type=int, default=256)
    args = ap.parse_args()
    g = Grid(1, 4.0, args.cells)
    fam = stress_family(g, "translated")
    b = SampledFunction(g, bump(g.axis()))
    ops = [ScaledOperator(fractional_operator(g, 0.5, 1), args.ratio**j) for j in range(1, args.terms + 1)]
    rep = series_compactness_demo(ops, b, fam, None, 2.0, [1.0, 2.0], [g.h, 2 * g.h])
    print("N,sup_difference,ratio")
    ratios = (None,) + rep.ratios
    for n, (d, r) in enumerate(zip(rep.sup_differences, ratios), start=2):
        print(f"{n},{d:.6g},{'' if r is None else f'{r:.4f}'}")
    print(f"# max ratio {rep.max_ratio:.4f}")


if __name__ == "__main__":
    main()
