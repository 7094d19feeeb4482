"""Random interpolation scenarios: how small must theta get, and where does the search give up.

Draws power-weight cases without the effective-power cap used by the tests and reports,
per case, the largest effective power, the dyadic level k of the accepted theta, or the
failure raised when no theta above 2^-64 works.

    python3 scripts/interp_random.py --cases 100 --seed 0
"""

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from helpers import lp_effective_powers, random_int_lp_case  # noqa: E402
from mlweights.interpolation import AAAFailure, solve_int_Lp  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("case,max_effective_power,k,status")
    failures = 0
    for i in range(args.cases):
        case = random_int_lp_case(rng, cap=None)
        b = max(abs(float(x)) for x in lp_effective_powers(*case))
        try:
            sol = solve_int_Lp(*case)
            k = sol.diagnostics.k
            status = "ok" if sol.ok else "checks-failed"
        except AAAFailure as exc:
            k, status = exc.k, "theta-search-exhausted"
            failures += 1
        print(f"{i},{b:.3f},{k},{status}")
    print(f"# {failures} of {args.cases} cases exhausted the theta search")


if __name__ == "__main__":
    main()
