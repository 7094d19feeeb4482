"""Independent oracle values, frozen into tests/oracle_values.py.

Everything here uses adaptive quadrature (scipy.integrate.quad) and a brute-force
scan over interval endpoints, so it shares no code with the closed-form oracles
inside the package.

    python3 scripts/compute_oracles.py
"""

from __future__ import annotations

import numpy as np
from scipy import integrate, optimize


def avg(fn, c, d):
    pts = [0.0] if c < 0 < d else None
    val, _ = integrate.quad(fn, c, d, points=pts, limit=200, epsabs=1e-13, epsrel=1e-12)
    return val / (d - c)


def sup_over_intervals(functional, coarse=801):
    # Dilation invariance of power weights: intervals [c, 1] with c in [-1, 1) suffice.
    cs = np.linspace(-1, 1, coarse)[:-1]
    vals = [functional(c) for c in cs]
    i = int(np.argmax(vals))
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, len(cs) - 1)]
    res = optimize.minimize_scalar(lambda c: -functional(c), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    return max(vals[i], -res.fun), res.x


def a2_sqrt(c):
    return avg(lambda x: abs(x) ** 0.5, c, 1) * avg(lambda x: abs(x) ** -0.5, c, 1)


def rh2_sqrt(c):
    return avg(lambda x: abs(x), c, 1) ** 0.5 / avg(lambda x: abs(x) ** 0.5, c, 1)


def frac_indicator(x, alpha=0.5):
    val, _ = integrate.quad(lambda y: abs(x - y) ** (alpha - 1), 0, 1, limit=200)
    return val


def dini(fn):
    val, _ = integrate.quad(lambda t: fn(t) / t, 0, 1, limit=400)
    return val


if __name__ == "__main__":
    v, c = sup_over_intervals(a2_sqrt)
    print(f"A2 of |x|^(1/2):  {v:.12f} at c = {c:.6f}")
    print(f"centered A2:      {a2_sqrt(-1.0):.12f}")
    v, c = sup_over_intervals(rh2_sqrt)
    print(f"RH2 of |x|^(1/2): {v:.12f} at c = {c:.6f}")
    for x in (1.25, 1.5, 2.0, -1.25, -2.0):
        print(f"I_(1/2) 1_[0,1] at {x}: {frac_indicator(x):.12f}")
    print(f"Dini norm of t^(1/2): {dini(np.sqrt):.12f}")
