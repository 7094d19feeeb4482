"""Random admissible exponent data shared by the property and acceptance tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from mlweights.exponents import Exp, ExpVector, RVector
from mlweights.power_weights import PowerWeight


def frac_between(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 24) -> Fraction:
    """A rational strictly inside ``(lo, hi)`` (``lo < hi``)."""
    t = Fraction(rng.randint(1, den - 1), den)
    return lo + (hi - lo) * t


def random_p(rng: random.Random, m: int) -> ExpVector:
    return ExpVector(tuple(Exp(Fraction(rng.randint(1, 12), 12)) for _ in range(m)))


def random_admissible(rng: random.Random, m: int) -> tuple[ExpVector, RVector]:
    """``(p, r)`` with ``r ≼ p``; equality cases are allowed."""
    p = random_p(rng, m)
    head = []
    for pr in p.recips:
        choice = rng.random()
        head.append(pr if choice < 0.15 else Fraction(1) if choice < 0.3 else pr + (1 - pr) * Fraction(rng.randint(0, 12), 12))
    lo = max(Fraction(0), 1 - p.holder_sum.recip)
    last = lo if lo > 0 and rng.random() < 0.2 else lo + (1 - lo) * Fraction(rng.randint(1, 12), 12)
    return p, RVector(tuple(Exp(x) for x in head + [last]))


def random_chain(rng: random.Random, m: int) -> tuple[ExpVector, RVector, RVector]:
    """``r ≺ s ≺ p`` in the sense used by the strict-inclusion results."""
    while True:
        p = ExpVector(tuple(Exp(Fraction(rng.randint(1, 11), 12)) for _ in range(m)))
        s_head = [frac_between(rng, pr, Fraction(1)) for pr in p.recips]
        r_head = [frac_between(rng, sr, Fraction(1)) for sr in s_head]
        lo = max(Fraction(0), 1 - p.holder_sum.recip)
        s_last = frac_between(rng, lo, Fraction(1))
        r_last = s_last if rng.random() < 0.3 else frac_between(rng, s_last, Fraction(1))
        s = RVector(tuple(Exp(x) for x in s_head + [s_last]))
        r = RVector(tuple(Exp(x) for x in r_head + [r_last]))
        return p, r, s


def random_power_tuple(rng: random.Random, m: int, n: int = 1, spread: int = 3) -> list[PowerWeight]:
    return [PowerWeight(Fraction(rng.randint(-spread * 12, spread * 12), 12) * n / 2, n) for _ in range(m)]


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=24)
recips = st.fractions(min_value=0, max_value=1, max_denominator=24)
pos_recips = st.fractions(min_value=Fraction(1, 24), max_value=1, max_denominator=24)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


EFFECTIVE_POWER_CAP = 24


def lp_effective_powers(p, w, q, v, r) -> list[Fraction]:
    """Exponents ``b`` of the power weights whose reverse Hölder exponent enters the theta search."""
    from mlweights.exponents import derived_exponents

    dp, dq = derived_exponents(p, r), derived_exponents(q, r)
    m = p.m
    g = [1 / x for x in list(dp.theta_recip) + [dp.delta_recip[m]]]
    gt = [1 / x for x in list(dq.theta_recip) + [dq.delta_recip[m]]]
    wa = [x.a for x in w] + [sum(x.a for x in w)]
    va = [x.a for x in v] + [sum(x.a for x in v)]
    return [b for i in range(m + 1) for b in (wa[i] * g[i], va[i] * gt[i])]


def random_int_lp_case(rng: random.Random, m: int | None = None, cap: Fraction | None = EFFECTIVE_POWER_CAP):
    """``(p, w, q, v, r)`` with ``r ≺ p``, ``r ≺ q`` and both weight tuples in their classes.

    ``cap`` bounds ``|gamma_i a_i|``: the sharp reverse Hölder exponent of ``|x|^b`` is about
    ``1 + 2^-12 (1+b) e^-b``, so much larger powers need ``theta`` below ``2^-64``.
    """
    from mlweights.exponents import prec
    from mlweights.power_weights import in_Apr

    m = m or rng.randint(1, 3)
    while True:
        r_head = [Fraction(rng.randint(6, 12), 12) for _ in range(m)]
        p = ExpVector(tuple(Exp(frac_between(rng, Fraction(0), x)) for x in r_head))
        q = ExpVector(tuple(Exp(frac_between(rng, Fraction(0), x)) for x in r_head))
        lo = max(Fraction(0), 1 - p.holder_sum.recip, 1 - q.holder_sum.recip)
        r = RVector(tuple(Exp(x) for x in r_head + [frac_between(rng, lo, Fraction(1))]))
        if not (prec(r, p) and prec(r, q)):
            continue
        for _ in range(50):
            w = random_power_tuple(rng, m, spread=1)
            v = random_power_tuple(rng, m, spread=1)
            if cap is not None and max(abs(b) for b in lp_effective_powers(p, w, q, v, r)) > cap:
                continue
            if in_Apr(w, p, r).in_class and in_Apr(v, q, r).in_class:
                return p, w, q, v, r


def random_int_lim_case(rng: random.Random, m: int | None = None):
    """``(p, w, q, v, pminus, pplus)`` with every limited-range precondition satisfied."""
    from mlweights.power_weights import limited_range_member

    m = m or rng.randint(1, 3)
    while True:
        lo = [Fraction(rng.randint(1, 4)) / rng.randint(1, 4) for _ in range(m)]
        lo = [max(x, Fraction(1)) for x in lo]
        hi = [x + rng.randint(1, 6) for x in lo]
        p = [1 / frac_between(rng, 1 / h, 1 / l) for l, h in zip(lo, hi)]
        q = [1 / frac_between(rng, 1 / h, 1 / l) for l, h in zip(lo, hi)]
        for _ in range(50):
            w = random_power_tuple(rng, m, spread=1)
            v = random_power_tuple(rng, m, spread=1)
            if all(limited_range_member(w[i], p[i], lo[i], hi[i]).in_class
                   and limited_range_member(v[i], q[i], lo[i], hi[i]).in_class for i in range(m)):
                return ExpVector.of(p), w, ExpVector.of(q), v, lo, hi
