"""Exact exponent calculus for multilinear Muckenhoupt classes.

Every Lebesgue exponent is stored through its reciprocal as a
:class:`fractions.Fraction`, so ``p = inf`` is the ordinary rational ``0`` and
Hölder sums are plain additions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, str, float]


class DomainError(ValueError):
    """Inputs outside the admissible range of an operation."""


class DimensionError(ValueError):
    """Exponent vectors of incompatible lengths."""


def as_fraction(x: Number) -> Fraction:
    """Convert ``x`` to an exact rational.

    Floats are converted through their shortest decimal representation so
    that ``0.1`` becomes ``1/10`` rather than the binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True, order=False)
class Exp:
    """A Lebesgue exponent ``p`` in ``(0, inf]`` stored as ``recip = 1/p``.

    Banach exponents (``p >= 1``) have ``recip <= 1``; quasi-Banach values
    (``recip > 1``) are allowed because Hölder sums of several exponents
    routinely leave ``[1, inf]``.
    """

    recip: Fraction

    def __post_init__(self) -> None:
        r = as_fraction(self.recip)
        if r < 0:
            raise DomainError(f"negative reciprocal exponent {r}")
        object.__setattr__(self, "recip", r)

    @classmethod
    def of(cls, p: Number | Exp) -> Exp:
        """Build from the exponent value itself; ``"inf"`` or ``math.inf`` give ``p = inf``."""
        if isinstance(p, Exp):
            return p
        if isinstance(p, str) and p.strip().lower() in {"inf", "infinity", "oo"}:
            return cls(Fraction(0))
        if isinstance(p, float) and math.isinf(p) and p > 0:
            return cls(Fraction(0))
        value = as_fraction(p)
        if value <= 0:
            raise DomainError(f"exponent must be positive, got {value}")
        return cls(1 / value)

    @classmethod
    def from_recip(cls, recip: Number) -> Exp:
        return cls(as_fraction(recip))

    @property
    def is_infinite(self) -> bool:
        return self.recip == 0

    @property
    def value(self) -> Fraction | float:
        """``p`` itself, ``math.inf`` when the reciprocal vanishes."""
        return math.inf if self.recip == 0 else 1 / self.recip

    def conj(self) -> Exp:
        """Hölder conjugate ``p'``; only defined for ``p >= 1``."""
        if self.recip > 1:
            raise DomainError(f"conjugate undefined for p = {self} < 1")
        return Exp(1 - self.recip)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return "inf" if self.recip == 0 else str(1 / self.recip)

    def __repr__(self) -> str:
        return f"Exp({self})"


def _exps(values: Iterable[Number | Exp]) -> tuple[Exp, ...]:
    return tuple(Exp.of(v) for v in values)


@dataclass(frozen=True)
class ExpVector:
    """``(p_1, ..., p_m)`` with exact Hölder sum ``1/p = sum 1/p_i``."""

    entries: tuple[Exp, ...]

    def __post_init__(self) -> None:
        entries = _exps(self.entries)
        if not entries:
            raise DimensionError("exponent vector must have length >= 1")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, values: Iterable[Number | Exp] | ExpVector) -> ExpVector:
        if isinstance(values, ExpVector):
            return values
        return cls(tuple(values))

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def recips(self) -> tuple[Fraction, ...]:
        return tuple(e.recip for e in self.entries)

    @property
    def holder_sum(self) -> Exp:
        return Exp(sum(self.recips, Fraction(0)))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Exp:
        return self.entries[i]

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


@dataclass(frozen=True)
class RVector:
    """Limiting vector ``(r_1, ..., r_{m+1})`` with ``1 <= r_i < inf``."""

    entries: tuple[Exp, ...]

    def __post_init__(self) -> None:
        entries = _exps(self.entries)
        if len(entries) < 2:
            raise DimensionError("limiting vector needs length m+1 >= 2")
        for e in entries:
            if e.recip == 0 or e.recip > 1:
                raise DomainError(f"limiting exponents must lie in [1, inf), got {e}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, values: Iterable[Number | Exp] | RVector) -> RVector:
        if isinstance(values, RVector):
            return values
        return cls(tuple(values))

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    @property
    def recips(self) -> tuple[Fraction, ...]:
        return tuple(e.recip for e in self.entries)

    @property
    def r_recip(self) -> Fraction:
        """``1/r = sum_{i=1}^{m+1} 1/r_i``."""
        return sum(self.recips, Fraction(0))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Exp:
        return self.entries[i]

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def _check_lengths(r: RVector, p: ExpVector) -> None:
    if len(r) != len(p) + 1:
        raise DimensionError(f"limiting vector length {len(r)} does not match m+1 = {len(p) + 1}")


def _relations(r: RVector, p: ExpVector) -> tuple[list[tuple[Fraction, Fraction]], tuple[Fraction, Fraction]]:
    # r_i <= p_i  <=>  1/p_i <= 1/r_i ;  r'_{m+1} >= p  <=>  1 - 1/r_{m+1} <= 1/p
    pairs = [(pi, ri) for pi, ri in zip(p.recips, r.recips[:-1])]
    last = (1 - r.recips[-1], p.holder_sum.recip)
    return pairs, last


def preceq(r: RVector, p: ExpVector) -> bool:
    """``r ≼ p``: ``r_i <= p_i`` for ``i <= m`` and ``r'_{m+1} >= p``."""
    r, p = RVector.of(r), ExpVector.of(p)
    _check_lengths(r, p)
    pairs, (lhs, rhs) = _relations(r, p)
    return all(a <= b for a, b in pairs) and lhs <= rhs


def prec(r: RVector, p: ExpVector) -> bool:
    """Strict version of :func:`preceq`."""
    r, p = RVector.of(r), ExpVector.of(p)
    _check_lengths(r, p)
    pairs, (lhs, rhs) = _relations(r, p)
    return all(a < b for a, b in pairs) and lhs < rhs


def rvec_prec(r: RVector, s: RVector) -> bool:
    """Ordering between two limiting vectors used in the strict-inclusion results.

    True when ``r_i < s_i`` for ``i <= m`` and ``r_{m+1} <= s_{m+1}``.
    """
    r, s = RVector.of(r), RVector.of(s)
    if len(r) != len(s):
        raise DimensionError("limiting vectors of different length")
    head = all(si < ri for ri, si in zip(r.recips[:-1], s.recips[:-1]))
    return head and s.recips[-1] <= r.recips[-1]


@dataclass(frozen=True)
class DerivedExponents:
    """Reciprocals ``1/p_{m+1}``, ``1/delta_i`` (``i <= m+1``), ``1/theta_i`` (``i <= m``) and ``1/r``.

    A vanishing reciprocal means the corresponding exponent is infinite.
    """

    p_m1_recip: Fraction
    delta_recip: tuple[Fraction, ...]
    theta_recip: tuple[Fraction, ...]
    r_recip: Fraction

    @property
    def m(self) -> int:
        return len(self.theta_recip)

    @property
    def level(self) -> Fraction:
        """``1/r - 1``, the common factor of every classical index."""
        return self.r_recip - 1

    @property
    def p_m1(self) -> Exp:
        return Exp(self.p_m1_recip)

    @property
    def delta(self) -> tuple[Fraction | float, ...]:
        return tuple(math.inf if d == 0 else 1 / d for d in self.delta_recip)

    @property
    def theta(self) -> tuple[Fraction | float, ...]:
        return tuple(math.inf if t == 0 else 1 / t for t in self.theta_recip)


def derived_exponents(p: ExpVector, r: RVector) -> DerivedExponents:
    p, r = ExpVector.of(p), RVector.of(r)
    if not preceq(r, p):
        raise DomainError(f"r = {r} is not ≼ p = {p}")
    p_m1 = 1 - p.holder_sum.recip
    targets = list(p.recips) + [p_m1]
    delta = tuple(ri - pi for ri, pi in zip(r.recips, targets))
    r_recip = r.r_recip
    theta = tuple(r_recip - 1 - delta[i] for i in range(p.m))
    return DerivedExponents(p_m1, delta, theta, r_recip)


@dataclass(frozen=True)
class ClassicalCondition:
    """``W^(1/power_recip) in A_(level/power_recip)`` for ``W`` = weight ``target``.

    ``target == m`` designates the product weight ``w = prod w_i``. When
    ``power_recip == 0`` the power and the index are both infinite and the
    condition is read in its essential-supremum form.
    """

    target: int
    power_recip: Fraction
    level: Fraction

    @property
    def esssup(self) -> bool:
        return self.power_recip == 0

    @property
    def power(self) -> Fraction | None:
        return None if self.esssup else 1 / self.power_recip

    @property
    def base_weight_power(self) -> Fraction | None:
        return self.power

    @property
    def ap_index(self) -> Fraction | None:
        return None if self.esssup else self.level / self.power_recip

    def describe(self, m: int) -> str:
        name = "w" if self.target == m else f"w_{self.target + 1}"
        if self.esssup:
            return f"{name}: esssup form"
        return f"{name}^({self.power}) in A_({self.ap_index})"


def apr_characterization(p: ExpVector, r: RVector) -> list[ClassicalCondition]:
    """Reduce ``w in A_{p,r}`` to ``m+1`` classical ``A_q`` conditions.

    The first entry concerns the product weight, with power ``delta_{m+1}``;
    entry ``i + 1`` concerns ``w_i`` with power ``theta_i``; the index of each
    is ``(1/r - 1)`` times the power.
    """
    d = derived_exponents(p, r)
    if d.level <= 0:
        raise DomainError("1/r - 1 must be positive; every derived exponent is degenerate")
    m = d.m
    conds = [ClassicalCondition(m, d.delta_recip[m], d.level)]
    conds.extend(ClassicalCondition(i, d.theta_recip[i], d.level) for i in range(m))
    return conds


def apq_reduction(p: ExpVector, q: Number | Exp) -> RVector:
    """Limiting vector ``(1, ..., 1, r_{m+1})`` with ``1/r'_{m+1} = 1/p - 1/q``."""
    p, q = ExpVector.of(p), Exp.of(q)
    pr = p.holder_sum.recip
    if q.recip <= 0:
        raise DomainError("q must be finite")
    if q.recip > pr:
        raise DomainError(f"need p <= q, got 1/p = {pr}, 1/q = {q.recip}")
    if pr > p.m:
        raise DomainError(f"1/p = {pr} exceeds m = {p.m}")
    last = 1 - (pr - q.recip)
    if last <= 0:
        raise DomainError("1/p - 1/q >= 1 leaves no finite r_{m+1}")
    return RVector(tuple([Exp(Fraction(1))] * p.m + [Exp(last)]))


def gamma_t(r: RVector, t: Number) -> RVector:
    """``(t r_1, ..., t r_m, r_{m+1})`` for ``t > 1``."""
    r, t = RVector.of(r), as_fraction(t)
    if t <= 1:
        raise DomainError(f"t must exceed 1, got {t}")
    recips = [x / t for x in r.recips[:-1]] + [r.recips[-1]]
    return RVector(tuple(Exp(x) for x in recips))


def t0(p: ExpVector, r: RVector) -> Fraction:
    """``min_i p_i / r_i``, the upper end of the admissible ``t`` range."""
    p, r = ExpVector.of(p), RVector.of(r)
    _check_lengths(r, p)
    ratios = [ri / pi for pi, ri in zip(p.recips, r.recips[:-1]) if pi != 0]
    if len(ratios) < p.m:
        return Fraction(10**18)
    return min(ratios)


def hold(values: Sequence[Number | Exp]) -> ExpVector:
    """Shorthand for :meth:`ExpVector.of`."""
    return ExpVector.of(values)


def rvec(values: Sequence[Number | Exp]) -> RVector:
    """Shorthand for :meth:`RVector.of`."""
    return RVector.of(values)
