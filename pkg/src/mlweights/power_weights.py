"""Analytic class membership for power weights ``|x|^a`` on ``R^n``.

Every criterion here is an exact comparison of rationals. Multilinear classes
are decided through the reduction to classical ``A_q`` conditions, so the
verdict carries the list of conditions it was built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exponents import (
    ClassicalCondition,
    DimensionError,
    DomainError,
    Exp,
    ExpVector,
    Number,
    RVector,
    apq_reduction,
    apr_characterization,
    as_fraction,
    derived_exponents,
    preceq,
    rvec_prec,
)


@dataclass(frozen=True)
class PowerWeight:
    """``|x|^a`` on ``R^n`` with rational ``a``.

    Negative exponents at or below ``-n`` are representable because they
    arise as intermediate powers (``w^{-p'}`` and friends); use
    :attr:`locally_integrable` when the weight itself must be a weight.
    """

    a: Fraction
    n: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", as_fraction(self.a))
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.n!r}")

    @property
    def locally_integrable(self) -> bool:
        return self.a > -self.n

    def pow(self, t: Number) -> PowerWeight:
        return PowerWeight(self.a * as_fraction(t), self.n)

    def __mul__(self, other: PowerWeight) -> PowerWeight:
        if not isinstance(other, PowerWeight):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError("power weights on different dimensions")
        return PowerWeight(self.a + other.a, self.n)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., n)`` (or ``(...)`` when ``n == 1``)."""
        x = np.asarray(x, dtype=float)
        r = np.abs(x) if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1) else np.linalg.norm(x, axis=-1)
        return r ** float(self.a)

    def __str__(self) -> str:
        return f"|x|^{self.a}" + ("" if self.n == 1 else f" on R^{self.n}")


def product(ws: Sequence[PowerWeight]) -> PowerWeight:
    if not ws:
        raise DimensionError("empty weight tuple")
    out = ws[0]
    for w in ws[1:]:
        out = out * w
    return out


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of one classical condition inside a reduction."""

    label: str
    weight_exponent: Fraction
    index: Fraction | None
    in_class: bool
    boundary: bool
    condition: ClassicalCondition | None = None

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "weight_exponent": str(self.weight_exponent),
            "index": None if self.index is None else str(self.index),
            "in_class": self.in_class,
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class MembershipVerdict:
    in_class: bool
    boundary: bool
    reduction_trace: tuple[ConditionResult, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.in_class

    def failing(self) -> list[ConditionResult]:
        return [c for c in self.reduction_trace if not c.in_class]

    def as_dict(self) -> dict:
        return {
            "in_class": self.in_class,
            "boundary": self.boundary,
            "reduction_trace": [c.as_dict() for c in self.reduction_trace],
        }


def _combine(results: Sequence[ConditionResult]) -> MembershipVerdict:
    ok = all(c.in_class for c in results)
    return MembershipVerdict(ok, (not ok) and any(c.boundary for c in results), tuple(results))


def _ap_interval(a: Fraction, n: int, recip: Fraction) -> tuple[bool, bool]:
    # Classical open-interval criterion; recip = 1/p, recip = 0 means A_inf.
    if recip > 1:
        raise DomainError(f"A_p needs p >= 1, got p = {1 / recip}")
    lower_ok = a > -n
    boundary = a == -n
    if recip == 0:
        return lower_ok, boundary
    if recip == 1:
        return lower_ok and a <= 0, boundary
    upper = n * (1 / recip - 1)
    boundary = boundary or a == upper
    return lower_ok and a < upper, boundary


def in_Ap(w: PowerWeight, p: Number | Exp) -> MembershipVerdict:
    """``|x|^a in A_p``: ``-n < a < n(p-1)`` for ``p > 1``, ``-n < a <= 0`` for ``p = 1``.

    ``p = inf`` is read as ``A_inf`` (``a > -n``).
    """
    e = Exp.of(p)
    ok, boundary = _ap_interval(w.a, w.n, e.recip)
    idx = None if e.is_infinite else 1 / e.recip
    res = ConditionResult(f"{w} in A_{e}", w.a, idx, ok, boundary and not ok)
    return MembershipVerdict(ok, boundary and not ok, (res,))


def _parse_rh(s: Number | Exp) -> Fraction | None:
    if isinstance(s, Exp):
        return None if s.is_infinite else 1 / s.recip
    if isinstance(s, str) and s.strip().lower() in {"inf", "infinity", "oo"}:
        return None
    if isinstance(s, float) and math.isinf(s):
        return None
    return as_fraction(s)


def in_RHs(w: PowerWeight, s: Number | Exp) -> MembershipVerdict:
    """Reverse Hölder membership via the reduction ``w in A_p, w^s in A_{s(p-1)+1}``.

    The witness ``p = 2 + max(a, 0)/n`` is large enough that ``w in A_p``
    whenever ``w`` is a weight, so the verdict is decided by ``w^s``. For
    ``s = inf`` the class is ``a >= 0`` (the weight is bounded on every cube
    by a multiple of its average exactly when it does not blow up at 0).
    """
    if not w.locally_integrable:
        res = ConditionResult(f"{w} locally integrable", w.a, None, False, w.a == -w.n)
        return _combine([res])
    sv = _parse_rh(s)
    if sv is None:
        ok = w.a >= 0
        res = ConditionResult(f"{w} in RH_inf", w.a, None, ok, False)
        return MembershipVerdict(ok, False, (res,))
    if sv <= 1:
        raise DomainError(f"RH_s needs s > 1, got {sv}")
    p = 2 + max(w.a, Fraction(0)) / w.n
    tau = sv * (p - 1) + 1
    first = in_Ap(w, p).reduction_trace[0]
    second = in_Ap(w.pow(sv), tau).reduction_trace[0]
    return _combine([first, second])


def _check_dims(ws: Sequence[PowerWeight]) -> int:
    if not ws:
        raise DimensionError("empty weight tuple")
    n = ws[0].n
    if any(w.n != n for w in ws):
        raise DimensionError("weights live on different dimensions")
    return n


def evaluate_condition(cond: ClassicalCondition, exponent: Fraction, n: int) -> ConditionResult:
    """Decide ``W^(1/rho) in A_(level/rho)`` for ``W = |x|^exponent``."""
    rho, c = cond.power_recip, cond.level
    if cond.esssup:
        # limit rho -> 0 of -n rho < A < n(c - rho): the lower end closes at 0
        ok = exponent >= 0 and exponent < n * c
        boundary = exponent == n * c
        return ConditionResult(f"esssup form, |x|^{exponent}", exponent, None, ok, boundary and not ok, cond)
    scaled = exponent / rho
    index = c / rho
    ok, boundary = _ap_interval(scaled, n, 1 / index)
    return ConditionResult(
        f"|x|^{scaled} in A_{index}", scaled, index, ok, boundary and not ok, cond
    )


def in_Apr(wvec: Sequence[PowerWeight], p: ExpVector, r: RVector) -> MembershipVerdict:
    """``w in A_{p,r}`` through the ``m + 1`` classical conditions of the characterization."""
    p, r = ExpVector.of(p), RVector.of(r)
    n = _check_dims(wvec)
    if len(wvec) != p.m:
        raise DimensionError(f"{len(wvec)} weights for m = {p.m}")
    conds = apr_characterization(p, r)
    total = sum((w.a for w in wvec), Fraction(0))
    results = []
    for cond in conds:
        a = total if cond.target == p.m else wvec[cond.target].a
        results.append(evaluate_condition(cond, a, n))
    return _combine(results)


def _apq_conditions(wvec: Sequence[PowerWeight], p: ExpVector, q: Exp, factor: Fraction) -> list[ConditionResult]:
    n = _check_dims(wvec)
    qv = 1 / q.recip
    total = sum((w.a for w in wvec), Fraction(0))
    out = [in_Ap(PowerWeight(total * qv, n), factor * qv).reduction_trace[0]]
    for i, (w, e) in enumerate(zip(wvec, p.entries)):
        if e.recip == 1:
            res = in_Ap(w.pow(1 / factor), 1).reduction_trace[0]
        else:
            pc = 1 / (1 - e.recip)
            res = in_Ap(w.pow(-pc), factor * pc).reduction_trace[0]
        out.append(ConditionResult(f"slot {i + 1}: {res.label}", res.weight_exponent, res.index, res.in_class, res.boundary))
    return out


def apq_conditions_1(wvec: Sequence[PowerWeight], p: ExpVector, q: Number | Exp) -> MembershipVerdict:
    """``w^q in A_{mq}`` and ``w_i^{-p_i'} in A_{m p_i'}`` (``w_i^{1/m} in A_1`` when ``p_i = 1``)."""
    p, q = ExpVector.of(p), Exp.of(q)
    _apq_pre(p, q, len(wvec))
    return _combine(_apq_conditions(wvec, p, q, Fraction(p.m)))


def apq_conditions_2(wvec: Sequence[PowerWeight], p: ExpVector, q: Number | Exp) -> MembershipVerdict:
    """As :func:`apq_conditions_1` with ``m`` replaced by ``m - 1/p + 1/q``."""
    p, q = ExpVector.of(p), Exp.of(q)
    _apq_pre(p, q, len(wvec))
    factor = p.m - p.holder_sum.recip + q.recip
    return _combine(_apq_conditions(wvec, p, q, factor))


def _apq_pre(p: ExpVector, q: Exp, m: int) -> None:
    if m != p.m:
        raise DimensionError(f"{m} weights for m = {p.m}")
    if q.is_infinite or q.recip > p.holder_sum.recip:
        raise DomainError("need p <= q < inf")
    if any(e.is_infinite or e.recip > 1 for e in p.entries):
        raise DomainError("need 1 <= p_i < inf")


def in_Apq(wvec: Sequence[PowerWeight], p: ExpVector, q: Number | Exp) -> MembershipVerdict:
    """``w in A_{p,q}`` by the first characterization, cross-checked against the second."""
    v1 = apq_conditions_1(wvec, p, q)
    v2 = apq_conditions_2(wvec, p, q)
    if v1.in_class != v2.in_class:
        raise AssertionError(f"characterizations disagree for {[str(w) for w in wvec]}")
    return v1


def apr_via_apq(wvec: Sequence[PowerWeight], p: ExpVector, q: Number | Exp) -> MembershipVerdict:
    """``A_{p,q}`` decided as ``A_{p,r}`` with ``r = (1, ..., 1, r_{m+1})``."""
    return in_Apr(wvec, p, apq_reduction(p, q))


def apw_case(p: ExpVector, r: RVector) -> str:
    """Which branch of the strict-inclusion construction applies to ``(p, r)``.

    Since ``1/theta_1 = 1/delta_{m+1} + sum_{2 <= j <= m} 1/delta_j`` the
    second branch (``theta_1 > delta_{m+1}``) never occurs; the function is
    kept so that callers can record the case.
    """
    d = derived_exponents(p, r)
    # theta_1 <= delta_{m+1}  <=>  1/theta_1 >= 1/delta_{m+1}
    return "theta_le_delta" if d.theta_recip[0] >= d.delta_recip[-1] else "theta_gt_delta"


def _candidates(p: ExpVector, r: RVector, s: RVector, n: int) -> list[list[PowerWeight]]:
    ds = derived_exponents(p, s)
    dr = derived_exponents(p, r)
    m = p.m
    out: list[list[PowerWeight]] = []

    def single(i: int, a: Fraction) -> list[PowerWeight]:
        ws = [PowerWeight(0, n)] * m
        ws = list(ws)
        ws[i] = PowerWeight(a, n)
        return ws

    for i in range(m):
        if ds.delta_recip[i] > 0:
            # sits exactly on the open endpoint of w_i^{theta_i} in A_{c theta_i} for s
            out.append(single(i, n * ds.delta_recip[i]))
    for i in range(m):
        # product-weight lower endpoint for s, strictly inside for r
        if ds.delta_recip[m] > 0:
            out.append(single(i, -n * ds.delta_recip[m]))
        else:
            out.append(single(i, -n * dr.delta_recip[m] / 2))
    for i in range(m):
        gap = dr.delta_recip[i] - ds.delta_recip[i]
        if gap > 0:
            out.append(single(i, n * (ds.delta_recip[i] + gap / 2)))
    return out


def apw_counterexample(p: ExpVector, r: RVector, s: RVector, n: int = 1) -> list[PowerWeight]:
    """A tuple ``(|x|^a, 1, ..., 1)`` in ``A_{p,r}`` but not in ``A_{p,s}``.

    The primary witness takes ``a = n/delta_1(s)``, which makes
    ``w_1^{theta_1} in A_{c theta_1}`` fail on the boundary for ``s`` while the
    ``r`` conditions stay strictly inside their intervals. Other slots and the
    product-weight endpoint are tried when ``s_1 = p_1``. Every returned tuple
    is re-verified through :func:`in_Apr`.
    """
    p, r, s = ExpVector.of(p), RVector.of(r), RVector.of(s)
    if r == s:
        raise DomainError("r and s coincide; no strict inclusion to witness")
    if not rvec_prec(r, s):
        raise DomainError(f"need r ≺ s, got r = {r}, s = {s}")
    if not preceq(s, p):
        raise DomainError(f"need s ≼ p, got s = {s}, p = {p}")
    for ws in _candidates(p, r, s, n):
        if in_Apr(ws, p, r).in_class and not in_Apr(ws, p, s).in_class:
            return ws
    raise DomainError(f"no single-slot power-weight witness for r = {r}, s = {s}, p = {p}")


def boundary_witness(p: ExpVector, r: RVector, s: RVector, n: int = 1) -> list[PowerWeight]:
    """The first-branch construction read literally with ``w_1 = w_0^{1/theta_1}``.

    ``p_0 = (1/s - 1) theta_1(s)`` and ``w_0 = |x|^{n(p_0 - 1)}``, so that
    ``w_1^{theta_1} = w_0`` sits on the boundary of ``A_{p_0}``.
    """
    p, r, s = ExpVector.of(p), RVector.of(r), RVector.of(s)
    ds = derived_exponents(p, s)
    if ds.theta_recip[0] == 0:
        raise DomainError("theta_1 is infinite for s")
    p0 = ds.level / ds.theta_recip[0]
    a = n * (p0 - 1) * ds.theta_recip[0]
    return [PowerWeight(a, n)] + [PowerWeight(0, n)] * (p.m - 1)


def limited_range_member(w: PowerWeight, p: Number | Exp, pminus: Number | Exp, pplus: Number | Exp) -> MembershipVerdict:
    """``w^p in A_{p/p^-} ∩ RH_{(p^+/p)'}``; ``p^+ = inf`` gives ``RH_{1}``, imposing nothing."""
    pe, lo, hi = Exp.of(p), Exp.of(pminus), Exp.of(pplus)
    if pe.is_infinite or lo.is_infinite:
        raise DomainError("p and p^- must be finite")
    pv = 1 / pe.recip
    wp = w.pow(pv)
    a_part = in_Ap(wp, lo.recip * pv).reduction_trace
    # (p^+/p)' has reciprocal 1 - p/p^+
    rh_recip = 1 - hi.recip * pv
    if rh_recip <= 0:
        raise DomainError("need p < p^+")
    if rh_recip == 1:
        return _combine(list(a_part))
    return _combine(list(a_part) + list(in_RHs(wp, 1 / rh_recip).reduction_trace))
