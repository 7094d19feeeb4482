"""Constructive interpolation-parameter solvers.

All identities are evaluated on :class:`fractions.Fraction` values, so the
postconditions attached to every solution are exact equalities. Weights are
power weights; the factor ``u_i`` of ``w_i = u_i^{1-theta} v_i^theta`` is then
a power weight too and its class membership is decided analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exponents import (
    DimensionError,
    DomainError,
    Exp,
    ExpVector,
    Number,
    RVector,
    as_fraction,
    derived_exponents,
    prec,
    preceq,
)
from .numerics import characteristic_upper_bound
from .power_weights import PowerWeight, in_Ap, in_Apr, limited_range_member

MAX_K = 64


def conj(x: Fraction) -> Fraction:
    """Hölder conjugate of a finite ``x > 1``."""
    if x <= 1:
        raise DomainError(f"conjugate needs x > 1, got {x}")
    return x / (x - 1)


@dataclass(frozen=True)
class AAAInput:
    """Per-index exponents ``gamma, gamma~, eta, eta~`` and reverse Hölder exponents ``tau, tau~``."""

    gamma: tuple[Fraction, ...]
    gamma_t: tuple[Fraction, ...]
    eta: tuple[Fraction, ...]
    eta_t: tuple[Fraction, ...]
    tau: tuple[Fraction, ...]
    tau_t: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        fields = ("gamma", "gamma_t", "eta", "eta_t", "tau", "tau_t")
        vals = {f: tuple(as_fraction(x) for x in getattr(self, f)) for f in fields}
        m = len(vals["gamma"])
        if m == 0 or any(len(v) != m for v in vals.values()):
            raise DimensionError("all per-index tuples need the same positive length")
        for f, v in vals.items():
            object.__setattr__(self, f, v)
        for i in range(m):
            if self.gamma[i] <= 0 or self.gamma_t[i] <= 0:
                raise DomainError("gamma values must be positive")
            if self.eta[i] <= 1 or self.eta_t[i] <= 1:
                raise DomainError("eta values must exceed 1")
            if self.tau[i] <= 1 or self.tau_t[i] <= 1:
                raise DomainError("reverse Hölder exponents must exceed 1")
            if self.eta[i] * self.gamma_t[i] != self.eta_t[i] * self.gamma[i]:
                raise DomainError(f"eta/gamma ratios differ at index {i}")

    @property
    def m(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class AAAOutput:
    theta: Fraction
    k: int
    gamma_hat: tuple[Fraction, ...]
    eta_hat: tuple[Fraction, ...]
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]
    kappa: tuple[Fraction, ...]
    kappa_t: tuple[Fraction, ...]
    margin: float

    def as_dict(self) -> dict:
        s = lambda xs: [str(x) for x in xs]  # noqa: E731
        return {
            "theta": str(self.theta), "k": self.k, "gamma_hat": s(self.gamma_hat), "eta_hat": s(self.eta_hat),
            "alpha": s(self.alpha), "beta": s(self.beta), "kappa": s(self.kappa), "kappa_t": s(self.kappa_t),
            "margin": self.margin,
        }


class AAAFailure(RuntimeError):
    def __init__(self, index: int, margin: float, k: int):
        super().__init__(f"no admissible theta up to 2^-{k}; index {index} blocks with margin {margin:.3e}")
        self.index = index
        self.margin = margin
        self.k = k


def _hat(x: Fraction, x_t: Fraction, theta: Fraction) -> Fraction | None:
    # 1/x = (1-theta)/xhat + theta/x_t ; None when xhat is not a positive finite number
    rec = (1 / x - theta / x_t) / (1 - theta)
    return None if rec <= 0 else 1 / rec


def aaa_quantities(inp: AAAInput, theta: Fraction, i: int) -> dict | None:
    """Every intermediate of the construction at ``theta`` for index ``i`` (None if ``gamma^``/``eta^`` degenerate)."""
    g, gt, e, et = inp.gamma[i], inp.gamma_t[i], inp.eta[i], inp.eta_t[i]
    gh, eh = _hat(g, gt, theta), _hat(e, et, theta)
    if gh is None or eh is None or eh <= 1:
        return None
    alpha = theta * e / conj(et)
    beta = theta * conj(e) / et
    kappa = gh * (1 + alpha) / (g * (1 - theta))
    kappa_t = conj(eh) * (1 + beta) / (conj(e) * (1 - theta))
    return {"gamma_hat": gh, "eta_hat": eh, "alpha": alpha, "beta": beta, "kappa": kappa, "kappa_t": kappa_t}


def solve_AAA(inp: AAAInput, start_k: int = 1, max_k: int = MAX_K) -> AAAOutput:
    """First ``theta = 2^-k`` (``k >= start_k``) with ``kappa_i < tau_i`` and ``kappa~_i < tau~_i`` for all ``i``."""
    worst: tuple[int, float] = (0, -math.inf)
    for k in range(start_k, max_k + 1):
        theta = Fraction(1, 2**k)
        rows = []
        blocked = None
        for i in range(inp.m):
            q = aaa_quantities(inp, theta, i)
            if q is None:
                blocked = (i, -math.inf)
                break
            mg = min(float(inp.tau[i] - q["kappa"]), float(inp.tau_t[i] - q["kappa_t"]))
            if not (q["kappa"] < inp.tau[i] and q["kappa_t"] < inp.tau_t[i]):
                blocked = (i, mg)
                break
            rows.append((q, mg))
        if blocked is None:
            get = lambda key: tuple(r[0][key] for r in rows)  # noqa: E731
            return AAAOutput(theta, k, get("gamma_hat"), get("eta_hat"), get("alpha"), get("beta"),
                             get("kappa"), get("kappa_t"), min(r[1] for r in rows))
        worst = blocked
    raise AAAFailure(worst[0], worst[1], max_k)


# reverse Hölder exponents ----------------------------------------------------


def rh_exponent(b: Fraction, index: Fraction, n: int, mode: str = "sharp") -> Fraction:
    """A reverse Hölder exponent for ``|x|^b in A_index``.

    ``sharp`` follows the sharp reverse Hölder formula with the characteristic
    replaced by a rational upper bound from the interval oracle (``n = 1``
    only) and the power of two rounded up so that the value stays rational.
    ``analytic`` returns the midpoint of the exact range ``1 < t < n/(-b)``.
    """
    b, index = as_fraction(b), as_fraction(index)
    if not in_Ap(PowerWeight(b, n), index).in_class:
        raise DomainError(f"|x|^{b} is not in A_{index}")
    if mode == "analytic" or (mode == "sharp" and n != 1):
        if b >= 0:
            return Fraction(2)
        return (1 + Fraction(n) / (-b)) / 2
    if mode != "sharp":
        raise DomainError(f"unknown reverse Hölder mode {mode!r}")
    char = characteristic_upper_bound(b, index)
    if index == 1:
        return 1 + 1 / (2 ** (n + 1) * char)
    finite = 1 + 1 / (2 ** math.ceil(n + 1 + 2 * index) * char)
    # [w]_{A_inf} is the infimum of the nonincreasing [w]_{A_p}, so a much larger index bounds it;
    # this branch wins for large p
    inf_char = characteristic_upper_bound(b, index * 4096)
    return max(finite, 1 + 1 / (2 ** (n + 11) * inf_char))


def _tau_pair(wa: Fraction, va: Fraction, g: Fraction, gt: Fraction, e: Fraction, et: Fraction,
              n: int, mode: str) -> tuple[Fraction, Fraction]:
    # kappa is compared with the RH exponents of w^g in A_e and of the dual v^{gt(1-et')} in A_{et'};
    # kappa~ with those of w^{g(1-e')} in A_{e'} and v^{gt} in A_{et}
    tau = min(rh_exponent(wa * g, e, n, mode), rh_exponent(va * gt * (1 - conj(et)), conj(et), n, mode))
    tau_t = min(rh_exponent(wa * g * (1 - conj(e)), conj(e), n, mode), rh_exponent(va * gt, et, n, mode))
    return tau, tau_t


# solutions --------------------------------------------------------------------


@dataclass(frozen=True)
class InterpSolution:
    theta: Fraction
    s: ExpVector
    u: tuple[PowerWeight, ...]
    diagnostics: AAAOutput
    checks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "s": [str(e) for e in self.s.entries],
            "u": [str(w.a) for w in self.u],
            "checks": dict(self.checks),
            "ok": self.ok,
            "diagnostics": self.diagnostics.as_dict(),
            "extra": {k: ([str(x) for x in v] if isinstance(v, (list, tuple)) else str(v)) for k, v in self.extra.items()},
        }


def _dims(ws: Sequence[PowerWeight], vs: Sequence[PowerWeight], m: int) -> int:
    if len(ws) != m or len(vs) != m:
        raise DimensionError("weight tuples must have length m")
    n = ws[0].n
    if any(x.n != n for x in list(ws) + list(vs)):
        raise DimensionError("weights on different dimensions")
    return n


def _u_weights(ws: Sequence[PowerWeight], vs: Sequence[PowerWeight], theta: Fraction) -> tuple[PowerWeight, ...]:
    return tuple(PowerWeight((w.a - theta * v.a) / (1 - theta), w.n) for w, v in zip(ws, vs))


def solve_int_Lp(
    p: ExpVector,
    w: Sequence[PowerWeight],
    q: ExpVector,
    v: Sequence[PowerWeight],
    r: RVector,
    tau_mode: str = "sharp",
) -> InterpSolution:
    """``theta``, ``s`` and ``u in A_{s,r}`` with ``1/p_i = (1-theta)/s_i + theta/q_i`` and ``w_i = u_i^{1-theta} v_i^theta``.

    The search needs finite ``theta_i`` and ``eta_i > 1`` for every index,
    which holds when ``r ≺ p`` and ``r ≺ q`` strictly.
    """
    p, q, r = ExpVector.of(p), ExpVector.of(q), RVector.of(r)
    m = p.m
    n = _dims(w, v, m)
    if q.m != m:
        raise DimensionError("p and q have different lengths")
    if not (preceq(r, p) and preceq(r, q)):
        raise DomainError("need r ≼ p and r ≼ q")
    if not (prec(r, p) and prec(r, q)):
        raise DomainError("the construction needs r ≺ p and r ≺ q strictly (finite theta_i, eta_i > 1)")
    if not in_Apr(w, p, r).in_class:
        raise DomainError("w is not in A_{p,r}")
    if not in_Apr(v, q, r).in_class:
        raise DomainError("v is not in A_{q,r}")
    dp, dq = derived_exponents(p, r), derived_exponents(q, r)
    c = dp.level
    # index m carries the product weight, whose exponent is delta_{m+1}
    g_rec = list(dp.theta_recip) + [dp.delta_recip[m]]
    gt_rec = list(dq.theta_recip) + [dq.delta_recip[m]]
    gamma = [1 / x for x in g_rec]
    gamma_t = [1 / x for x in gt_rec]
    eta = [c * x for x in gamma]
    eta_t = [c * x for x in gamma_t]
    wa = [x.a for x in w] + [sum((x.a for x in w), Fraction(0))]
    va = [x.a for x in v] + [sum((x.a for x in v), Fraction(0))]
    taus = [_tau_pair(wa[i], va[i], gamma[i], gamma_t[i], eta[i], eta_t[i], n, tau_mode) for i in range(m + 1)]
    inp = AAAInput(tuple(gamma), tuple(gamma_t), tuple(eta), tuple(eta_t),
                   tuple(t[0] for t in taus), tuple(t[1] for t in taus))

    start = 1
    last: InterpSolution | None = None
    while start <= MAX_K:
        out = solve_AAA(inp, start_k=start)
        theta = out.theta
        th_hat = out.gamma_hat
        dh = [c - 1 / th_hat[i] for i in range(m)] + [1 / th_hat[m]]
        s_rec = [r.recips[i] - dh[i] for i in range(m)]
        u = _u_weights(w, v, theta)
        checks: dict[str, bool] = {}
        checks["eq_pw1"] = all(p.recips[i] == (1 - theta) * s_rec[i] + theta * q.recips[i] for i in range(m))
        checks["weights_factor"] = all(w[i].a == (1 - theta) * u[i].a + theta * v[i].a for i in range(m))
        checks["eq_gaga"] = all(
            1 / gamma[i] == (1 - theta) / th_hat[i] + theta / gamma_t[i]
            and 1 / eta[i] == (1 - theta) / out.eta_hat[i] + theta / eta_t[i]
            for i in range(m + 1)
        )
        checks["eta_hat_ratio"] = all(out.eta_hat[i] == c * th_hat[i] for i in range(m + 1))
        checks["kappa_below_tau"] = all(out.kappa[i] < inp.tau[i] and out.kappa_t[i] < inp.tau_t[i] for i in range(m + 1))
        s_valid = all(0 < x <= 1 for x in s_rec)
        checks["s_admissible"] = s_valid
        if s_valid:
            s = ExpVector(tuple(Exp(x) for x in s_rec))
            checks["last_component"] = r.recips[m] - dh[m] == 1 - s.holder_sum.recip
            checks["r_preceq_s"] = preceq(r, s)
            checks["u_in_Asr"] = checks["r_preceq_s"] and in_Apr(u, s, r).in_class
        else:
            s = ExpVector(tuple(Exp(max(x, Fraction(0))) for x in s_rec))
            checks["last_component"] = checks["r_preceq_s"] = checks["u_in_Asr"] = False
        extra = {"delta_hat_recip": tuple(dh), "theta_hat": tuple(th_hat), "tau": inp.tau, "tau_t": inp.tau_t}
        last = InterpSolution(theta, s, u, out, checks, extra)
        if last.ok:
            return last
        start = out.k + 1
    assert last is not None
    return last


def _pm_exp(x: Number | Exp) -> Exp:
    return Exp.of(x)


def solve_int_lim(
    p: ExpVector,
    w: Sequence[PowerWeight],
    q: ExpVector,
    v: Sequence[PowerWeight],
    pminus: Sequence[Number | Exp],
    pplus: Sequence[Number | Exp],
    tau_mode: str = "sharp",
) -> InterpSolution:
    """Limited-range version: ``u_i^{s_i} in A_{s_i/p_i^-} ∩ RH_{(p_i^+/s_i)'}`` with ``s_i in (p_i^-, p_i^+)``.

    Uses ``gamma = p sigma`` and ``eta = sigma (p/p^- - 1) + 1`` with
    ``sigma = (p^+/p)'``, so that ``w^p in A_{p/p^-} ∩ RH_sigma`` is exactly
    ``w^gamma in A_eta`` and ``eta/gamma = 1/p^- - 1/p^+``.
    """
    p, q = ExpVector.of(p), ExpVector.of(q)
    m = p.m
    n = _dims(w, v, m)
    lo = [_pm_exp(x) for x in pminus]
    hi = [_pm_exp(x) for x in pplus]
    if q.m != m or len(lo) != m or len(hi) != m:
        raise DimensionError("exponent lists must have length m")
    for i in range(m):
        if lo[i].is_infinite:
            raise DomainError("p^- must be finite")
        if not (hi[i].recip < p.recips[i] < lo[i].recip and hi[i].recip < q.recips[i] < lo[i].recip):
            raise DomainError(f"p_{i + 1} and q_{i + 1} must lie in (p^-, p^+)")
        if not limited_range_member(w[i], p[i], lo[i], hi[i]).in_class:
            raise DomainError(f"w_{i + 1} violates the limited-range condition")
        if not limited_range_member(v[i], q[i], lo[i], hi[i]).in_class:
            raise DomainError(f"v_{i + 1} violates the limited-range condition")

    def gam_eta(x_rec: Fraction, i: int) -> tuple[Fraction, Fraction]:
        sigma_rec = 1 - hi[i].recip / x_rec
        sigma = 1 / sigma_rec
        gamma = 1 / (x_rec - hi[i].recip)
        eta = sigma * (lo[i].recip / x_rec - 1) + 1
        return gamma, eta

    ge = [gam_eta(p.recips[i], i) for i in range(m)]
    get = [gam_eta(q.recips[i], i) for i in range(m)]
    gamma, eta = [x[0] for x in ge], [x[1] for x in ge]
    gamma_t, eta_t = [x[0] for x in get], [x[1] for x in get]
    taus = [_tau_pair(w[i].a, v[i].a, gamma[i], gamma_t[i], eta[i], eta_t[i], n, tau_mode) for i in range(m)]
    inp = AAAInput(tuple(gamma), tuple(gamma_t), tuple(eta), tuple(eta_t),
                   tuple(t[0] for t in taus), tuple(t[1] for t in taus))

    start = 1
    last: InterpSolution | None = None
    while start <= MAX_K:
        out = solve_AAA(inp, start_k=start)
        theta = out.theta
        s_rec = [1 / out.gamma_hat[i] + hi[i].recip for i in range(m)]
        u = _u_weights(w, v, theta)
        s = ExpVector(tuple(Exp(x) for x in s_rec))
        checks: dict[str, bool] = {}
        checks["eq_con2"] = all(p.recips[i] == (1 - theta) * s_rec[i] + theta * q.recips[i] for i in range(m))
        checks["weights_factor"] = all(w[i].a == (1 - theta) * u[i].a + theta * v[i].a for i in range(m))
        checks["eq_gaga"] = all(
            1 / gamma[i] == (1 - theta) / out.gamma_hat[i] + theta / gamma_t[i]
            and 1 / eta[i] == (1 - theta) / out.eta_hat[i] + theta / eta_t[i]
            for i in range(m)
        )
        checks["eq_etag"] = all(out.eta_hat[i] == out.gamma_hat[i] * (lo[i].recip - hi[i].recip) for i in range(m))
        in_range = all(hi[i].recip < s_rec[i] < lo[i].recip for i in range(m))
        checks["s_in_range"] = in_range
        if in_range:
            checks["eq_wide"] = all(gam_eta(s_rec[i], i)[1] == out.eta_hat[i] for i in range(m))
            checks["eq_con3"] = all(limited_range_member(u[i], s[i], lo[i], hi[i]).in_class for i in range(m))
            checks["u_gamma_hat_in_A_eta_hat"] = all(
                in_Ap(u[i].pow(out.gamma_hat[i]), out.eta_hat[i]).in_class for i in range(m)
            )
        else:
            checks["eq_wide"] = checks["eq_con3"] = checks["u_gamma_hat_in_A_eta_hat"] = False
        checks["kappa_below_tau"] = all(out.kappa[i] < inp.tau[i] and out.kappa_t[i] < inp.tau_t[i] for i in range(m))
        extra = {"gamma": tuple(gamma), "eta": tuple(eta), "tau": inp.tau, "tau_t": inp.tau_t}
        last = InterpSolution(theta, s, u, out, checks, extra)
        if last.ok:
            return last
        start = out.k + 1
    assert last is not None
    return last


def stein_weiss(p0: Number | Exp, w0: PowerWeight, p1: Number | Exp, w1: PowerWeight, theta: Number) -> tuple[Exp, PowerWeight]:
    """``1/p = (1-theta)/p0 + theta/p1`` and ``w^{1/p} = w0^{(1-theta)/p0} w1^{theta/p1}``."""
    e0, e1, t = Exp.of(p0), Exp.of(p1), as_fraction(theta)
    if not 0 < t < 1:
        raise DomainError("theta must lie in (0, 1)")
    if e0.recip > 1 or e1.recip > 1 or e0.is_infinite or e1.is_infinite:
        raise DomainError("need 1 <= p0, p1 < inf")
    if w0.n != w1.n:
        raise DimensionError("weights on different dimensions")
    rec = (1 - t) * e0.recip + t * e1.recip
    a = ((1 - t) * e0.recip * w0.a + t * e1.recip * w1.a) / rec
    return Exp(rec), PowerWeight(a, w0.n)


# log-convexity on diagonal operators -----------------------------------------


@dataclass(frozen=True, eq=False)
class DiagonalEndpoint:
    """Weighted sequence spaces ``l^{p_i}(w_i^{p_i})`` into ``l^{p_out}(w_out^{p_out})`` on ``K`` points.

    Norms are ``||f w||_{l^p}``, so Stein–Weiss interpolation multiplies the
    weights geometrically.
    """

    p_in: tuple[float, ...]
    w_in: np.ndarray
    p_out: float
    w_out: np.ndarray

    def __post_init__(self) -> None:
        w_in = np.atleast_2d(np.asarray(self.w_in, dtype=float))
        w_out = np.asarray(self.w_out, dtype=float)
        if w_in.shape[0] != len(self.p_in) or w_in.shape[1] != w_out.shape[0]:
            raise DimensionError("weight arrays do not match the exponent list")
        if np.any(w_in <= 0) or np.any(w_out <= 0):
            raise DomainError("weights must be positive")
        if any(x < 1 for x in self.p_in) or self.p_out < 1:
            raise DomainError("endpoint exponents must be at least 1")
        object.__setattr__(self, "w_in", w_in)
        object.__setattr__(self, "w_out", w_out)


def _lp_norm(x: np.ndarray, p: float) -> float:
    x = np.abs(x)
    if math.isinf(p):
        return float(np.max(x)) if x.size else 0.0
    mx = float(np.max(x)) if x.size else 0.0
    if mx == 0:
        return 0.0
    return mx * float(np.sum((x / mx) ** p)) ** (1 / p)


def diagonal_symbol(c: np.ndarray, ep: DiagonalEndpoint) -> np.ndarray:
    return np.abs(c) * ep.w_out / np.prod(ep.w_in, axis=0)


def diagonal_norm(c: np.ndarray, ep: DiagonalEndpoint) -> float:
    """Norm of ``(f_i) -> c prod f_i`` between the endpoint spaces.

    After absorbing the weights this is multiplication by ``d`` from
    ``l^{p_1} x ... x l^{p_m}`` to ``l^{p_out}``, whose norm is
    ``||d||_{l^s}`` with ``1/s = max(0, 1/p_out - sum 1/p_i)``.
    """
    d = diagonal_symbol(np.asarray(c, dtype=float), ep)
    srec = max(0.0, 1 / ep.p_out - sum(1 / x for x in ep.p_in))
    return _lp_norm(d, math.inf if srec == 0 else 1 / srec)


def interpolate_endpoint(e1: DiagonalEndpoint, e2: DiagonalEndpoint, theta: float) -> DiagonalEndpoint:
    pin = tuple(1 / ((1 - theta) / a + theta / b) for a, b in zip(e1.p_in, e2.p_in))
    pout = 1 / ((1 - theta) / e1.p_out + theta / e2.p_out)
    w_in = e1.w_in ** (1 - theta) * e2.w_in**theta
    w_out = e1.w_out ** (1 - theta) * e2.w_out**theta
    return DiagonalEndpoint(pin, w_in, pout, w_out)


@dataclass(frozen=True)
class LogConvexityReport:
    ok: bool
    worst_ratio: float
    m1: float
    m2: float
    thetas: tuple[float, ...]
    m_theta: tuple[float, ...]
    rtol: float

    def as_dict(self) -> dict:
        return {"ok": self.ok, "worst_ratio": self.worst_ratio, "M1": self.m1, "M2": self.m2, "rtol": self.rtol}


def verify_log_convexity(
    c: Sequence[float],
    e1: DiagonalEndpoint,
    e2: DiagonalEndpoint,
    thetas: Sequence[float] | None = None,
    rtol: float = 1e-12,
) -> LogConvexityReport:
    """Check ``M_theta <= M_1^{1-theta} M_2^theta`` on a grid of ``theta`` values (99 by default)."""
    c = np.asarray(c, dtype=float)
    if len(e1.p_in) != len(e2.p_in):
        raise DimensionError("endpoints of different multilinearity")
    if thetas is None:
        thetas = [k / 100 for k in range(1, 100)]
    m1, m2 = diagonal_norm(c, e1), diagonal_norm(c, e2)
    worst = 0.0
    mts = []
    for t in thetas:
        mt = diagonal_norm(c, interpolate_endpoint(e1, e2, t))
        bound = m1 ** (1 - t) * m2**t
        mts.append(mt)
        if mt > 0:
            worst = max(worst, mt / bound if bound > 0 else math.inf)
    return LogConvexityReport(worst <= 1 + rtol, worst, m1, m2, tuple(thetas), tuple(mts), rtol)


def random_endpoint(rng: np.random.Generator, m: int, K: int) -> DiagonalEndpoint:
    p_in = tuple(float(x) for x in 1 + rng.exponential(2.0, size=m))
    p_out = float(1 + rng.exponential(2.0))
    return DiagonalEndpoint(p_in, np.exp(rng.normal(0, 1, size=(m, K))), p_out, np.exp(rng.normal(0, 1, size=K)))


def random_diagonal_instance(rng: np.random.Generator, max_m: int = 3, max_K: int = 12):
    m = int(rng.integers(1, max_m + 1))
    K = int(rng.integers(1, max_K + 1))
    c = np.exp(rng.normal(0, 1, size=K))
    return c, random_endpoint(rng, m, K), random_endpoint(rng, m, K)
