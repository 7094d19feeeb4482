"""Grid estimates of weight characteristics over finite cube families.

Weights are sampled at the centers of a uniform grid on ``[-L, L]^n``. Cube
averages are taken by reshaping the sample array into blocks, so every cube is
a union of whole cells and the midpoint rule is exact for the piecewise
constant discretization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import optimize

from .exponents import DomainError, Exp, ExpVector, Number, RVector, as_fraction, derived_exponents
from .power_weights import PowerWeight


class GridMismatch(ValueError):
    """Sampled objects that do not share a grid."""


@dataclass(frozen=True)
class Grid:
    """Cell-centered grid with ``cells`` cells per axis on ``[-L, L]^n``."""

    n: int
    L: float
    cells: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        if not self.L > 0:
            raise DomainError("half width must be positive")
        if self.cells < 2 or self.cells & (self.cells - 1):
            raise DomainError(f"cells per axis must be a power of two >= 2, got {self.cells}")

    @property
    def h(self) -> float:
        return 2 * self.L / self.cells

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells,) * self.n

    def axis(self) -> np.ndarray:
        """Cell centers along one axis; 0 is never a center."""
        return -self.L + self.h * (np.arange(self.cells) + 0.5)

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis()] * self.n), indexing="ij"))

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(x * x for x in self.mesh()))

    def with_cells(self, cells: int) -> Grid:
        return Grid(self.n, self.L, cells)


@dataclass(frozen=True, eq=False)
class SampledWeight:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"values of shape {v.shape} on grid {self.grid.shape}")
        if not np.all(np.isfinite(v)) or not np.all(v > 0):
            raise DomainError("weight samples must be finite and positive")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_power(cls, grid: Grid, w: PowerWeight) -> SampledWeight:
        if w.n != grid.n:
            raise GridMismatch("power weight and grid dimensions differ")
        return cls(grid, grid.radius() ** float(w.a))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[..., np.ndarray]) -> SampledWeight:
        return cls(grid, fn(*grid.mesh()))

    def scaled(self, c: float) -> SampledWeight:
        return SampledWeight(self.grid, c * self.values)

    def pow(self, t: float) -> SampledWeight:
        return SampledWeight(self.grid, self.values ** float(t))


@dataclass(frozen=True)
class CubeLevel:
    side: int
    shift: int
    depth: int

    def count(self, cells: int) -> int:
        return (cells - self.shift) // self.side


@dataclass(frozen=True)
class CubeId:
    side: int
    shift: int
    index: tuple[int, ...]

    def bounds(self, grid: Grid) -> list[tuple[float, float]]:
        """Physical ``(lo, hi)`` per axis."""
        out = []
        for k in self.index:
            lo = -grid.L + grid.h * (self.shift + k * self.side)
            out.append((lo, lo + grid.h * self.side))
        return out

    def as_dict(self) -> dict:
        return {"side_cells": self.side, "shift_cells": self.shift, "index": list(self.index)}


@dataclass(frozen=True)
class CubeFamily:
    """Finite family of cubes made of whole cells, grouped in translated dyadic levels.

    Each level is a tiling of part of the box by cubes of ``side`` cells,
    translated by ``shift`` cells along every axis.
    """

    grid: Grid
    levels: tuple[CubeLevel, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise DomainError("empty cube family")
        for lv in self.levels:
            if lv.side < 2:
                raise DomainError("cube side must be at least two cells")
            if lv.count(self.grid.cells) < 1:
                raise DomainError(f"level {lv} contains no cube")

    @classmethod
    def dyadic(
        cls,
        grid: Grid,
        depth: int,
        shifts: Sequence[Number] | int = (0, Fraction(1, 3), Fraction(2, 3)),
    ) -> CubeFamily:
        """Dyadic subdivisions of depth ``0..depth``, each translated by the given fractions of its side.

        An integer ``shifts = k`` means the fractions ``0, 1/k, ..., (k-1)/k``.
        Shifts are rounded to whole cells; duplicates and empty levels are dropped.
        """
        if isinstance(shifts, int):
            fracs = [Fraction(j, shifts) for j in range(shifts)]
        else:
            fracs = [as_fraction(s) for s in shifts]
        max_depth = int(math.log2(grid.cells)) - 1
        if depth > max_depth:
            raise DomainError(f"depth {depth} leaves cubes thinner than two cells (max {max_depth})")
        levels: list[CubeLevel] = []
        for d in range(depth + 1):
            side = grid.cells >> d
            seen = set()
            for f in fracs:
                shift = int(round(f * side)) % side
                if shift in seen:
                    continue
                seen.add(shift)
                lv = CubeLevel(side, shift, d)
                if lv.count(grid.cells) >= 1:
                    levels.append(lv)
        return cls(grid, tuple(levels))

    @classmethod
    def exhaustive(cls, grid: Grid, min_side: int = 2) -> CubeFamily:
        """Every cube made of whole cells with side at least ``min_side`` (small grids only)."""
        levels = [
            CubeLevel(side, shift, -1)
            for side in range(max(2, min_side), grid.cells + 1)
            for shift in range(side)
            if (grid.cells - shift) // side >= 1
        ]
        return cls(grid, tuple(levels))

    @property
    def max_depth(self) -> int:
        return max(lv.depth for lv in self.levels)

    def size(self) -> int:
        return sum(lv.count(self.grid.cells) ** self.grid.n for lv in self.levels)


def _blocks(values: np.ndarray, side: int, shift: int) -> np.ndarray:
    """View ``values`` as ``(k, side, k, side, ...)`` blocks starting at ``shift`` on each axis."""
    n = values.ndim
    k = (values.shape[0] - shift) // side
    sl = tuple(slice(shift, shift + k * side) for _ in range(n))
    shape: list[int] = []
    for _ in range(n):
        shape += [k, side]
    return values[sl].reshape(shape)


def _inner_axes(n: int) -> tuple[int, ...]:
    return tuple(2 * i + 1 for i in range(n))


def cube_mean(values: np.ndarray, side: int, shift: int) -> np.ndarray:
    b = _blocks(values, side, shift)
    return b.mean(axis=_inner_axes(values.ndim))


def cube_max(values: np.ndarray, side: int, shift: int) -> np.ndarray:
    return _blocks(values, side, shift).max(axis=_inner_axes(values.ndim))


def cube_min(values: np.ndarray, side: int, shift: int) -> np.ndarray:
    return _blocks(values, side, shift).min(axis=_inner_axes(values.ndim))


def power_mean(values: np.ndarray, rho: float, side: int, shift: int) -> np.ndarray:
    """``(avg v^{1/rho})^{rho}`` on every cube; ``rho = 0`` gives the cube maximum."""
    if rho == 0:
        return cube_max(values, side, shift)
    return cube_mean(values ** (1.0 / rho), side, shift) ** rho


@dataclass(frozen=True)
class CharEstimate:
    value: float
    argmax_cube: CubeId
    family_meta: dict
    per_level: tuple[tuple[int, int, int, float], ...] = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_cube": self.argmax_cube.as_dict(),
            "family_meta": dict(self.family_meta),
        }

    def level_rows(self) -> list[dict]:
        return [{"depth": d, "side_cells": s, "shift_cells": t, "max_value": v} for d, s, t, v in self.per_level]


def _sup(cubes: CubeFamily, per_cube: Callable[[int, int], np.ndarray]) -> CharEstimate:
    best = -math.inf
    best_id: CubeId | None = None
    best_level: CubeLevel | None = None
    rows = []
    for lv in cubes.levels:
        vals = per_cube(lv.side, lv.shift)
        flat = int(np.argmax(vals))
        v = float(vals.reshape(-1)[flat])
        rows.append((lv.depth, lv.side, lv.shift, v))
        if v > best:
            best = v
            best_id = CubeId(lv.side, lv.shift, tuple(int(i) for i in np.unravel_index(flat, vals.shape)))
            best_level = lv
    assert best_id is not None and best_level is not None
    meta = {"depth": best_level.depth, "side_cells": best_level.side, "shift_cells": best_level.shift,
            "max_depth": cubes.max_depth, "cubes": cubes.size()}
    return CharEstimate(best, best_id, meta, tuple(rows))


def _check_grid(w: SampledWeight, cubes: CubeFamily) -> None:
    if w.grid != cubes.grid:
        raise GridMismatch("weight and cube family live on different grids")


def estimate_Ap(w: SampledWeight, p: Number | Exp, cubes: CubeFamily) -> CharEstimate:
    """``max_Q (avg w)(avg w^{1-p'})^{p-1}``; for ``p = 1`` the ratio ``avg w / min w``."""
    _check_grid(w, cubes)
    e = Exp.of(p)
    if e.recip > 1 or e.is_infinite:
        raise DomainError("estimate_Ap needs 1 <= p < inf")
    v = w.values
    if e.recip == 1:
        return _sup(cubes, lambda s, t: cube_mean(v, s, t) / cube_min(v, s, t))
    pm1 = float(1 / e.recip - 1)
    dual = v ** (-1.0 / pm1)
    return _sup(cubes, lambda s, t: cube_mean(v, s, t) * cube_mean(dual, s, t) ** pm1)


def estimate_RH(w: SampledWeight, s: Number, cubes: CubeFamily) -> CharEstimate:
    """``max_Q (avg w^s)^{1/s} / avg w``."""
    _check_grid(w, cubes)
    sv = float(as_fraction(s))
    if sv <= 1:
        raise DomainError("RH_s needs s > 1")
    v = w.values
    vs = v**sv
    return _sup(cubes, lambda a, b: cube_mean(vs, a, b) ** (1.0 / sv) / cube_mean(v, a, b))


def _shared_grid(wvec: Sequence[SampledWeight], cubes: CubeFamily) -> None:
    for w in wvec:
        _check_grid(w, cubes)


def apr_cube_values(wvec: Sequence[SampledWeight], p: ExpVector, r: RVector, side: int, shift: int) -> np.ndarray:
    """The multilinear product of Definition-style averages on every cube of one level."""
    d = derived_exponents(ExpVector.of(p), RVector.of(r))
    prod_w = np.prod(np.stack([w.values for w in wvec]), axis=0)
    out = power_mean(prod_w, float(d.delta_recip[-1]), side, shift)
    for w, rho in zip(wvec, d.delta_recip[:-1]):
        out = out * power_mean(1.0 / w.values, float(rho), side, shift)
    return out


def estimate_Apr(wvec: Sequence[SampledWeight], p: ExpVector, r: RVector, cubes: CubeFamily) -> CharEstimate:
    """Supremum over the family of the multilinear ``A_{p,r}`` product.

    Degenerate exponents use the cube maximum of ``w`` (product term) or of
    ``w_i^{-1}``, the sampled stand-in for the essential supremum.
    """
    _shared_grid(wvec, cubes)
    p, r = ExpVector.of(p), RVector.of(r)
    if len(wvec) != p.m:
        raise DomainError(f"{len(wvec)} weights for m = {p.m}")
    return _sup(cubes, lambda s, t: apr_cube_values(wvec, p, r, s, t))


@dataclass(frozen=True)
class HolderSplit:
    """Exponents ``s_i`` with ``1/s_i' = 1/delta_i`` and ``t_i`` with ``sum 1/t_i = 1/delta_{m+1}``."""

    s_recip: tuple[Fraction, ...]
    t_recip: tuple[Fraction, ...]


def holder_split(p: ExpVector, r: RVector, t_recip: Sequence[Number] | None = None) -> HolderSplit:
    """Exponents for the product bound ``[w]_{A_{p,r}} <= prod [w_i]_{A_{s_i,t_i}}``.

    Without an explicit ``t_recip`` the budget ``1/delta_{m+1}`` is split evenly.
    """
    d = derived_exponents(ExpVector.of(p), RVector.of(r))
    p, r = ExpVector.of(p), RVector.of(r)
    s_rec = tuple(1 - ri + pi for ri, pi in zip(r.recips[:-1], p.recips))
    if t_recip is None:
        t_rec = tuple(d.delta_recip[-1] / p.m for _ in range(p.m))
    else:
        t_rec = tuple(as_fraction(t) for t in t_recip)
        if sum(t_rec) != d.delta_recip[-1] or any(t < 0 for t in t_rec):
            raise DomainError("t reciprocals must be nonnegative and sum to 1/delta_{m+1}")
    return HolderSplit(s_rec, t_rec)


def ast_cube_values(w: SampledWeight, s_recip: Fraction, t_recip: Fraction, side: int, shift: int) -> np.ndarray:
    """``(avg w^t)^{1/t} (avg w^{-s'})^{1/s'}`` per cube, with maxima standing in for infinite exponents."""
    return power_mean(w.values, float(t_recip), side, shift) * power_mean(1.0 / w.values, float(1 - s_recip), side, shift)


def estimate_Ast(w: SampledWeight, s_recip: Number, t_recip: Number, cubes: CubeFamily) -> CharEstimate:
    """Single-weight ``[w]_{A_{s,t}}`` over the family."""
    _check_grid(w, cubes)
    sr, tr = as_fraction(s_recip), as_fraction(t_recip)
    return _sup(cubes, lambda a, b: ast_cube_values(w, sr, tr, a, b))


@dataclass(frozen=True)
class HolderBoundReport:
    ok: bool
    worst_ratio: float
    apr_value: float
    product_bound: float
    split: HolderSplit


def verify_holder_bound(
    wvec: Sequence[SampledWeight], p: ExpVector, r: RVector, cubes: CubeFamily, rtol: float = 1e-6
) -> HolderBoundReport:
    """Check the product bound cube by cube and for the suprema over the family."""
    _shared_grid(wvec, cubes)
    split = holder_split(p, r)
    worst = 0.0
    for lv in cubes.levels:
        lhs = apr_cube_values(wvec, p, r, lv.side, lv.shift)
        rhs = np.ones_like(lhs)
        for w, sr, tr in zip(wvec, split.s_recip, split.t_recip):
            rhs = rhs * ast_cube_values(w, sr, tr, lv.side, lv.shift)
        worst = max(worst, float(np.max(lhs / rhs)))
    apr = estimate_Apr(wvec, p, r, cubes).value
    bound = math.prod(estimate_Ast(w, sr, tr, cubes).value for w, sr, tr in zip(wvec, split.s_recip, split.t_recip))
    ok = worst <= 1 + rtol and apr <= bound * (1 + rtol)
    return HolderBoundReport(ok, worst, apr, bound, split)


def sharp_rh_exponent(n: int, class_kind: str, char_value: float, p: Number | None = None) -> float:
    """Exponent ``r_w`` of the sharp reverse Hölder inequality."""
    if char_value < 1:
        raise DomainError("characteristic values are at least 1")
    kind = class_kind.lower()
    if kind == "a1":
        return 1 + 1 / (2 ** (n + 1) * char_value)
    if kind == "ap":
        if p is None:
            raise DomainError("class Ap needs p")
        pv = float(as_fraction(p))
        if pv <= 1:
            raise DomainError("class Ap needs p > 1")
        return 1 + 1 / (2 ** (n + 1 + 2 * pv) * char_value)
    if kind == "ainf":
        return 1 + 1 / (2 ** (n + 11) * char_value)
    raise DomainError(f"unknown class kind {class_kind!r}")


@dataclass(frozen=True)
class SharpRHReport:
    ok: bool
    r_w: float
    worst_ratio: float
    worst_cube: CubeId
    tol: float

    def as_dict(self) -> dict:
        return {"ok": self.ok, "r_w": self.r_w, "worst_ratio": self.worst_ratio,
                "worst_cube": self.worst_cube.as_dict(), "tol": self.tol}


def verify_sharp_RH(
    w: SampledWeight,
    class_kind: str,
    char_value: float,
    cubes: CubeFamily,
    p: Number | None = None,
    tol: float = 1e-6,
) -> SharpRHReport:
    """Check ``(avg w^{r_w})^{1/r_w} <= 2 avg w (1 + tol)`` on every cube of the family.

    ``worst_ratio`` is the largest value of the left side over ``2 avg w``.
    """
    _check_grid(w, cubes)
    rw = sharp_rh_exponent(w.grid.n, class_kind, char_value, p)
    v = w.values
    vr = v**rw
    est = _sup(cubes, lambda a, b: cube_mean(vr, a, b) ** (1 / rw) / (2 * cube_mean(v, a, b)))
    return SharpRHReport(est.value <= 1 + tol, rw, est.value, est.argmax_cube, tol)


# one-dimensional interval oracles for |x|^a ------------------------------------


def _antideriv(b: float, x):
    return np.sign(x) * np.abs(x) ** (b + 1) / (b + 1)


def interval_mean(b: float, c, d):
    """Exact average of ``|x|^b`` over ``[c, d]`` (needs ``b > -1``); vectorized in ``c`` and ``d``."""
    if b <= -1:
        raise DomainError("|x|^b is not integrable at 0 for b <= -1")
    return (_antideriv(b, d) - _antideriv(b, c)) / (d - c)


def _maximize_left_end(fn: Callable[[float], float], grid_points: int = 4001) -> tuple[float, float]:
    # Scale invariance lets every interval be moved to [c, 1] with c in [-1, 1).
    cs = np.linspace(-1.0, 1.0, grid_points)[:-1]
    vals = np.asarray(fn(cs), dtype=float)
    i = int(np.argmax(vals))
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, len(cs) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(lambda c: -float(fn(c)), bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-13})
        if -res.fun > vals[i]:
            return float(-res.fun), float(res.x)
    return float(vals[i]), float(cs[i])


def oracle_Ap_power_1d(a: Number, p: Number) -> tuple[float, float]:
    """``[|x|^a]_{A_p}`` on the line, maximized over intervals; returns ``(value, c)`` for the maximizer ``[c, 1]``."""
    av, pv = float(as_fraction(a)), float(as_fraction(p))
    if pv <= 1:
        raise DomainError("oracle handles p > 1")
    b = -av / (pv - 1)
    return _maximize_left_end(lambda c: interval_mean(av, c, 1.0) * interval_mean(b, c, 1.0) ** (pv - 1))


def oracle_A1_power_1d(a: Number) -> tuple[float, float]:
    """``[|x|^a]_{A_1}`` for ``-1 < a <= 0``: the infimum over ``[c, 1]`` sits at the far end."""
    av = float(as_fraction(a))
    if not -1 < av <= 0:
        raise DomainError("|x|^a is in A_1 only for -1 < a <= 0")
    # |c| <= 1, so the minimum of |x|^a (a <= 0) over [c, 1] is attained at x = 1
    return _maximize_left_end(lambda c: interval_mean(av, c, 1.0))


def oracle_RH_power_1d(a: Number, s: Number) -> tuple[float, float]:
    av, sv = float(as_fraction(a)), float(as_fraction(s))
    return _maximize_left_end(lambda c: interval_mean(av * sv, c, 1.0) ** (1 / sv) / interval_mean(av, c, 1.0))


def centered_Ap_power(a: Number, p: Number) -> float:
    """Value on intervals centered at 0, the same for every radius."""
    av, pv = float(as_fraction(a)), float(as_fraction(p))
    b = -av / (pv - 1)
    return (1 / (av + 1)) * (1 / (b + 1)) ** (pv - 1)


@lru_cache(maxsize=4096)
def characteristic_upper_bound(a: Number, p: Number, margin: float = 0.01) -> Fraction:
    """Rational number at least ``(1 + margin)`` times the interval oracle for ``[|x|^a]_{A_p}`` on the line.

    ``p = 1`` uses the ``A_1`` oracle; the constant weight returns 1.
    """
    return _char_bound(as_fraction(a), as_fraction(p), margin)


@lru_cache(maxsize=4096)
def _char_bound(av: Fraction, pv: Fraction, margin: float) -> Fraction:
    if av == 0:
        return Fraction(1)
    val = oracle_A1_power_1d(av)[0] if pv == 1 else oracle_Ap_power_1d(av, pv)[0]
    return Fraction(math.ceil(val * (1 + margin) * 10**6), 10**6)


def step_weight(grid: Grid, low: float, high: float, split: float = 0.0) -> SampledWeight:
    """Two-level weight equal to ``high`` where the first coordinate exceeds ``split``."""
    x = grid.mesh()[0]
    return SampledWeight(grid, np.where(x > split, high, low))


def step_char_Ap(low: float, high: float, p: Number) -> float:
    """Exact ``A_p`` characteristic of a two-level half-space step weight.

    Cubes straddling the interface can hold any fraction ``t`` of the high
    level, so the value is a maximum over ``t in [0, 1]``. ``p = 1`` gives
    ``high/low``.
    """
    if not (low > 0 and high > 0):
        raise DomainError("step levels must be positive")
    pv = float(as_fraction(p))
    if pv < 1:
        raise DomainError("need p >= 1")
    R = max(high, low) / min(high, low)
    if pv == 1:
        return R
    b = -1 / (pv - 1)

    def val(t):
        return (t * R + 1 - t) * (t * R**b + 1 - t) ** (pv - 1)

    ts = np.linspace(0.0, 1.0, 2001)
    i = int(np.argmax(val(ts)))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    res = optimize.minimize_scalar(lambda t: -float(val(t)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return max(float(val(ts[i])), float(-res.fun))


def is_stable(values: Iterable[float], factor: float = 1.05) -> bool:
    """True when the last value of a refinement sequence is within ``factor`` of the previous one."""
    vals = list(values)
    return len(vals) >= 2 and vals[-1] <= factor * vals[-2]
