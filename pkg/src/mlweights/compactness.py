"""Fréchet–Kolmogorov diagnostics on grid data.

The three compactness functionals (uniform bound, tails, translation or
averaging moduli) are evaluated over the image of a finite input family. A
finite scan cannot certify compactness; the reports record curves whose decay,
or lack of it, is the observable signature.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exponents import DomainError
from .numerics import Grid, GridMismatch, SampledWeight
from .operators import Commutator, Operator, SampledFunction, SumOperator
from .power_weights import PowerWeight


def weighted_norm(values: np.ndarray, p: float, w: np.ndarray | float, grid: Grid) -> float:
    """``(sum |f|^p w h^n)^{1/p}``, the midpoint rule for ``||f||_{L^p(w)}``."""
    if p <= 0:
        raise DomainError("p must be positive")
    a = np.abs(values)
    return float(np.sum(a**p * w) * grid.cell_volume) ** (1 / p)


def _weight_array(w: SampledWeight | np.ndarray | PowerWeight | None, grid: Grid) -> np.ndarray | float:
    if w is None:
        return 1.0
    if isinstance(w, SampledWeight):
        if w.grid != grid:
            raise GridMismatch("weight lives on another grid")
        return w.values
    if isinstance(w, PowerWeight):
        return SampledWeight.from_power(grid, w).values
    arr = np.asarray(w, float)
    if arr.shape != grid.shape:
        raise GridMismatch("weight array shape differs from the grid")
    return arr


def shift_cells(values: np.ndarray, k: Sequence[int]) -> np.ndarray:
    """``g[x] = f[x + k]`` (translation by ``k`` cells) with zero fill outside the box."""
    out = np.zeros_like(values)
    N = values.shape[0]
    src, dst = [], []
    for kk in k:
        if kk >= 0:
            src.append(slice(kk, N))
            dst.append(slice(0, N - kk))
        else:
            src.append(slice(0, N + kk))
            dst.append(slice(-kk, N))
    out[tuple(dst)] = values[tuple(src)]
    return out


def cells_for(length: float, grid: Grid, what: str = "translation") -> int:
    k = length / grid.h
    kr = int(round(k))
    if abs(k - kr) > 1e-9 * max(1.0, abs(k)):
        raise DomainError(f"{what} {length} is not a whole number of cells (cell width {grid.h})")
    return kr


def ball_offsets(grid: Grid, r: float) -> list[tuple[int, ...]]:
    """Offsets of cells lying entirely inside the ball of radius ``r`` about a cell center."""
    if r < grid.h * (1 - 1e-12):
        raise DomainError(f"radius {r} is below the cell width {grid.h}")
    kmax = int(math.floor(r / grid.h))
    rng = range(-kmax, kmax + 1)
    out = []
    for k in np.array(np.meshgrid(*([list(rng)] * grid.n), indexing="ij")).reshape(grid.n, -1).T:
        far = math.sqrt(sum((abs(int(x)) + 0.5) ** 2 for x in k)) * grid.h
        if far <= r * (1 + 1e-12):
            out.append(tuple(int(x) for x in k))
    return out


def ball_average(values: np.ndarray, grid: Grid, r: float) -> np.ndarray:
    offs = ball_offsets(grid, r)
    acc = np.zeros_like(values, dtype=np.result_type(values, float))
    for k in offs:
        acc = acc + shift_cells(values, k)
    return acc / len(offs)


@dataclass(frozen=True)
class InputFamily:
    """Tuples of grid functions, each scaled to unit product of source norms."""

    grid: Grid
    members: tuple[tuple[SampledFunction, ...], ...]
    tags: tuple[str, ...]
    p: tuple[float, ...]
    weights: tuple[np.ndarray | float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if len(self.members) != len(self.tags):
            raise DomainError("one tag per member")
        for mem in self.members:
            if len(mem) != len(self.p):
                raise DomainError("member arity differs from the number of source exponents")
            for f in mem:
                if f.grid != self.grid:
                    raise GridMismatch("member on another grid")

    @property
    def m(self) -> int:
        return len(self.p)

    def product_norm(self, i: int) -> float:
        ws = self.weights or (1.0,) * self.m
        return math.prod(weighted_norm(f.values, p, w, self.grid) for f, p, w in zip(self.members[i], self.p, ws))

    @classmethod
    def build(
        cls,
        grid: Grid,
        slots: Sequence[Sequence[np.ndarray]],
        tags: Sequence[str],
        p: Sequence[float],
        weights: Sequence[SampledWeight | np.ndarray | PowerWeight | None] | None = None,
    ) -> InputFamily:
        """Normalize raw arrays; ``slots[i][j]`` is the array for slot ``j`` of member ``i``."""
        m = len(p)
        ws = tuple(_weight_array(w, grid) for w in (weights or [None] * m))
        members = []
        for arrs in slots:
            fs = []
            for arr, pj, wj in zip(arrs, p, ws):
                nrm = weighted_norm(arr, pj, wj, grid)
                if nrm == 0:
                    raise DomainError("family member with zero norm")
                fs.append(SampledFunction(grid, np.asarray(arr) / nrm))
            members.append(tuple(fs))
        return cls(grid, tuple(members), tuple(tags), tuple(float(x) for x in p), ws)


def bump(x: np.ndarray) -> np.ndarray:
    """The standard ``exp(-1/(1 - |x|^2))`` bump, supported in the unit ball."""
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1 / (1 - x[inside] ** 2))
    return out


def bump_nd(grid: Grid, center: Sequence[float], radius: float) -> np.ndarray:
    r2 = sum((x - c) ** 2 for x, c in zip(grid.mesh(), center)) / radius**2
    out = np.zeros(grid.shape)
    inside = r2 < 1
    out[inside] = np.exp(-1 / (1 - r2[inside]))
    return out


def stress_family(
    grid: Grid, kind: str, count: int = 8, p: float = 2.0, m: int = 1, seed: int = 0,
    weights: Sequence | None = None,
) -> InputFamily:
    """Structured or seeded families: ``translated``, ``dilated``, ``oscillating``, ``random``, ``single``."""
    L = grid.L
    rng = np.random.default_rng(seed)
    arrays: list[np.ndarray] = []
    tags: list[str] = []
    for j in range(count):
        if kind == "single":
            arr = bump_nd(grid, [0.0] * grid.n, L / 4)
        elif kind == "translated":
            c = -L / 2 + L * j / max(count - 1, 1)
            arr = bump_nd(grid, [c] + [0.0] * (grid.n - 1), L / 4)
        elif kind == "dilated":
            arr = bump_nd(grid, [0.0] * grid.n, L / 2 ** (j + 1))
        elif kind == "oscillating":
            arr = bump_nd(grid, [0.0] * grid.n, L / 2) * np.cos(2 * np.pi * (j + 1) * grid.mesh()[0] / L)
        elif kind == "random":
            coeffs = rng.normal(size=4)
            x = grid.mesh()[0] / L
            arr = bump_nd(grid, [0.0] * grid.n, L / 2) * sum(a * np.cos(np.pi * (i + 1) * x) for i, a in enumerate(coeffs))
        else:
            raise DomainError(f"unknown family kind {kind!r}")
        if not np.any(arr):
            raise DomainError("family member vanishes on the grid; refine it")
        arrays.append(arr)
        tags.append(f"{kind}:{j}")
    slots = [[a] * m for a in arrays]
    return InputFamily.build(grid, slots, tags, [p] * m, weights)


@dataclass(frozen=True)
class FKReport:
    uniform_bound: float
    tail_curve: tuple[tuple[float, float], ...]
    translation_curve: tuple[tuple[float, float], ...]
    averaging_curve: tuple[tuple[float, float], ...]
    fk3_curve: tuple[tuple[float, float], ...]

    def as_dict(self) -> dict:
        return {
            "uniform_bound": self.uniform_bound,
            "tail_curve": [list(x) for x in self.tail_curve],
            "translation_curve": [list(x) for x in self.translation_curve],
            "averaging_curve": [list(x) for x in self.averaging_curve],
            "fk3_curve": [list(x) for x in self.fk3_curve],
        }

    def curve_rows(self) -> list[dict]:
        rows = []
        for name in ("tail_curve", "translation_curve", "averaging_curve", "fk3_curve"):
            for x, v in getattr(self, name):
                rows.append({"curve": name, "parameter": x, "value": v})
        return rows


def tail_value(g: np.ndarray, grid: Grid, p: float, w: np.ndarray | float, A: float) -> float:
    return weighted_norm(g * (grid.radius() > A), p, w, grid)


def translation_value(g: np.ndarray, grid: Grid, p: float, w: np.ndarray | float, h: float) -> float:
    """Largest ``||tau_h g - g||`` over the ``2n`` coordinate directions."""
    k = cells_for(h, grid)
    best = 0.0
    for axis in range(grid.n):
        for sgn in (1, -1):
            vec = [0] * grid.n
            vec[axis] = sgn * k
            best = max(best, weighted_norm(shift_cells(g, vec) - g, p, w, grid))
    return best


def averaging_value(g: np.ndarray, grid: Grid, p: float, w: np.ndarray | float, r: float) -> float:
    return weighted_norm(g - ball_average(g, grid, r), p, w, grid)


def fk3_integrand(g: np.ndarray, grid: Grid, p: float, p0: float, r: float) -> np.ndarray:
    """``(avg_{y in B(0,r)} |g(x) - g(x+y)|^{p/p0})^{p0}`` at every cell."""
    offs = ball_offsets(grid, r)
    a = p / p0
    acc = np.zeros(grid.shape)
    for k in offs:
        acc += np.abs(g - shift_cells(g, k)) ** a
    return (acc / len(offs)) ** p0


def fk3_value(g: np.ndarray, grid: Grid, p: float, p0: float, w: np.ndarray | float, r: float) -> float:
    return float(np.sum(fk3_integrand(g, grid, p, p0, r) * w) * grid.cell_volume)


def _images(op: Operator, family: InputFamily, jobs: int = 1) -> list[np.ndarray]:
    if op.grid != family.grid:
        raise GridMismatch("operator and family live on different grids")
    run = lambda mem: op(*mem).values  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run, family.members))
    return [run(mem) for mem in family.members]


def _sup_curve(images: Sequence[np.ndarray], grid_vals: Sequence[float], fn: Callable[[np.ndarray, float], float]) -> tuple[tuple[float, float], ...]:
    return tuple((float(x), max((fn(g, x) for g in images), default=0.0)) for x in grid_vals)


def fk_scan(
    op: Operator,
    family: InputFamily,
    w: SampledWeight | np.ndarray | PowerWeight | None,
    p: float,
    A_grid: Sequence[float],
    h_grid: Sequence[float],
    r_grid: Sequence[float] = (),
    p0: float | None = None,
    jobs: int = 1,
) -> FKReport:
    """All compactness curves over ``{T(f) : f in family}``; the fk3 curve needs ``p0``."""
    grid = family.grid
    wa = _weight_array(w, grid)
    for h in h_grid:
        cells_for(h, grid)
    images = _images(op, family, jobs)
    bound = max((weighted_norm(g, p, wa, grid) for g in images), default=0.0)
    tail = _sup_curve(images, sorted(A_grid), lambda g, A: tail_value(g, grid, p, wa, A))
    trans = _sup_curve(images, h_grid, lambda g, h: translation_value(g, grid, p, wa, h))
    avg = _sup_curve(images, r_grid, lambda g, r: averaging_value(g, grid, p, wa, r))
    fk3 = _sup_curve(images, r_grid, lambda g, r: fk3_value(g, grid, p, p0, wa, r)) if p0 else ()
    return FKReport(bound, tail, trans, avg, fk3)


def fk_average_scan(
    images: Sequence[SampledFunction], w: SampledWeight | np.ndarray | PowerWeight | None, p: float, r_grid: Sequence[float]
) -> tuple[tuple[float, float], ...]:
    """``sup_f ||f - f_{B(.,r)}||_{L^p(w)}`` for each ``r``; ``w in A_p`` is the caller's responsibility."""
    if not images:
        return tuple((float(r), 0.0) for r in r_grid)
    grid = images[0].grid
    wa = _weight_array(w, grid)
    return _sup_curve([f.values for f in images], r_grid, lambda g, r: averaging_value(g, grid, p, wa, r))


@dataclass(frozen=True)
class FK3Result:
    curve: tuple[tuple[float, float], ...]
    domination_ok: bool
    worst_excess: float
    mode: str

    def as_dict(self) -> dict:
        return {"curve": [list(x) for x in self.curve], "domination_ok": self.domination_ok,
                "worst_excess": self.worst_excess, "mode": self.mode}


def domination_excess(g: np.ndarray, grid: Grid, p: float, p0: float, r: float) -> float:
    """Largest cellwise excess of the left side over the right side in the averaging domination.

    ``p >= p0``: ``|g - g_B| <= (avg |g(x) - g(x+y)|^{p/p0})^{p0/p}``.
    ``p < p0``: ``||g|^a - (|g|^a)_B| <= avg |g(x) - g(x+y)|^a`` with ``a = p/p0``.
    """
    a = p / p0
    offs = ball_offsets(grid, r)
    acc = np.zeros(grid.shape)
    for k in offs:
        acc += np.abs(g - shift_cells(g, k)) ** a
    mean_diff = acc / len(offs)
    if p >= p0:
        lhs = np.abs(g - ball_average(g, grid, r))
        rhs = mean_diff ** (1 / a)
    else:
        ga = np.abs(g) ** a
        lhs = np.abs(ga - ball_average(ga, grid, r))
        rhs = mean_diff
    return float(np.max(lhs - rhs * (1 + 1e-12) - 1e-14))


def fk_fractional_scan(
    images: Sequence[SampledFunction],
    w: SampledWeight | np.ndarray | PowerWeight | None,
    p: float,
    p0: float,
    r_grid: Sequence[float],
) -> FK3Result:
    """Fractional averaged translation functional with the cellwise domination cross-check."""
    if not p > 0 or not p0 > 1:
        raise DomainError("need p > 0 and p0 > 1")
    if not images:
        return FK3Result(tuple((float(r), 0.0) for r in r_grid), True, 0.0, "empty")
    grid = images[0].grid
    wa = _weight_array(w, grid)
    gs = [f.values for f in images]
    curve = _sup_curve(gs, r_grid, lambda g, r: fk3_value(g, grid, p, p0, wa, r))
    worst = max(domination_excess(g, grid, p, p0, r) for g in gs for r in r_grid)
    return FK3Result(curve, worst <= 0, worst, "jensen" if p >= p0 else "power")


# counterexamples -------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    levels: tuple[int, ...]
    values: tuple[float, ...]
    factors: tuple[float, ...]
    criterion_met: bool
    consecutive_doublings: int
    fitted_rate: float
    theory_rate: float | None
    control_values: tuple[float, ...]
    control_spread: float
    control_bounded: bool

    def as_dict(self) -> dict:
        return {
            "levels": list(self.levels), "values": list(self.values), "factors": list(self.factors),
            "criterion_met": self.criterion_met, "consecutive_doublings": self.consecutive_doublings,
            "fitted_rate": self.fitted_rate, "theory_rate": self.theory_rate,
            "control_values": list(self.control_values), "control_spread": self.control_spread,
            "control_bounded": self.control_bounded,
        }


def translation_integral(fvals: np.ndarray, grid: Grid, w: np.ndarray, h: float, p: float) -> float:
    k = cells_for(h, grid)
    return float(np.sum(np.abs(shift_cells(fvals, [k] + [0] * (grid.n - 1)) - fvals) ** p * w) * grid.cell_volume)


def _growth(
    f: Callable[[np.ndarray], np.ndarray],
    w: Callable[[np.ndarray], np.ndarray],
    control: Callable[[np.ndarray], np.ndarray],
    p: float,
    h: float,
    L: float,
    levels: Sequence[int],
    burn_in: int,
    factor: float,
    needed: int,
    theory_rate: float | None,
) -> GrowthReport:
    vals, ctrl = [], []
    for lev in levels:
        g = Grid(1, L, 2**lev)
        x = g.axis()
        wx = w(x)
        vals.append(translation_integral(f(x), g, wx, h, p))
        ctrl.append(translation_integral(control(x), g, wx, h, p))
    factors = [b / a for a, b in zip(vals, vals[1:])]
    run = best = 0
    for lev, fac in zip(levels[1:], factors):
        if lev > burn_in and fac >= factor:
            run += 1
            best = max(best, run)
        elif lev > burn_in:
            run = 0
    tail = min(4, len(vals))
    slope = float(np.polyfit(np.log(2.0) * np.array(levels[-tail:]), np.log(vals[-tail:]), 1)[0]) if tail >= 2 else float("nan")
    spread = (max(ctrl) - min(ctrl)) / max(ctrl) if max(ctrl) > 0 else 0.0
    return GrowthReport(tuple(levels), tuple(vals), tuple(factors), best >= needed, best, slope, theory_rate,
                        tuple(ctrl), spread, spread <= 0.01)


def counterexample_a3(
    levels: Sequence[int] = tuple(range(6, 13)),
    h: float = 0.1,
    L: float = 3.2,
    burn_in: int = 8,
    factor: float = 2.0,
    needed: int = 4,
) -> GrowthReport:
    """``int |f(x+h) - f(x)|^2 |x|^{1/2} dx`` for ``f = |x|^{-3/5}`` under grid refinement.

    The singularity of ``f(x + h)`` at ``x = -h`` is not integrable against the
    nonvanishing weight there, so the discrete sums grow without bound; the
    midpoint sums behave like ``cells^{1/5}``. ``theory_rate`` records that exponent.
    """
    return _growth(
        f=lambda x: np.abs(x) ** -0.6,
        w=lambda x: np.abs(x) ** 0.5,
        control=lambda x: bump(x / 1.5),
        p=2.0, h=h, L=L, levels=levels, burn_in=burn_in, factor=factor, needed=needed,
        theory_rate=2 * 0.6 - 1,
    )


def counterexample_a3_power(
    p0: float = 2.0,
    p: float = 3.0,
    alpha: float = 0.5,
    levels: Sequence[int] = tuple(range(6, 13)),
    h: float = 0.1,
    L: float = 3.2,
    burn_in: int = 8,
    factor: float = 2.0,
    needed: int = 4,
) -> GrowthReport:
    """``w = |x|^{p0-1}``, ``f = |x|^{-alpha} 1_{|x| <= 1}`` with ``1 < p0 < p`` and ``1/p < alpha < p0/p``."""
    if not (1 < p0 < p and 1 / p < alpha < p0 / p):
        raise DomainError("need 1 < p0 < p and 1/p < alpha < p0/p")
    return _growth(
        f=lambda x: np.abs(x) ** -alpha * (np.abs(x) <= 1),
        w=lambda x: np.abs(x) ** (p0 - 1),
        control=lambda x: bump(x / 1.5),
        p=p, h=h, L=L, levels=levels, burn_in=burn_in, factor=factor, needed=needed,
        theory_rate=alpha * p - 1,
    )


@dataclass(frozen=True)
class TranslationReport:
    ratio: float
    sequence: tuple[float, ...]
    bounded: bool

    def as_dict(self) -> dict:
        return {"ratio": self.ratio, "sequence": list(self.sequence), "bounded": self.bounded}


def _max_shift_ratio(values: np.ndarray, grid: Grid, delta: float) -> float:
    kmax = int(math.ceil(delta / grid.h)) - 1
    N = grid.cells
    best = 1.0
    for axis in range(grid.n):
        for k in range(-kmax, kmax + 1):
            if k == 0:
                continue
            a = np.moveaxis(values, axis, 0)
            if k > 0:
                r = a[k:] / a[: N - k]
            else:
                r = a[: N + k] / a[-k:]
            best = max(best, float(np.max(r)))
    return best


def translation_dominated_check(
    w: PowerWeight | SampledWeight,
    delta: float,
    levels: Sequence[int] = tuple(range(6, 13)),
    L: float = 1.0,
) -> TranslationReport:
    """Sup of ``w(x + h)/w(x)`` over cells and whole-cell shifts ``|h| < delta``.

    A sampled weight gives one number. A power weight is sampled on a sequence
    of refinements so that blow-up near the origin shows as a growing sequence.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    if isinstance(w, SampledWeight):
        r = _max_shift_ratio(w.values, w.grid, delta)
        return TranslationReport(r, (r,), math.isfinite(r))
    seq = []
    for lev in levels:
        g = Grid(w.n, max(L, 2 * delta), 2**lev)
        seq.append(_max_shift_ratio(SampledWeight.from_power(g, w).values, g, delta))
    bounded = len(seq) < 2 or seq[-1] <= seq[-2] * 1.01
    return TranslationReport(seq[-1], tuple(seq), bounded)


@dataclass(frozen=True)
class SeriesReport:
    reports: tuple[FKReport, ...]
    sup_differences: tuple[float, ...]
    ratios: tuple[float, ...]
    max_ratio: float

    def as_dict(self) -> dict:
        return {
            "sup_differences": list(self.sup_differences),
            "ratios": list(self.ratios),
            "max_ratio": self.max_ratio,
            "uniform_bounds": [r.uniform_bound for r in self.reports],
        }


def _curve_gap(a: FKReport, b: FKReport) -> float:
    gap = abs(a.uniform_bound - b.uniform_bound)
    for name in ("tail_curve", "translation_curve", "averaging_curve", "fk3_curve"):
        for (_, x), (_, y) in zip(getattr(a, name), getattr(b, name)):
            gap = max(gap, abs(x - y))
    return gap


def series_compactness_demo(
    ops: Sequence[Operator],
    b: SampledFunction,
    family: InputFamily,
    w: SampledWeight | np.ndarray | PowerWeight | None,
    p: float,
    A_grid: Sequence[float],
    h_grid: Sequence[float],
    slot: int = 1,
) -> SeriesReport:
    """FK curves of ``[b, sum_{j <= N} T_j]`` for ``N = 1..len(ops)`` and the successive sup-differences."""
    reports = []
    for N in range(1, len(ops) + 1):
        T = SumOperator(ops[:N])
        reports.append(fk_scan(Commutator(T, b, slot), family, w, p, A_grid, h_grid))
    diffs = [_curve_gap(x, y) for x, y in zip(reports, reports[1:])]
    ratios = [d2 / d1 if d1 > 0 else 0.0 for d1, d2 in zip(diffs, diffs[1:])]
    return SeriesReport(tuple(reports), tuple(diffs), tuple(ratios), max(ratios, default=0.0))


def is_nonincreasing(curve: Sequence[tuple[float, float]], rtol: float = 1e-12) -> bool:
    vals = [v for _, v in curve]
    return all(b <= a * (1 + rtol) + 1e-300 for a, b in zip(vals, vals[1:]))


def is_nondecreasing(curve: Sequence[tuple[float, float]], rtol: float = 1e-12) -> bool:
    vals = [v for _, v in curve]
    return all(b >= a * (1 - rtol) for a, b in zip(vals, vals[1:]))
