"""Discrete multilinear operators on cell-centered grids.

Kernel operators are translation invariant, so they act through a weight
array ``W[k_1, ..., k_m]`` indexed by cell offsets: the output at cell ``x`` is
``sum_k W(k) prod_i f_i[x - k_i]``. The one-slot case is a direct (non-FFT)
convolution; more slots recurse over the offsets of the first slot. Data
outside the box is zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import signal
from scipy.special import gamma as gamma_fn

from .exponents import DomainError
from .numerics import CubeFamily, Grid, GridMismatch, cube_mean


@dataclass(frozen=True, eq=False)
class SampledFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if not np.iscomplexobj(v):
            v = v.astype(float)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"values of shape {v.shape} on grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("function samples must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[..., np.ndarray]) -> SampledFunction:
        return cls(grid, np.broadcast_to(fn(*grid.mesh()), grid.shape))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> SampledFunction:
        return cls(grid, np.full(grid.shape, c))

    def __add__(self, other: SampledFunction) -> SampledFunction:
        _same(self.grid, other.grid)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: SampledFunction) -> SampledFunction:
        _same(self.grid, other.grid)
        return SampledFunction(self.grid, self.values - other.values)

    def __mul__(self, other: SampledFunction | float) -> SampledFunction:
        if isinstance(other, SampledFunction):
            _same(self.grid, other.grid)
            return SampledFunction(self.grid, self.values * other.values)
        return SampledFunction(self.grid, self.values * other)

    __rmul__ = __mul__

    def norm(self, p: float, weight: np.ndarray | None = None) -> float:
        """``(sum |f|^p w h^n)^{1/p}`` by the midpoint rule; ``p = inf`` gives the max."""
        a = np.abs(self.values)
        if math.isinf(p):
            return float(a.max())
        w = 1.0 if weight is None else weight
        return float(np.sum(a**p * w) * self.grid.cell_volume) ** (1 / p)


def _same(g1: Grid, g2: Grid) -> None:
    if g1 != g2:
        raise GridMismatch("functions live on different grids")


def _shared(fvec: Sequence[SampledFunction]) -> Grid:
    if not fvec:
        raise DomainError("no input functions")
    g = fvec[0].grid
    for f in fvec[1:]:
        _same(g, f.grid)
    return g


class Operator:
    """An ``m``-linear (or sublinear) map of sampled functions on one grid."""

    m: int
    grid: Grid
    linear: bool = True

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        raise NotImplementedError

    def __call__(self, *fvec: SampledFunction) -> SampledFunction:
        if len(fvec) != self.m:
            raise DomainError(f"operator takes {self.m} functions, got {len(fvec)}")
        if _shared(fvec) != self.grid:
            raise GridMismatch("input grid differs from the operator grid")
        return self.apply(fvec)


# kernel quadrature ---------------------------------------------------------------


def offsets(grid: Grid) -> np.ndarray:
    """Cell offsets ``-(N-1)..(N-1)`` along one axis."""
    return np.arange(-(grid.cells - 1), grid.cells)


def offset_mesh(grid: Grid, m: int) -> list[np.ndarray]:
    """Physical offset coordinates for the ``n m`` axes of a weight array, slot-major."""
    k = offsets(grid) * grid.h
    return list(np.meshgrid(*([k] * (grid.n * m)), indexing="ij"))


def _slot_norms(coords: list[np.ndarray], n: int, m: int) -> list[np.ndarray]:
    return [np.sqrt(sum(coords[i * n + j] ** 2 for j in range(n))) for i in range(m)]


def _convolve_slot(f: np.ndarray, W: np.ndarray) -> np.ndarray:
    N = f.shape[0]
    full = signal.convolve(f, W, mode="full", method="direct")
    return full[tuple(slice(N - 1, 2 * N - 1) for _ in range(f.ndim))]


def _shift(f: np.ndarray, k: Sequence[int]) -> np.ndarray:
    """``g[x] = f[x - k]`` with zero fill."""
    out = np.zeros_like(f)
    src, dst = [], []
    N = f.shape[0]
    for kk in k:
        if kk >= 0:
            dst.append(slice(kk, N))
            src.append(slice(0, N - kk))
        else:
            dst.append(slice(0, N + kk))
            src.append(slice(-kk, N))
    out[tuple(dst)] = f[tuple(src)]
    return out


def apply_weight_array(W: np.ndarray, fs: Sequence[np.ndarray]) -> np.ndarray:
    """``out[x] = sum_k W[k] prod_i f_i[x - k_i]`` with a fixed summation order."""
    n = fs[0].ndim
    if len(fs) == 1:
        return _convolve_slot(fs[0], W)
    N = fs[0].shape[0]
    dtype = np.result_type(W, *fs)
    out = np.zeros(fs[0].shape, dtype=dtype)
    for idx in itertools.product(range(2 * N - 1), repeat=n):
        sub = W[idx]
        if not np.any(sub):
            continue
        rest = apply_weight_array(sub, fs[1:])
        out += _shift(fs[0], [i - (N - 1) for i in idx]) * rest
    return out


def singular_cell_integral(D: int, alpha: float, h: float) -> float:
    """``int |y|^{alpha - D}`` over the ball in ``R^D`` whose volume equals ``h^D``."""
    vol_unit = math.pi ** (D / 2) / gamma_fn(D / 2 + 1)
    R = h / vol_unit ** (1 / D)
    surface = 2 * math.pi ** (D / 2) / gamma_fn(D / 2)
    return surface * R**alpha / alpha


class KernelOperator(Operator):
    """Operator given by a precomputed offset weight array."""

    def __init__(self, grid: Grid, m: int, weights: np.ndarray, name: str):
        self.grid, self.m, self.weights, self.name = grid, m, weights, name

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return SampledFunction(self.grid, apply_weight_array(self.weights, [f.values for f in fvec]))


def fractional_weights(grid: Grid, alpha: float, m: int) -> np.ndarray:
    D = m * grid.n
    if not 0 < alpha < D:
        raise DomainError(f"need 0 < alpha < mn = {D}, got {alpha}")
    coords = offset_mesh(grid, m)
    r = np.sqrt(sum(c * c for c in coords))
    with np.errstate(divide="ignore"):
        W = grid.h**D * r ** (alpha - D)
    center = (grid.cells - 1,) * D
    W[center] = singular_cell_integral(D, alpha, grid.h)
    return W


def apply_fractional(alpha: float, fvec: Sequence[SampledFunction]) -> SampledFunction:
    """``sum_y prod f_i(x - y_i) / |(y_1, ..., y_m)|^{mn - alpha}`` with the exact local integral at ``y = 0``."""
    return fractional_operator(_shared(fvec), alpha, len(fvec))(*fvec)


def fractional_operator(grid: Grid, alpha: float, m: int) -> KernelOperator:
    return KernelOperator(grid, m, fractional_weights(grid, alpha, m), f"I_{alpha}")


Omega = Callable[[np.ndarray], np.ndarray]


def _omega_on_grid(omega: Omega, coords: Sequence[np.ndarray], norm: np.ndarray, n: int, mean: float) -> np.ndarray:
    # evaluate the degree-zero function at unit vectors; the origin gets its spherical mean
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.stack([c / norm for c in coords], axis=-1)
    unit = np.where(norm[..., None] > 0, unit, 1.0)
    vals = np.asarray(omega(unit), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise DomainError("Omega samples must be bounded")
    return np.where(norm > 0, vals, mean)


def spherical_mean(omega: Omega, n: int, samples: int = 4096) -> float:
    if n == 1:
        return float(np.mean(omega(np.array([[1.0], [-1.0]]))))
    if n == 2:
        t = 2 * np.pi * (np.arange(samples) + 0.5) / samples
        return float(np.mean(omega(np.stack([np.cos(t), np.sin(t)], axis=-1))))
    rng = np.random.default_rng(0)
    x = rng.normal(size=(samples, n))
    return float(np.mean(omega(x / np.linalg.norm(x, axis=1, keepdims=True))))


def homogeneous_weights(grid: Grid, alpha: float, omegas: Sequence[Omega]) -> np.ndarray:
    m, n = len(omegas), grid.n
    W = fractional_weights(grid, alpha, m)
    coords = offset_mesh(grid, m)
    norms = _slot_norms(coords, n, m)
    for i, om in enumerate(omegas):
        W = W * _omega_on_grid(om, coords[i * n:(i + 1) * n], norms[i], n, spherical_mean(om, n))
    return W


def homogeneous_operator(grid: Grid, alpha: float, omegas: Sequence[Omega]) -> KernelOperator:
    return KernelOperator(grid, len(omegas), homogeneous_weights(grid, alpha, omegas), f"I_Omega,{alpha}")


def apply_homogeneous(alpha: float, omegas: Sequence[Omega], fvec: Sequence[SampledFunction]) -> SampledFunction:
    """Fractional integral with the factor ``prod Omega_i(x - y_i)``; ``Omega_i(0)`` is the spherical mean."""
    return homogeneous_operator(_shared(fvec), alpha, omegas)(*fvec)


def homogeneous_kernel(alpha: float, omegas: Sequence[Omega], n: int) -> Callable[[np.ndarray, Sequence[np.ndarray]], float]:
    """Pointwise kernel ``K(x, y) = prod Omega_i(x - y_i) / |(x - y_i)_i|^{mn - alpha}``."""
    m = len(omegas)

    def K(x: np.ndarray, ys: Sequence[np.ndarray]) -> float:
        diffs = [np.atleast_1d(np.asarray(x, float) - np.asarray(y, float)) for y in ys]
        r = math.sqrt(sum(float(d @ d) for d in diffs))
        val = r ** (alpha - m * n)
        for om, d in zip(omegas, diffs):
            val *= float(om((d / np.linalg.norm(d))[None, :])[0])
        return val

    return K


# Calderón–Zygmund kernels -----------------------------------------------------------


@dataclass(frozen=True)
class ModulusOfContinuity:
    """``omega`` tabulated at log-spaced nodes in ``(0, 1]``."""

    t: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        t, v = np.asarray(self.t, float), np.asarray(self.values, float)
        if t.shape != v.shape or t.ndim != 1 or len(t) < 2:
            raise DomainError("modulus table must be two 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > 1:
            raise DomainError("nodes must increase within (0, 1]")
        if np.any(v < 0) or np.any(np.diff(v) < -1e-15 * np.maximum(1, np.abs(v[1:]))):
            raise DomainError("a modulus of continuity is nonnegative and nondecreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], nodes: int = 256, t_min: float = 1e-12) -> ModulusOfContinuity:
        t = np.logspace(math.log10(t_min), 0.0, nodes)
        return cls(t, np.broadcast_to(np.asarray(fn(t), float), t.shape).copy())

    def __call__(self, s: np.ndarray | float) -> np.ndarray:
        s = np.asarray(s, float)
        return np.interp(np.log(np.maximum(s, self.t[0])), np.log(self.t), self.values) * (s > 0)

    def subadditive(self, rtol: float = 1e-9) -> bool:
        """``omega(s + t) <= omega(s) + omega(t)`` for all node pairs with ``s + t <= 1``."""
        s, t = np.meshgrid(self.t, self.t, indexing="ij")
        mask = s + t <= 1
        lhs = self(np.where(mask, s + t, 1.0))
        rhs = self(s) + self(t)
        return bool(np.all(~mask | (lhs <= rhs * (1 + rtol) + 1e-300)))

    @property
    def dini_norm(self) -> float:
        return dini_check(self).dini_norm


@dataclass(frozen=True)
class DiniReport:
    dini_norm: float
    divergent: bool
    decade_ratio: float
    tail_estimate: float

    def as_dict(self) -> dict:
        return {"dini_norm": self.dini_norm, "divergent": self.divergent,
                "decade_ratio": self.decade_ratio, "tail_estimate": self.tail_estimate}


def dini_check(omega: ModulusOfContinuity, ratio_threshold: float = 0.9) -> DiniReport:
    """Trapezoid rule for ``int omega(t) dt/t`` in the variable ``log t`` with a Cauchy-type tail test.

    The contributions of the two lowest decades are compared; a ratio near 1
    means the partial sums keep growing as the lower limit decreases. If the
    ratio ``q`` is below the threshold, the missing part below the first node
    is estimated geometrically as ``q/(1-q)`` times the lowest decade.
    """
    u = np.log(omega.t)
    v = omega.values
    total = float(np.trapezoid(v, u))

    def decade(lo: float, hi: float) -> float:
        uu = np.linspace(lo, hi, 65)
        return float(np.trapezoid(omega(np.exp(uu)), uu))

    u0 = u[0]
    d1 = decade(u0, u0 + math.log(10))
    d2 = decade(u0 + math.log(10), u0 + 2 * math.log(10))
    if d2 == 0:
        return DiniReport(total, False, 0.0, 0.0)
    q = d1 / d2
    divergent = q >= ratio_threshold
    tail = math.inf if divergent else d1 * q / (1 - q)
    return DiniReport(total, divergent, q, tail)


@dataclass(frozen=True)
class CZKernel:
    """Translation-invariant ``K(x, y) = k(x - y_1, ..., x - y_m)`` with size constant ``A``.

    ``fn`` receives ``m n`` coordinate arrays (slot-major) and returns kernel
    values; points where the kernel is undefined must be excluded by the caller.
    """

    fn: Callable[..., np.ndarray]
    m: int
    n: int
    size_constant: float
    omega: ModulusOfContinuity | None = None
    name: str = "cz"


def heaviside_half(t: np.ndarray) -> np.ndarray:
    return np.where(t > 0, 1.0, np.where(t < 0, 0.0, 0.5))


def calderon_kernel(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``(e(z) - e(z - y)) / y^2`` with ``e(0) = 1/2``, which keeps the kernel exactly odd."""
    y = np.asarray(y, float)
    z = np.asarray(z, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y != 0, (heaviside_half(z) - heaviside_half(z - y)) / (y * y), 0.0)


def calderon1() -> CZKernel:
    """Kernel of the first-order Calderón commutator in the form ``C(f, a)``; ``|K| (|y| + |z|)^2 <= 4``."""
    return CZKernel(calderon_kernel, m=2, n=1, size_constant=4.0,
                    omega=ModulusOfContinuity.from_function(lambda t: np.minimum(1.0, 8 * t)), name="calderon1")


def size_audit(kernel: CZKernel, points: np.ndarray) -> tuple[int, float]:
    """Count of violations of ``|K| (sum |y_j|)^{mn} <= A`` at the given ``(N, m n)`` points and the max ratio."""
    pts = np.atleast_2d(np.asarray(points, float))
    vals = kernel.fn(*[pts[:, j] for j in range(pts.shape[1])])
    dist = sum(np.linalg.norm(pts[:, i * kernel.n:(i + 1) * kernel.n], axis=1) for i in range(kernel.m))
    ratio = np.abs(vals) * dist ** (kernel.m * kernel.n) / kernel.size_constant
    return int(np.sum(ratio > 1 + 1e-12)), float(np.max(ratio)) if len(ratio) else 0.0


def truncated_weights(kernel: CZKernel, grid: Grid, delta: float) -> np.ndarray:
    if grid.n != kernel.n:
        raise GridMismatch("kernel and grid dimensions differ")
    if delta < 2 * grid.h * (1 - 1e-12):
        raise DomainError(f"truncation {delta} is below two cell widths ({2 * grid.h})")
    coords = offset_mesh(grid, kernel.m)
    dist = sum(_slot_norms(coords, kernel.n, kernel.m))
    mask = dist > delta
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(mask, kernel.fn(*coords), 0.0)
    bound = kernel.size_constant / np.where(mask, dist, 1.0) ** (kernel.m * kernel.n)
    if np.any(np.abs(vals) > bound * (1 + 1e-12)):
        raise DomainError("kernel violates its size bound on the grid")
    return grid.h ** (kernel.m * kernel.n) * vals


def truncated_operator(kernel: CZKernel, grid: Grid, delta: float) -> KernelOperator:
    return KernelOperator(grid, kernel.m, truncated_weights(kernel, grid, delta), f"{kernel.name}_delta={delta}")


def apply_truncated_cz(kernel: CZKernel, delta: float, fvec: Sequence[SampledFunction]) -> SampledFunction:
    """Quadrature of the kernel over ``sum |x - y_i| > delta``."""
    return truncated_operator(kernel, _shared(fvec), delta)(*fvec)


class MaximalTruncated(Operator):
    """``T_* f = max over delta of |T_delta f|`` on a finite list of truncations (sublinear)."""

    linear = False

    def __init__(self, kernel: CZKernel, grid: Grid, deltas: Sequence[float]):
        self.grid, self.m = grid, kernel.m
        self.ops = [truncated_operator(kernel, grid, d) for d in deltas]

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return SampledFunction(self.grid, np.max(np.stack([np.abs(op.apply(fvec).values) for op in self.ops]), axis=0))


# maximal function and commutators -------------------------------------------------


def _expand(level_vals: np.ndarray, side: int, shift: int, N: int) -> np.ndarray:
    out = np.zeros((N,) * level_vals.ndim)
    k = level_vals.shape[0]
    block = level_vals
    for ax in range(level_vals.ndim):
        block = np.repeat(block, side, axis=ax)
    out[tuple(slice(shift, shift + k * side) for _ in range(level_vals.ndim))] = block
    return out


def multilinear_maximal(fvec: Sequence[SampledFunction], cubes: CubeFamily) -> SampledFunction:
    """At each cell, the max over family cubes containing it of ``prod avg_Q |f_i|``."""
    grid = _shared(fvec)
    if grid != cubes.grid:
        raise GridMismatch("cube family lives on another grid")
    absv = [np.abs(f.values) for f in fvec]
    out = np.zeros(grid.shape)
    for lv in cubes.levels:
        prod = np.ones(1)
        for a in absv:
            prod = prod * cube_mean(a, lv.side, lv.shift)
        out = np.maximum(out, _expand(prod, lv.side, lv.shift, grid.cells))
    return SampledFunction(grid, out)


class MaximalOperator(Operator):
    linear = False

    def __init__(self, cubes: CubeFamily, m: int):
        self.cubes, self.m, self.grid = cubes, m, cubes.grid

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return multilinear_maximal(fvec, self.cubes)


class IdentityOperator(Operator):
    def __init__(self, grid: Grid):
        self.grid, self.m = grid, 1

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return fvec[0]


class ZeroOperator(Operator):
    def __init__(self, grid: Grid, m: int = 1):
        self.grid, self.m = grid, m

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return SampledFunction(self.grid, np.zeros(self.grid.shape))


class ScaledOperator(Operator):
    def __init__(self, op: Operator, c: float):
        self.op, self.c, self.grid, self.m, self.linear = op, c, op.grid, op.m, op.linear

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        return self.op.apply(fvec) * self.c


class SumOperator(Operator):
    def __init__(self, ops: Sequence[Operator]):
        if not ops:
            raise DomainError("empty operator sum")
        self.ops = list(ops)
        self.grid, self.m = ops[0].grid, ops[0].m
        self.linear = all(o.linear for o in ops)

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        out = self.ops[0].apply(fvec)
        for o in self.ops[1:]:
            out = out + o.apply(fvec)
        return out


class Commutator(Operator):
    """``f -> b T(f) - T(f_1, ..., b f_j, ..., f_m)`` with a 1-based slot ``j``."""

    def __init__(self, T: Operator, b: SampledFunction, j: int):
        if not 1 <= j <= T.m:
            raise DomainError(f"slot {j} out of range 1..{T.m}")
        _same(T.grid, b.grid)
        self.T, self.b, self.j = T, b, j
        self.grid, self.m, self.linear = T.grid, T.m, T.linear

    def apply(self, fvec: Sequence[SampledFunction]) -> SampledFunction:
        moved = list(fvec)
        moved[self.j - 1] = self.b * fvec[self.j - 1]
        return self.b * self.T.apply(fvec) - self.T.apply(moved)


def commutator(T: Operator, b: SampledFunction, j: int) -> Commutator:
    return Commutator(T, b, j)


def commutator_multi(T: Operator, bvec: Sequence[SampledFunction], alpha: Sequence[int]) -> Operator:
    """Iterated commutator: ``alpha_i`` times in slot ``i`` (1-based slots, slot 1 first)."""
    if len(alpha) != T.m or len(bvec) != T.m:
        raise DomainError("multi-index and symbol list need length m")
    if any(a < 0 for a in alpha):
        raise DomainError("multi-index entries must be nonnegative")
    out = T
    for i, (a, b) in enumerate(zip(alpha, bvec)):
        for _ in range(a):
            out = Commutator(out, b, i + 1)
    return out


def fractional_oracle_indicator(x: np.ndarray, alpha: float) -> np.ndarray:
    """``int_0^1 |x - y|^{alpha - 1} dy`` in closed form."""
    x = np.asarray(x, float)
    a = np.abs(x) ** alpha
    b = np.abs(x - 1) ** alpha
    return np.where(x >= 1, a - b, np.where(x <= 0, b - a, a + b)) / alpha
