"""Fiber-domain model of finitely generated shift-invariant spaces.

A function of the space is represented only by its fibers on a finite
torus grid {t/M : t in {0..M-1}^d}; each fiber is truncated to the window
{k in Z^d : |k|_inf <= N}.  Almost-everywhere statements become exact
statements over the grid points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import GridMismatch, VectorOutsideSubspace
from .finite import FrameBounds, frame_bounds_oracle

FIBER_TOL = 1e-8


@dataclass(frozen=True)
class OmegaGrid:
    dim: int = 1
    points_per_axis: int = 256

    def __post_init__(self):
        if self.dim < 1 or self.points_per_axis < 1:
            raise ValueError("grid needs dim >= 1 and points_per_axis >= 1")

    @cached_property
    def points(self) -> np.ndarray:
        m = self.points_per_axis
        ts = itertools.product(range(m), repeat=self.dim)
        return np.array(list(ts), dtype=float).reshape(-1, self.dim) / m

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim


@dataclass(frozen=True)
class FiberWindow:
    radius: int = 4
    dim: int = 1

    @cached_property
    def indices(self) -> np.ndarray:
        r = range(-self.radius, self.radius + 1)
        return np.array(list(itertools.product(r, repeat=self.dim)), dtype=int).reshape(-1, self.dim)

    @property
    def size(self) -> int:
        return (2 * self.radius + 1) ** self.dim


@dataclass(frozen=True, eq=False)
class FiberField:
    """Per-grid-point fiber vectors, ``values`` of shape (grid.size, window.size)."""

    grid: OmegaGrid
    window: FiberWindow
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size, self.window.size):
            raise ValueError(f"fiber values have shape {v.shape}, expected {(self.grid.size, self.window.size)}")
        linalg.check_finite(v)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: OmegaGrid, window: FiberWindow, vector) -> "FiberField":
        vec = np.asarray(vector, dtype=complex).ravel()
        return cls(grid, window, np.tile(vec, (grid.size, 1)))

    @classmethod
    def zeros(cls, grid: OmegaGrid, window: FiberWindow) -> "FiberField":
        return cls(grid, window, np.zeros((grid.size, window.size), dtype=complex))


def check_same_grid(*objs) -> None:
    if not objs:
        return
    g, w = objs[0].grid, objs[0].window
    for o in objs[1:]:
        if o.grid != g or o.window != w:
            raise GridMismatch("fields live on different grids or windows")


@dataclass(frozen=True, eq=False)
class RangeFunctionField:
    """Orthonormal basis of the fiber space J(omega) at every grid point."""

    grid: OmegaGrid
    window: FiberWindow
    bases: tuple = field(repr=False)

    @cached_property
    def dims(self) -> np.ndarray:
        return np.array([b.shape[1] for b in self.bases], dtype=int)

    def projector(self, idx: int) -> np.ndarray:
        return linalg.projector(self.bases[idx])

    @classmethod
    def full(cls, grid: OmegaGrid, window: FiberWindow) -> "RangeFunctionField":
        eye = np.eye(window.size, dtype=complex)
        return cls(grid, window, tuple(eye for _ in range(grid.size)))


def range_function_from_generators(generators, rank_tol: float = linalg.RANK_TOL,
                                   grid: OmegaGrid | None = None,
                                   window: FiberWindow | None = None) -> RangeFunctionField:
    """J(omega) = span of the generator fibers at omega."""
    gens = list(generators)
    check_same_grid(*gens)
    if gens:
        grid, window = gens[0].grid, gens[0].window
    elif grid is None or window is None:
        raise ValueError("need grid and window when there are no generators")
    n = window.size
    if not gens:
        return RangeFunctionField(grid, window, tuple(np.zeros((n, 0), complex) for _ in range(grid.size)))
    stacked = np.stack([g.values for g in gens], axis=2)  # (points, n, gens)
    bases = tuple(linalg.orthonormal_span(stacked[p], rank_tol)[0] for p in range(grid.size))
    return RangeFunctionField(grid, window, bases)


def spectrum_and_length(J: RangeFunctionField) -> tuple[np.ndarray, int]:
    """Indices of grid points with dim J > 0, and the maximal dimension."""
    dims = J.dims
    return np.flatnonzero(dims > 0), int(dims.max()) if len(dims) else 0


def helson_project(f: FiberField, J: RangeFunctionField) -> FiberField:
    check_same_grid(f, J)
    out = np.empty_like(f.values)
    for p, q in enumerate(J.bases):
        out[p] = q @ (q.conj().T @ f.values[p])
    return FiberField(f.grid, f.window, out)


def apply_translation(f: FiberField, k) -> FiberField:
    """Fibers of the integer translate T_k f: multiplication by exp(-2 pi i <omega, k>)."""
    k = np.asarray(k, dtype=float).ravel()
    if k.shape[0] != f.grid.dim:
        raise ValueError("translation has the wrong dimension")
    phase = np.exp(-2j * np.pi * (f.grid.points @ k))
    return FiberField(f.grid, f.window, f.values * phase[:, None])


@dataclass(frozen=True)
class UniformFrameReport:
    """Uniform (grid-wide) frame bounds of a fiber system in J."""

    bounds: FrameBounds
    per_omega: np.ndarray = field(repr=False)  # (points, 2): A(omega), B(omega); NaN off-spectrum
    spectrum_size: int

    @property
    def is_frame_generator(self) -> bool:
        return self.bounds.is_frame


def uniform_frame_check(system, J: RangeFunctionField, rank_tol: float = linalg.RANK_TOL,
                        fiber_tol: float = FIBER_TOL) -> UniformFrameReport:
    """Per-point oracle bounds of the system in J(omega), reduced by min/max
    over the points where dim J(omega) > 0."""
    system = list(system)
    check_same_grid(J, *system)
    npts = J.grid.size
    per = np.full((npts, 2), np.nan)
    stacked = np.stack([s.values for s in system], axis=2) if system else None
    lows, ups, ok, count = [], [], True, 0
    for p, q in enumerate(J.bases):
        if q.shape[1] == 0:
            continue
        count += 1
        if stacked is None:
            fb = FrameBounds(0.0, 0.0, False)
        else:
            try:
                fb = frame_bounds_oracle(stacked[p], q, rank_tol, subspace_tol=fiber_tol)
            except VectorOutsideSubspace as exc:
                raise VectorOutsideSubspace(f"grid point {p}: {exc}") from None
        per[p] = fb.lower, fb.upper
        lows.append(fb.lower)
        ups.append(fb.upper)
        ok = ok and fb.is_frame
    if count == 0:
        bounds = FrameBounds(0.0, 0.0, False)
    else:
        a = min(lows) if ok else 0.0
        bounds = FrameBounds(a, max(ups), ok and a > 0)
    return UniformFrameReport(bounds, per, count)
