"""Evaluable intensity functions lambda(x, t) with certified positive infima.

The inhomogeneous summary statistics only ever consume the ratio
lambda_bar / lambda(x, t), so intensity fields here carry a certified
infimum alongside pointwise evaluation.  Three concrete kinds cover the
harness: constant, log-linear lambda(x,t) = A * exp(b.x + c*t) (exact
corner infimum/supremum and closed-form integrals), and tabulated grids
(e.g. from the kernel plug-in estimator).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate as _integrate

from .geometry import GridGeometry, PointPattern, SpacetimePoint, Window

__all__ = [
    "IntensityField",
    "ConstantIntensity",
    "LogLinearIntensity",
    "GridIntensity",
    "CustomIntensity",
    "KernelBandwidth",
    "InvalidIntensityError",
    "evaluate",
    "infimum",
    "supremum",
    "integrate",
    "kernel_estimate",
]


class InvalidIntensityError(ValueError):
    """Raised when an intensity field fails the positive-infimum requirement."""


class IntensityField:
    """Base class: vectorized evaluation plus window infimum/supremum/integral."""

    def values(self, space: np.ndarray, time: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def infimum(self, w: Window) -> float:
        raise NotImplementedError

    def supremum(self, w: Window) -> float:
        raise NotImplementedError

    def integral(self, w: Window) -> float:
        """Expected count over w; default adaptive quadrature (d=2 only)."""
        if w.dim != 2:
            raise NotImplementedError("quadrature fallback supports d=2")
        val, _ = _integrate.tplquad(
            lambda t, y, x: float(
                self.values(np.array([[x, y]]), np.array([t]))[0]
            ),
            w.spatial[0, 0],
            w.spatial[0, 1],
            w.spatial[1, 0],
            w.spatial[1, 1],
            w.time[0],
            w.time[1],
            epsrel=1e-8,
        )
        return val

    def scaled(self, c_s: float, c_t: float) -> "IntensityField":
        """Intensity of the coordinate-scaled process (x,t) -> (c_s x, c_t t)."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantIntensity(IntensityField):
    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise InvalidIntensityError("constant intensity must be positive")

    def values(self, space, time):
        time = np.atleast_1d(np.asarray(time, dtype=float))
        return np.full(time.shape, self.value)

    def infimum(self, w):
        return self.value

    def supremum(self, w):
        return self.value

    def integral(self, w):
        return self.value * w.volume

    def scaled(self, c_s, c_t):
        # constant c reweighted by the Jacobian; dimension fixed at use time
        raise NotImplementedError("scale a constant field via LogLinearIntensity")


@dataclass(frozen=True)
class LogLinearIntensity(IntensityField):
    """lambda(x, t) = amplitude * exp(space_slope . x + time_slope * t)."""

    amplitude: float
    space_slope: np.ndarray
    time_slope: float

    def __post_init__(self):
        if self.amplitude <= 0:
            raise InvalidIntensityError("amplitude must be positive")
        object.__setattr__(
            self, "space_slope", np.atleast_1d(np.asarray(self.space_slope, float))
        )

    @property
    def dim(self) -> int:
        return self.space_slope.shape[0]

    def values(self, space, time):
        space = np.atleast_2d(np.asarray(space, dtype=float))
        time = np.atleast_1d(np.asarray(time, dtype=float))
        return self.amplitude * np.exp(space @ self.space_slope + self.time_slope * time)

    def _corner_value(self, w: Window, minimize: bool) -> float:
        # exp(b.x + c t) is monotone per axis, so the extremum sits at a corner
        pick_lo = (self.space_slope > 0) if minimize else (self.space_slope < 0)
        x = np.where(pick_lo, w.spatial[:, 0], w.spatial[:, 1])
        t_lo = self.time_slope > 0 if minimize else self.time_slope < 0
        t = w.time[0] if t_lo else w.time[1]
        return float(self.values(x[None, :], np.array([t]))[0])

    def infimum(self, w):
        return self._corner_value(w, minimize=True)

    def supremum(self, w):
        return self._corner_value(w, minimize=False)

    def integral(self, w):
        out = self.amplitude
        for b, (lo, hi) in zip(self.space_slope, w.spatial):
            out *= (np.exp(b * hi) - np.exp(b * lo)) / b if b != 0 else hi - lo
        c = self.time_slope
        lo, hi = w.time
        out *= (np.exp(c * hi) - np.exp(c * lo)) / c if c != 0 else hi - lo
        return float(out)

    def scaled(self, c_s, c_t):
        d = self.dim
        return LogLinearIntensity(
            self.amplitude * c_s ** (-d) / c_t,
            self.space_slope / c_s,
            self.time_slope / c_t,
        )


@dataclass(frozen=True)
class GridIntensity(IntensityField):
    """Tabulated intensity on a cell grid, piecewise constant per cell.

    The certified infimum is the grid minimum minus a user-declared slack
    (slack 0 is exact for genuinely piecewise-constant fields such as the
    clamped kernel estimate).
    """

    geometry: GridGeometry
    table: np.ndarray  # (n_x, n_y, n_t)
    slack: float = 0.0

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        expect = (self.geometry.n_x, self.geometry.n_y, self.geometry.n_t)
        if table.shape != expect:
            raise ValueError(f"table shape {table.shape} != grid shape {expect}")
        if np.min(table) - self.slack <= 0:
            raise InvalidIntensityError("tabulated intensity infimum must be positive")
        object.__setattr__(self, "table", table)

    def values(self, space, time):
        ix, iy, it = self.geometry.locate(space, time)
        return self.table[ix, iy, it]

    def infimum(self, w):
        return float(np.min(self.table)) - self.slack

    def supremum(self, w):
        return float(np.max(self.table)) + self.slack

    def integral(self, w):
        if not (
            w.contains_window(self.geometry.window)
            and self.geometry.window.contains_window(w)
        ):
            raise NotImplementedError("grid integral only over the full grid window")
        return float(np.sum(self.table)) * self.geometry.cell_volume

    def scaled(self, c_s, c_t):
        g = self.geometry
        win = g.window
        new_win = Window(win.spatial * c_s, win.time * c_t)
        return GridIntensity(
            GridGeometry(g.n_x, g.n_y, g.n_t, new_win),
            self.table * c_s ** (-2) / c_t,
            self.slack * c_s ** (-2) / c_t,
        )


@dataclass(frozen=True)
class CustomIntensity(IntensityField):
    """Arbitrary vectorized callable with user-certified bounds."""

    fn: object  # callable (space (m,d), time (m,)) -> (m,)
    lambda_bar: float
    lambda_max: float

    def values(self, space, time):
        return np.asarray(self.fn(np.atleast_2d(space), np.atleast_1d(time)), float)

    def infimum(self, w):
        return self.lambda_bar

    def supremum(self, w):
        return self.lambda_max


@dataclass(frozen=True)
class KernelBandwidth:
    spatial_bw: float
    temporal_bw: float

    def __post_init__(self):
        if self.spatial_bw <= 0 or self.temporal_bw <= 0:
            raise ValueError("bandwidths must be strictly positive")


def evaluate(f: IntensityField, p: SpacetimePoint) -> float:
    """Pointwise lambda(p); the point must lie in the field's stated window."""
    return float(f.values(p.space[None, :], np.array([p.time]))[0])


def infimum(f: IntensityField, w: Window) -> float:
    lam = f.infimum(w)
    if lam <= 0:
        raise InvalidIntensityError("intensity infimum must be positive")
    return lam


def supremum(f: IntensityField, w: Window) -> float:
    return f.supremum(w)


def integrate(f: IntensityField, w: Window) -> float:
    """Intensity measure of w (the expected point count)."""
    return f.integral(w)


def _axis_kernel_weights(coords, nodes, h, lo, hi):
    """Box-kernel contribution of each point to each axis node, with the
    per-point window-intersection mass used for edge correction."""
    ind = (np.abs(nodes[None, :] - coords[:, None]) <= h).astype(float) / (2.0 * h)
    mass = (np.minimum(coords + h, hi) - np.maximum(coords - h, lo)) / (2.0 * h)
    return ind, mass


def kernel_estimate(
    p: PointPattern,
    bw: KernelBandwidth,
    floor: float,
    grid_shape: tuple[int, int, int] = (32, 32, 32),
) -> GridIntensity:
    """Separable box-kernel intensity estimate on a grid, clamped below at floor.

    Each point's kernel is renormalized by its window-intersection mass so the
    raw estimate integrates to the observed count; clamping below at `floor`
    then certifies lambda_bar = floor.
    """
    if len(p) == 0:
        raise ValueError("kernel estimate requires a nonempty pattern")
    if floor <= 0:
        raise ValueError("floor must be strictly positive")
    w = p.window
    geom = GridGeometry(*grid_shape, window=w)
    xs, ys, ts = geom.axis_nodes()
    wx, mx = _axis_kernel_weights(
        p.space[:, 0], xs, bw.spatial_bw, w.spatial[0, 0], w.spatial[0, 1]
    )
    wy, my = _axis_kernel_weights(
        p.space[:, 1], ys, bw.spatial_bw, w.spatial[1, 0], w.spatial[1, 1]
    )
    wt, mt = _axis_kernel_weights(
        p.time, ts, bw.temporal_bw, w.time[0], w.time[1]
    )
    mass = mx * my * mt
    table = np.einsum("pi,pj,pk,p->ijk", wx, wy, wt, 1.0 / mass)
    return GridIntensity(geom, np.maximum(table, floor))
