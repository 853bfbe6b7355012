"""Domain primitives for spatio-temporal point patterns.

Events live on R^d x R with the supremum-type metric

    d((x,t), (y,s)) = max{ ||x - y||_2, |t - s| },

whose closed balls are cylinders: a spatial Euclidean ball crossed with a
time interval.  Observation windows are axis-aligned boxes crossed with an
interval, which keeps erosion (minus sampling) analytically trivial.

All types here are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpacetimePoint",
    "Window",
    "PointPattern",
    "Cylinder",
    "GridGeometry",
    "EmptyErosionError",
    "DimensionMismatchError",
    "sup_distance",
    "cylinder_contains",
    "cylinder_volume",
    "unit_ball_volume",
    "erode_window",
    "restrict_pattern",
]


class EmptyErosionError(ValueError):
    """Raised when eroding a window by (r, t) would leave nothing."""


class DimensionMismatchError(ValueError):
    """Raised when spatial dimensions of two objects disagree."""


@dataclass(frozen=True)
class SpacetimePoint:
    """A single event: spatial location in R^d plus an event time."""

    space: np.ndarray
    time: float

    def __post_init__(self):
        space = np.atleast_1d(np.asarray(self.space, dtype=float))
        if space.ndim != 1:
            raise ValueError("space must be a flat coordinate vector")
        if not (np.all(np.isfinite(space)) and math.isfinite(self.time)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "time", float(self.time))

    @property
    def dim(self) -> int:
        return self.space.shape[0]

    def __add__(self, other: "SpacetimePoint") -> "SpacetimePoint":
        return SpacetimePoint(self.space + other.space, self.time + other.time)

    def __sub__(self, other: "SpacetimePoint") -> "SpacetimePoint":
        return SpacetimePoint(self.space - other.space, self.time - other.time)


@dataclass(frozen=True)
class Window:
    """Product observation window W_S x W_T: a box in R^d times an interval.

    Parameters
    ----------
    spatial : (d, 2) array
        Per-axis (lo, hi) bounds of the spatial box.
    time : (2,) array
        (lo, hi) bounds of the temporal interval.
    """

    spatial: np.ndarray
    time: np.ndarray

    def __post_init__(self):
        spatial = np.atleast_2d(np.asarray(self.spatial, dtype=float))
        time = np.asarray(self.time, dtype=float).reshape(2)
        if spatial.shape[1] != 2:
            raise ValueError("spatial bounds must be (d, 2)")
        if np.any(spatial[:, 0] >= spatial[:, 1]) or time[0] >= time[1]:
            raise ValueError("window bounds must satisfy lo < hi componentwise")
        object.__setattr__(self, "spatial", spatial)
        object.__setattr__(self, "time", time)

    @property
    def dim(self) -> int:
        return self.spatial.shape[0]

    @property
    def spatial_sides(self) -> np.ndarray:
        return self.spatial[:, 1] - self.spatial[:, 0]

    @property
    def duration(self) -> float:
        return float(self.time[1] - self.time[0])

    @property
    def spatial_volume(self) -> float:
        return float(np.prod(self.spatial_sides))

    @property
    def volume(self) -> float:
        """Lebesgue measure of the full space-time window."""
        return self.spatial_volume * self.duration

    def contains(self, space: np.ndarray, time: np.ndarray) -> np.ndarray:
        """Vectorized closed-set membership for (m, d) locations and (m,) times."""
        space = np.atleast_2d(np.asarray(space, dtype=float))
        time = np.atleast_1d(np.asarray(time, dtype=float))
        ok = np.all(
            (space >= self.spatial[:, 0]) & (space <= self.spatial[:, 1]), axis=1
        )
        return ok & (time >= self.time[0]) & (time <= self.time[1])

    def contains_point(self, p: SpacetimePoint) -> bool:
        return bool(self.contains(p.space[None, :], np.array([p.time]))[0])

    def contains_window(self, other: "Window") -> bool:
        return bool(
            np.all(other.spatial[:, 0] >= self.spatial[:, 0])
            and np.all(other.spatial[:, 1] <= self.spatial[:, 1])
            and other.time[0] >= self.time[0]
            and other.time[1] <= self.time[1]
        )

    def spatial_boundary_margin(self, space: np.ndarray) -> np.ndarray:
        """Distance from each location to the spatial box boundary (box metric)."""
        space = np.atleast_2d(np.asarray(space, dtype=float))
        lo = space - self.spatial[:, 0]
        hi = self.spatial[:, 1] - space
        return np.minimum(lo, hi).min(axis=1)

    def temporal_boundary_margin(self, time: np.ndarray) -> np.ndarray:
        time = np.atleast_1d(np.asarray(time, dtype=float))
        return np.minimum(time - self.time[0], self.time[1] - time)


@dataclass(frozen=True)
class PointPattern:
    """A finite simple point pattern observed in a window.

    Parameters
    ----------
    space : (m, d) array of spatial coordinates.
    time : (m,) array of event times.
    window : the observation window; every event must lie inside it.
    """

    space: np.ndarray
    time: np.ndarray
    window: Window

    def __post_init__(self):
        space = np.asarray(self.space, dtype=float).reshape(-1, self.window.dim)
        time = np.asarray(self.time, dtype=float).reshape(-1)
        if space.shape[0] != time.shape[0]:
            raise ValueError("space and time must have equal length")
        if not (np.all(np.isfinite(space)) and np.all(np.isfinite(time))):
            raise ValueError("coordinates must be finite")
        if not np.all(self.window.contains(space, time)):
            raise ValueError("all points must lie inside the window")
        if space.shape[0] > 1:
            rows = np.hstack([space, time[:, None]])
            if np.unique(rows, axis=0).shape[0] != rows.shape[0]:
                raise ValueError("pattern must be simple (no duplicate points)")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "time", time)

    def __len__(self) -> int:
        return self.space.shape[0]

    @property
    def dim(self) -> int:
        return self.window.dim

    def point(self, i: int) -> SpacetimePoint:
        return SpacetimePoint(self.space[i], self.time[i])

    def points(self) -> list[SpacetimePoint]:
        return [self.point(i) for i in range(len(self))]


@dataclass(frozen=True)
class Cylinder:
    """Closed cylinder set centred at a point: spatial ball radius r, half-length t."""

    center: SpacetimePoint
    spatial_radius: float
    temporal_radius: float

    def __post_init__(self):
        if self.spatial_radius < 0 or self.temporal_radius < 0:
            raise ValueError("cylinder radii must be nonnegative")


def sup_distance(a: SpacetimePoint, b: SpacetimePoint) -> float:
    """Supremum-type metric: max of spatial Euclidean and temporal distances."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ds = float(np.linalg.norm(a.space - b.space))
    return max(ds, abs(a.time - b.time))


def cylinder_contains(c: Cylinder, p: SpacetimePoint) -> bool:
    """Closed-set membership: spatial distance <= r and temporal distance <= t."""
    if c.center.dim != p.dim:
        raise DimensionMismatchError(
            f"dimension mismatch: {c.center.dim} vs {p.dim}"
        )
    ds = float(np.linalg.norm(p.space - c.center.space))
    return ds <= c.spatial_radius and abs(p.time - c.center.time) <= c.temporal_radius


def unit_ball_volume(d: int) -> float:
    """Volume kappa_d of the unit Euclidean ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(1 + d / 2)


def cylinder_volume(d: int, r: float, t: float) -> float:
    """Lebesgue measure of the cylinder: kappa_d * r^d * 2t."""
    if d < 1:
        raise ValueError("spatial dimension must be >= 1")
    if r < 0 or t < 0:
        raise ValueError("radii must be nonnegative")
    return unit_ball_volume(d) * r**d * 2.0 * t


def erode_window(w: Window, r: float, t: float) -> Window:
    """Shrink the window by r on every spatial side and t on both temporal ends.

    Raises EmptyErosionError when the erosion leaves a degenerate or empty set.
    """
    if r < 0 or t < 0:
        raise ValueError("erosion radii must be nonnegative")
    if np.any(2.0 * r >= w.spatial_sides) or 2.0 * t >= w.duration:
        raise EmptyErosionError(
            f"eroding by (r={r}, t={t}) empties the window"
        )
    spatial = np.column_stack([w.spatial[:, 0] + r, w.spatial[:, 1] - r])
    return Window(spatial, (w.time[0] + t, w.time[1] - t))


def restrict_pattern(p: PointPattern, w: Window) -> PointPattern:
    """Restrict a pattern to a sub-window, preserving point order."""
    if not p.window.contains_window(w):
        raise ValueError("restriction window must be contained in the pattern window")
    keep = w.contains(p.space, p.time)
    return PointPattern(p.space[keep], p.time[keep], w)


@dataclass(frozen=True)
class GridGeometry:
    """Regular cell grid over a 2-d spatial window crossed with time.

    Nodes sit at cell centres.  Lookup maps a point to the node of the cell
    containing it; a point exactly on a cell boundary is assigned the
    lower-index cell.
    """

    n_x: int
    n_y: int
    n_t: int
    window: Window

    def __post_init__(self):
        if self.window.dim != 2:
            raise ValueError("grid geometry supports d=2 spatial windows")
        if min(self.n_x, self.n_y, self.n_t) < 1:
            raise ValueError("grid sizes must be >= 1")

    @property
    def spacings(self) -> tuple[float, float, float]:
        sides = self.window.spatial_sides
        return (
            float(sides[0]) / self.n_x,
            float(sides[1]) / self.n_y,
            self.window.duration / self.n_t,
        )

    @property
    def cell_volume(self) -> float:
        hx, hy, ht = self.spacings
        return hx * hy * ht

    @property
    def n_nodes(self) -> int:
        return self.n_x * self.n_y * self.n_t

    def axis_nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cell-centre coordinates along each axis."""
        hx, hy, ht = self.spacings
        xs = self.window.spatial[0, 0] + (np.arange(self.n_x) + 0.5) * hx
        ys = self.window.spatial[1, 0] + (np.arange(self.n_y) + 0.5) * hy
        ts = self.window.time[0] + (np.arange(self.n_t) + 0.5) * ht
        return xs, ys, ts

    def spatial_nodes(self) -> np.ndarray:
        """All spatial cell centres as an (n_x*n_y, 2) array, x-major order."""
        xs, ys, _ = self.axis_nodes()
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def locate(self, space: np.ndarray, time: np.ndarray) -> tuple[np.ndarray, ...]:
        """Cell indices (ix, iy, it) of each query point; lower-index tie-break."""
        space = np.atleast_2d(np.asarray(space, dtype=float))
        time = np.atleast_1d(np.asarray(time, dtype=float))
        if not np.all(self.window.contains(space, time)):
            raise ValueError("query point outside the grid hull")
        hx, hy, ht = self.spacings
        ix = self._axis_index(space[:, 0], self.window.spatial[0, 0], hx, self.n_x)
        iy = self._axis_index(space[:, 1], self.window.spatial[1, 0], hy, self.n_y)
        it = self._axis_index(time, self.window.time[0], ht, self.n_t)
        return ix, iy, it

    @staticmethod
    def _axis_index(v, lo, h, n):
        # ceil(u) - 1 sends exact cell boundaries to the lower cell
        idx = np.ceil((np.asarray(v, dtype=float) - lo) / h).astype(int) - 1
        return np.clip(idx, 0, n - 1)
