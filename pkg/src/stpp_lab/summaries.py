"""Inhomogeneous spatio-temporal summary statistics.

Estimators of the empty-space function F, the nearest-neighbour-type
function G, their ratio J = (1 - G)/(1 - F), and the reweighted
second-moment statistic K, all under a minus-sampling edge correction:
only reference points (pattern points for G, probe-grid points for F and
pair anchors for K) inside the window eroded by (r, t) contribute, so that
every cylinder neighbourhood is fully observed.

Each factor of the reweighted products is 1 - lambda_bar/lambda(x, s) in
[0, 1); a reference point with no neighbours contributes an empty product,
i.e. exactly 1.  Cells where no reference point survives erosion, or where
the F product average hits 1, are reported as undefined rather than
clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .covariance import CovarianceModel, covariance
from .geometry import (
    EmptyErosionError,
    PointPattern,
    SpacetimePoint,
    Window,
    cylinder_volume,
    erode_window,
    unit_ball_volume,
)
from .intensity import IntensityField
from .partitions import lgcp_normalized_density

__all__ = [
    "RangeGrid",
    "SummaryEstimate",
    "NoCentersError",
    "NoProbesError",
    "probe_lattice",
    "estimate_G",
    "estimate_F",
    "estimate_J",
    "estimate_K",
    "poisson_F",
    "series_J",
    "K_from_pcf",
    "scale_pattern",
    "scale_field",
    "envelope",
    "hardcore_activity_ratio",
]


class NoCentersError(RuntimeError):
    """No pattern point inside the eroded window; G is undefined there."""


class NoProbesError(RuntimeError):
    """No probe inside the eroded window; F is undefined there."""


@dataclass(frozen=True)
class RangeGrid:
    """Strictly increasing nonnegative spatial and temporal range values."""

    r: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        for name, v in (("r", r), ("t", t)):
            if np.any(v < 0) or np.any(np.diff(v) <= 0):
                raise ValueError(f"{name} values must be nonnegative and increasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)

    def validate_for(self, w: Window):
        """Ensure the maximal erosion leaves a nonempty window."""
        erode_window(w, float(self.r[-1]), float(self.t[-1]))


@dataclass(frozen=True)
class SummaryEstimate:
    """(r, t)-gridded summary values with per-cell center/probe counts.

    Cells are undefined (NaN, defined=False) when no reference point
    survives erosion or the J denominator vanishes.
    """

    grid: RangeGrid
    F: np.ndarray
    G: np.ndarray
    J: np.ndarray
    K: np.ndarray | None
    n_centers: np.ndarray
    n_probes: np.ndarray
    metadata: dict = dc_field(default_factory=dict)

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.J)


def probe_lattice(w: Window, shape: tuple[int, ...] = (20, 20, 20)) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-offset regular probe lattice over the window.

    Returns (locations (m, d), times (m,)); shape is (per-spatial-axis
    counts..., temporal count).
    """
    if len(shape) != w.dim + 1:
        raise ValueError("probe shape must list each spatial axis plus time")
    axes = []
    for (lo, hi), n in zip(w.spatial, shape[:-1]):
        axes.append(lo + (np.arange(n) + 0.5) * (hi - lo) / n)
    t_axis = w.time[0] + (np.arange(shape[-1]) + 0.5) * w.duration / shape[-1]
    mesh = np.meshgrid(*axes, t_axis, indexing="ij")
    coords = np.column_stack([m.ravel() for m in mesh])
    return coords[:, :-1], coords[:, -1]


def _log_factors(lam: np.ndarray, lambda_bar: float) -> np.ndarray:
    """log(1 - lambda_bar/lambda) per point; -inf where lambda == lambda_bar."""
    ratio = lambda_bar / lam
    if np.any(ratio > 1 + 1e-12):
        raise ValueError("lambda_bar exceeds lambda somewhere; not a true infimum")
    with np.errstate(divide="ignore"):
        return np.log1p(-np.minimum(ratio, 1.0))


def _binned_log_products(
    ref_space, ref_time, pt_space, pt_time, log_f, grid: RangeGrid, exclude_self: bool
):
    """Cumulative neighbour log-products per reference point and grid cell.

    Returns an array (n_ref, n_r, n_t) whose (i, k, l) entry is the sum of
    log-factors over pattern points within spatial distance r_k and temporal
    distance t_l of reference point i.  Uses a 2-d histogram of digitized
    pair distances followed by cumulative sums, so cost is one pass over the
    in-range pairs.
    """
    n_ref = ref_space.shape[0]
    nr, nt = grid.r.shape[0], grid.t.shape[0]
    out = np.zeros((n_ref, nr + 1, nt + 1))
    if pt_space.shape[0]:
        d_s = np.linalg.norm(ref_space[:, None, :] - pt_space[None, :, :], axis=-1)
        d_t = np.abs(ref_time[:, None] - pt_time[None, :])
        ir = np.searchsorted(grid.r, d_s, side="left")
        it = np.searchsorted(grid.t, d_t, side="left")
        mask = (ir < nr) & (it < nt)
        if exclude_self:
            np.fill_diagonal(mask, False)
        ii, jj = np.nonzero(mask)
        np.add.at(out, (ii, ir[ii, jj], it[ii, jj]), log_f[jj])
    out = np.cumsum(np.cumsum(out, axis=1), axis=2)
    return out[:, :nr, :nt]


def _erosion_masks(w: Window, space, time, grid: RangeGrid):
    """Per-reference-point membership of the eroded window, per r and per t."""
    m_s = w.spatial_boundary_margin(space)
    m_t = w.temporal_boundary_margin(time)
    return m_s[:, None] >= grid.r[None, :], m_t[:, None] >= grid.t[None, :]


def _averaged_products(products, mask_r, mask_t):
    """Mean of per-reference products over the eroded-window members, per cell."""
    n_ref, nr, nt = products.shape
    means = np.full((nr, nt), np.nan)
    counts = np.zeros((nr, nt), dtype=int)
    for k in range(nr):
        sel_r = mask_r[:, k]
        for l in range(nt):
            sel = sel_r & mask_t[:, l]
            m = int(sel.sum())
            counts[k, l] = m
            if m:
                means[k, l] = products[sel, k, l].mean()
    return means, counts


def _grid_products(p: PointPattern, f: IntensityField, grid, ref_space, ref_time, exclude_self):
    lambda_bar = f.infimum(p.window)
    log_f = _log_factors(f.values(p.space, p.time), lambda_bar)
    logs = _binned_log_products(
        ref_space, ref_time, p.space, p.time, log_f, grid, exclude_self
    )
    return np.exp(logs)


def estimate_G_grid(
    p: PointPattern, f: IntensityField, grid: RangeGrid
) -> tuple[np.ndarray, np.ndarray]:
    """Ghat on the full (r, t) grid, with the per-cell center counts."""
    grid.validate_for(p.window)
    products = _grid_products(p, f, grid, p.space, p.time, exclude_self=True)
    mask_r, mask_t = _erosion_masks(p.window, p.space, p.time, grid)
    means, counts = _averaged_products(products, mask_r, mask_t)
    return 1.0 - means, counts


def estimate_F_grid(
    p: PointPattern,
    f: IntensityField,
    probes: tuple[np.ndarray, np.ndarray],
    grid: RangeGrid,
) -> tuple[np.ndarray, np.ndarray]:
    """Fhat on the full (r, t) grid, with the per-cell probe counts."""
    grid.validate_for(p.window)
    probe_space, probe_time = probes
    products = _grid_products(p, f, grid, probe_space, probe_time, exclude_self=False)
    mask_r, mask_t = _erosion_masks(p.window, probe_space, probe_time, grid)
    means, counts = _averaged_products(products, mask_r, mask_t)
    return 1.0 - means, counts


def estimate_G(p: PointPattern, f: IntensityField, r: float, t: float) -> tuple[float, int]:
    """Single-cell Ghat; raises NoCentersError when erosion removes all centers."""
    g, n = estimate_G_grid(p, f, RangeGrid([r], [t]))
    if n[0, 0] == 0:
        raise NoCentersError(f"no pattern point in the window eroded by ({r}, {t})")
    return float(g[0, 0]), int(n[0, 0])


def estimate_F(
    p: PointPattern,
    f: IntensityField,
    probes: tuple[np.ndarray, np.ndarray],
    r: float,
    t: float,
) -> tuple[float, int]:
    """Single-cell Fhat; raises NoProbesError when erosion removes all probes."""
    fh, n = estimate_F_grid(p, f, probes, RangeGrid([r], [t]))
    if n[0, 0] == 0:
        raise NoProbesError(f"no probe in the window eroded by ({r}, {t})")
    return float(fh[0, 0]), int(n[0, 0])


def estimate_J(
    p: PointPattern,
    f: IntensityField,
    probes: tuple[np.ndarray, np.ndarray],
    grid: RangeGrid,
    with_K: bool = False,
    metadata: dict | None = None,
) -> SummaryEstimate:
    """Jhat = (1 - Ghat)/(1 - Fhat) cell by cell.

    A cell is undefined (NaN) when either component is missing or the
    denominator 1 - Fhat vanishes to numerical equality; the rest of the
    grid is unaffected.
    """
    G, n_centers = estimate_G_grid(p, f, grid)
    F, n_probes = estimate_F_grid(p, f, probes, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = 1.0 - F
        J = np.where(np.abs(denom) > 1e-15, (1.0 - G) / denom, np.nan)
    J = np.where((n_centers > 0) & (n_probes > 0), J, np.nan)
    K = estimate_K(p, f, grid) if with_K else None
    meta = {"lambda_bar": f.infimum(p.window), "n_points": len(p)}
    if metadata:
        meta.update(metadata)
    return SummaryEstimate(grid, F, G, J, K, n_centers, n_probes, meta)


def estimate_K(p: PointPattern, f: IntensityField, grid: RangeGrid) -> np.ndarray:
    """Reweighted pair-count statistic with minus sampling.

    For each cell, sums 1/(lambda_i lambda_j) over ordered pairs whose first
    point lies in the eroded window and whose separations are within (r, t),
    normalized by the eroded-window measure.
    """
    grid.validate_for(p.window)
    nr, nt = grid.r.shape[0], grid.t.shape[0]
    out = np.zeros((nr, nt))
    if len(p) < 2:
        return out
    lam = f.values(p.space, p.time)
    d_s = np.linalg.norm(p.space[:, None, :] - p.space[None, :, :], axis=-1)
    d_t = np.abs(p.time[:, None] - p.time[None, :])
    wgt = 1.0 / np.outer(lam, lam)
    np.fill_diagonal(wgt, 0.0)
    pre = (d_s <= grid.r[-1]) & (d_t <= grid.t[-1])
    np.fill_diagonal(pre, False)
    ii, jj = np.nonzero(pre)
    ds, dt, ww = d_s[ii, jj], d_t[ii, jj], wgt[ii, jj]
    m_s = p.window.spatial_boundary_margin(p.space)[ii]
    m_t = p.window.temporal_boundary_margin(p.time)[ii]
    sides = p.window.spatial_sides
    for k, r in enumerate(grid.r):
        area = np.prod(sides - 2.0 * r)
        sel_r = (ds <= r) & (m_s >= r)
        for l, t in enumerate(grid.t):
            vol_a = float(area * (p.window.duration - 2.0 * t))
            sel = sel_r & (dt <= t) & (m_t >= t)
            out[k, l] = ww[sel].sum() / vol_a
    return out


def poisson_F(lambda_bar: float, r, t, d: int = 2):
    """Closed-form Poisson value of F (and G): 1 - exp(-lambda_bar * l(S_r^t))."""
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    return 1.0 - np.exp(-lambda_bar * unit_ball_volume(d) * r**d * 2.0 * t)


def _uniform_in_cylinder(rng, n, r, t, d):
    """Uniform draws in the cylinder: ball of radius r times [-t, t]."""
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = r * rng.uniform(size=n) ** (1.0 / d)
    return g * radii[:, None], rng.uniform(-t, t, size=n)


def _lgcp_xi_samples(cov, anchor_sets, d):
    """Vectorized xi_{n+1}((0,0), U_1..U_n) over many sampled tuples.

    anchor_sets: (m, n, d+1) array of cylinder points; returns (m,) values.
    Computes normalized densities for every index subset, then inverts the
    partition lattice bottom-up with all sample tuples in parallel.
    """
    from itertools import combinations

    from .partitions import _partitions_of_subset

    m, n, _ = anchor_sets.shape
    pts_s = np.concatenate([np.zeros((m, 1, d)), anchor_sets[:, :, :d]], axis=1)
    pts_t = np.concatenate([np.zeros((m, 1)), anchor_sets[:, :, d]], axis=1)
    du = np.linalg.norm(pts_s[:, :, None, :] - pts_s[:, None, :, :], axis=-1)
    dv = np.abs(pts_t[:, :, None] - pts_t[:, None, :])
    C = covariance(cov, du, dv)
    idx = tuple(range(n + 1))
    xi: dict[tuple[int, ...], np.ndarray] = {}
    for size in range(1, n + 2):
        for subset in combinations(idx, size):
            if size == 1:
                xi[subset] = np.ones(m)
                continue
            pair_sum = np.zeros(m)
            for a in range(size):
                for b in range(a + 1, size):
                    pair_sum += C[:, subset[a], subset[b]]
            val = np.exp(pair_sum)
            for blocks in _partitions_of_subset(subset):
                if len(blocks) == 1:
                    continue
                prod = np.ones(m)
                for block in blocks:
                    prod = prod * xi[tuple(block)]
                val = val - prod
            xi[subset] = val
    return xi[idx]


def series_J(
    model: str,
    lambda_bar: float,
    r: float,
    t: float,
    n_terms: int = 2,
    mc_samples: int = 4000,
    seed=0,
    cov: CovarianceModel | None = None,
    d: int = 2,
) -> tuple[float, float, np.ndarray]:
    """Truncated alternating-series J value with Monte Carlo coefficients.

    J = 1 + sum_{n>=1} (-lambda_bar)^n / n! * J_n, where J_n integrates
    xi_{n+1} anchored at the origin over the cylinder's n-fold product; each
    J_n is estimated by uniform Monte Carlo over the cylinder.  Returns
    (value, standard error, |term| magnitudes).  Non-decreasing term
    magnitudes indicate the truncation left the series' contracting regime.
    """
    if not 1 <= n_terms <= 4:
        raise ValueError("n_terms must be in [1, 4]")
    if model == "poisson":
        return 1.0, 0.0, np.zeros(n_terms)
    if model != "lgcp" or cov is None:
        raise ValueError("model must be 'poisson' or 'lgcp' with a covariance")
    rng = np.random.default_rng(seed)
    vol = cylinder_volume(d, r, t)
    value = 1.0
    var = 0.0
    mags = np.zeros(n_terms)
    for n in range(1, n_terms + 1):
        sp, tm = _uniform_in_cylinder(rng, mc_samples * n, r, t, d)
        sets = np.concatenate([sp, tm[:, None]], axis=1).reshape(mc_samples, n, d + 1)
        xi_vals = _lgcp_xi_samples(cov, sets, d)
        coeff = (-lambda_bar) ** n / math.factorial(n) * vol**n
        term = coeff * xi_vals.mean()
        value += term
        var += coeff**2 * xi_vals.var(ddof=1) / mc_samples
        mags[n - 1] = abs(term)
    return value, float(np.sqrt(var)), mags


def K_from_pcf(
    cov: CovarianceModel, r: float, t: float, nodes: int = 32
) -> float:
    """K for a process with pair correlation exp(C), by tensor Gauss-Legendre
    quadrature of omega_d * int int exp(C(u, v)) u^{d-1} du dv (d = 2)."""

    def quad(n):
        xu, wu = leggauss(n)
        xv, wv = leggauss(n)
        u = 0.5 * r * (xu + 1.0)
        v = t * xv  # maps [-1, 1] onto [-t, t]
        gbar = np.exp(covariance(cov, u[:, None], v[None, :]))
        integrand = gbar * u[:, None]
        return (
            2.0
            * math.pi
            * (0.5 * r)
            * t
            * float(wu @ integrand @ wv)
        )

    val = quad(nodes)
    ref = quad(2 * nodes)
    if ref != 0 and abs(val - ref) > 1e-6 * abs(ref):
        return ref
    return val


def scale_pattern(p: PointPattern, c_s: float, c_t: float) -> PointPattern:
    """Map every event (x, t) to (c_s x, c_t t) along with the window."""
    if c_s <= 0 or c_t <= 0:
        raise ValueError("scale factors must be strictly positive")
    w = Window(p.window.spatial * c_s, p.window.time * c_t)
    return PointPattern(p.space * c_s, p.time * c_t, w)


def scale_field(f: IntensityField, c_s: float, c_t: float) -> IntensityField:
    """Intensity of the scaled process: c_s^-d c_t^-1 lambda(x/c_s, t/c_t)."""
    if c_s <= 0 or c_t <= 0:
        raise ValueError("scale factors must be strictly positive")
    return f.scaled(c_s, c_t)


def envelope(
    simulate_replicate,
    statistic: str,
    n_sim: int,
    f: IntensityField,
    probes: tuple[np.ndarray, np.ndarray],
    grid: RangeGrid,
    seed,
    alpha: float = 0.05,
) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise Monte Carlo envelope of a summary statistic under a model.

    simulate_replicate: callable(seed) -> PointPattern.  Returns per-cell
    (lo, hi) empirical alpha/2 and 1 - alpha/2 quantiles; a cell is NaN when
    more than half the replicates are undefined there.
    """
    if n_sim < 20:
        raise ValueError("envelopes need at least 20 simulations")
    seeds = np.random.SeedSequence(seed).spawn(n_sim)
    stats = []
    for s in seeds:
        pattern = simulate_replicate(s)
        est = estimate_J(pattern, f, probes, grid, with_K=(statistic == "K"))
        stats.append(getattr(est, statistic))
    arr = np.stack(stats)
    bad = np.isnan(arr).sum(axis=0) > n_sim / 2
    with np.errstate(invalid="ignore"):
        lo = np.nanquantile(arr, alpha / 2, axis=0)
        hi = np.nanquantile(arr, 1 - alpha / 2, axis=0)
    lo[bad] = np.nan
    hi[bad] = np.nan
    return lo, hi


def hardcore_activity_ratio(
    patterns: list[PointPattern], beta: float
) -> tuple[float, float]:
    """Diagnostic for the hard-core model: the ratio beta / lambda_hat, with
    lambda_hat the pooled empirical intensity of unthinned realizations.

    For a hard-core process the conditional-intensity representation forces
    this ratio to be >= 1, with equality only in the interaction-free limit.
    """
    counts = np.array([len(p) for p in patterns], dtype=float)
    vol = patterns[0].window.volume
    lam_hat = counts.mean() / vol
    return beta / lam_hat, lam_hat
