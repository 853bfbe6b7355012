"""Samplers for the three model families.

* inhomogeneous Poisson, by thinning a homogeneous dominating process;
* stationary spatio-temporal hard-core Gibbs, by birth-death
  Metropolis-Hastings on the flat torus (numba-compiled inner loop),
  optionally followed by location-dependent thinning;
* log-Gaussian Cox, by cell-wise Poisson sampling of a discretized
  exp(mu + Z) intensity with Z an exact Gaussian field draw.

Every sampler is a deterministic function of (parameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .covariance import CovarianceModel, GridField, simulate_grf, simulate_grf_additive
from .geometry import GridGeometry, PointPattern, Window
from .intensity import IntensityField

__all__ = [
    "HardCoreSpec",
    "RetentionFunction",
    "simulate_poisson",
    "simulate_hardcore",
    "simulate_hardcore_chain",
    "thin_pattern",
    "simulate_lgcp",
    "chain_is_stationary",
]


@dataclass(frozen=True)
class HardCoreSpec:
    """Gibbs hard-core parameters: activity beta and exclusion radii.

    The process has Papangelou conditional intensity
    beta * 1{no existing point within spatial distance R_S AND temporal
    distance R_T}, so realizations contain no violating pair.
    """

    beta: float
    R_S: float
    R_T: float
    mcmc_steps: int = 1_000_000
    torus: bool = True

    def __post_init__(self):
        if self.beta <= 0 or self.R_S <= 0 or self.R_T <= 0:
            raise ValueError("beta, R_S and R_T must be strictly positive")
        if self.mcmc_steps < 1:
            raise ValueError("mcmc_steps must be >= 1")


@dataclass(frozen=True)
class RetentionFunction:
    """Retention probability p(x, t) in (0, 1] with a certified infimum."""

    field: IntensityField

    def probabilities(self, space, time):
        return self.field.values(space, time)

    def p_bar(self, w: Window) -> float:
        p = self.field.infimum(w)
        if not 0 < p <= 1:
            raise ValueError("retention infimum must lie in (0, 1]")
        return p

    def validate(self, w: Window):
        if self.field.supremum(w) > 1 + 1e-12:
            raise ValueError("retention probabilities must not exceed 1")


def simulate_poisson(f: IntensityField, w: Window, seed) -> PointPattern:
    """Inhomogeneous Poisson sample on w by thinning a homogeneous
    Poisson(lambda_max) proposal; lambda_max comes from the field's certified
    supremum over w."""
    rng = np.random.default_rng(seed)
    lam_max = f.supremum(w)
    n = rng.poisson(lam_max * w.volume)
    space = rng.uniform(w.spatial[:, 0], w.spatial[:, 1], size=(n, w.dim))
    time = rng.uniform(w.time[0], w.time[1], size=n)
    if n == 0:
        return PointPattern(space, time, w)
    lam = f.values(space, time)
    if np.any(lam > lam_max * (1 + 1e-12)):
        raise RuntimeError("intensity exceeds its stated supremum; bound violated")
    keep = rng.uniform(size=n) < lam / lam_max
    return PointPattern(space[keep], time[keep], w)


@njit(cache=True)
def _hardcore_kernel(
    uniforms, sides, t_len, lo, t_lo, beta_vol, rs2, rt, torus, trace_stride
):  # pragma: no cover - compiled
    n_steps = uniforms.shape[0]
    d = sides.shape[0]
    # uniform columns: proposal type, d+1 location coords, acceptance, death index
    cap = max(int(4 * beta_vol) + 64, 256)
    xs = np.empty((cap, d))
    ts = np.empty(cap)
    n = 0
    trace = np.empty(n_steps // trace_stride + 1, dtype=np.int64)
    trace_i = 0
    for step in range(n_steps):
        if uniforms[step, 0] < 0.5:
            # birth
            if n < cap:
                ok = True
                for a in range(d):
                    xs[n, a] = lo[a] + uniforms[step, 1 + a] * sides[a]
                ts[n] = t_lo + uniforms[step, 1 + d] * t_len
                for j in range(n):
                    dt = abs(ts[n] - ts[j])
                    if torus and t_len - dt < dt:
                        dt = t_len - dt
                    if dt > rt:
                        continue
                    ds2 = 0.0
                    for a in range(d):
                        dx = abs(xs[n, a] - xs[j, a])
                        if torus and sides[a] - dx < dx:
                            dx = sides[a] - dx
                        ds2 += dx * dx
                    if ds2 <= rs2:
                        ok = False
                        break
                if ok and uniforms[step, d + 2] * (n + 1) < beta_vol:
                    n += 1
        else:
            # death
            if n > 0 and uniforms[step, d + 2] * beta_vol < n:
                j = int(uniforms[step, d + 3] * n)
                if j == n:
                    j = n - 1
                for a in range(d):
                    xs[j, a] = xs[n - 1, a]
                ts[j] = ts[n - 1]
                n -= 1
        if step % trace_stride == 0:
            trace[trace_i] = n
            trace_i += 1
    return xs[:n].copy(), ts[:n].copy(), trace[:trace_i]


def simulate_hardcore_chain(
    spec: HardCoreSpec, w: Window, seed, trace_stride: int = 1000
) -> tuple[PointPattern, np.ndarray]:
    """Run one birth-death Metropolis-Hastings chain from the empty
    configuration; returns the final pattern and the subsampled count trace.

    Births and deaths are proposed with probability 1/2 each; birth
    locations are uniform on w and the acceptance ratios are the standard
    beta*l(W)/(n+1) and n/(beta*l(W)) with the hard-core indicator.  With
    torus=True all pair distances wrap around the window, emulating the
    stationary process on a bounded domain.
    """
    rng = np.random.default_rng(seed)
    d = w.dim
    uniforms = rng.uniform(size=(spec.mcmc_steps, d + 4))
    xs, ts, trace = _hardcore_kernel(
        uniforms,
        w.spatial_sides.astype(float),
        w.duration,
        w.spatial[:, 0].astype(float),
        float(w.time[0]),
        spec.beta * w.volume,
        spec.R_S**2,
        spec.R_T,
        spec.torus,
        trace_stride,
    )
    return PointPattern(xs, ts, w), trace


def simulate_hardcore(spec: HardCoreSpec, w: Window, seed) -> PointPattern:
    """Final state of a single hard-core MCMC chain (see
    simulate_hardcore_chain for the count trace)."""
    pattern, _ = simulate_hardcore_chain(spec, w, seed)
    return pattern


def chain_is_stationary(trace: np.ndarray) -> bool:
    """Burn-in heuristic: mean count of the last half of the trace within
    2 standard errors of the preceding quarter-to-half segment."""
    trace = np.asarray(trace, dtype=float)
    m = trace.shape[0]
    if m < 8:
        return False
    a = trace[m // 4 : m // 2]
    b = trace[m // 2 :]
    se = np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    return bool(abs(a.mean() - b.mean()) <= 2 * max(se, 1e-12))


def thin_pattern(p: PointPattern, ret: RetentionFunction, seed) -> PointPattern:
    """Independent location-dependent thinning: keep each point with
    probability p(x, t)."""
    ret.validate(p.window)
    rng = np.random.default_rng(seed)
    if len(p) == 0:
        return p
    probs = ret.probabilities(p.space, p.time)
    keep = rng.uniform(size=len(p)) < probs
    return PointPattern(p.space[keep], p.time[keep], p.window)


def simulate_lgcp(
    mu: Callable[[np.ndarray, np.ndarray], np.ndarray],
    cov: CovarianceModel,
    geom: GridGeometry,
    w: Window,
    seed,
) -> tuple[PointPattern, GridField]:
    """Log-Gaussian Cox sample: draw the field Z, then per grid cell a
    Poisson count with mean exp(mu(center) + Z(node)) * cell volume, with
    points placed uniformly in their cells.

    Returns both the pattern and the realized field, so diagnostics can
    condition on the driving intensity.
    """
    if not (w.contains_window(geom.window) and geom.window.contains_window(w)):
        raise ValueError("grid geometry must cover exactly the target window")
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    field_seed, point_seed = seed.spawn(2)
    if cov.kind == "separable_mult":
        z = simulate_grf(cov, geom, field_seed)
    elif cov.kind == "separable_add":
        z = simulate_grf_additive(cov, geom, field_seed)
    else:
        raise ValueError("LGCP sampling requires a separable covariance")
    rng = np.random.default_rng(point_seed)
    xs, ys, ts = geom.axis_nodes()
    cx, cy, ct = np.meshgrid(xs, ys, ts, indexing="ij")
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    rate = np.exp(mu(centers, ct.ravel()) + z.values.ravel()) * geom.cell_volume
    counts = rng.poisson(rate)
    hx, hy, ht = geom.spacings
    reps_x = np.repeat(cx.ravel(), counts)
    reps_y = np.repeat(cy.ravel(), counts)
    reps_t = np.repeat(ct.ravel(), counts)
    m = counts.sum()
    offsets = rng.uniform(-0.5, 0.5, size=(m, 3))
    space = np.column_stack(
        [reps_x + offsets[:, 0] * hx, reps_y + offsets[:, 1] * hy]
    )
    time = reps_t + offsets[:, 2] * ht
    return PointPattern(space, time, w), z
