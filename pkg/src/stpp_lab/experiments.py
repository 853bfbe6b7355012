"""Experiment configuration, presets, and deterministic replicate running.

A JSON config fully determines an experiment: model block, window, (r, t)
range grids, probe lattice, replicate count and master seed.  Replicate
seeds are spawned from the master seed through numpy's SeedSequence tree,
so results are independent of execution order and parallelism.

The three presets encode the reference parameter sets used throughout the
tests: an exponentially decaying Poisson intensity, a thinned hard-core
Gibbs process, and a log-Gaussian Cox process with Gaussian-times-
exponential separable covariance, all on the unit cube.
"""

from __future__ import annotations

import hashlib
import json
import os
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .covariance import CovarianceModel, PowerExponential, validate_continuity
from .geometry import GridGeometry, PointPattern, Window
from .intensity import ConstantIntensity, IntensityField, LogLinearIntensity
from .patternio import (
    read_pattern,
    window_from_dict,
    write_envelope,
    write_pattern,
    write_summary,
)
from .simulate import (
    HardCoreSpec,
    RetentionFunction,
    simulate_hardcore_chain,
    simulate_lgcp,
    simulate_poisson,
    thin_pattern,
)
from .summaries import RangeGrid, SummaryEstimate, envelope, estimate_J, probe_lattice

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "PRESETS",
    "preset_config",
    "load_config",
    "replicate_seeds",
    "run_simulate",
    "run_estimate",
    "run_envelope",
    "default_jobs",
]

VERSION = "0.1.0"


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


def _require_keys(block: dict, allowed: set[str], required: set[str], where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)} in {where}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"missing keys {sorted(missing)} in {where}")


def _parse_intensity(block: dict, where: str) -> IntensityField:
    kind = block.get("kind")
    if kind == "log_linear":
        _require_keys(block, {"kind", "A", "b", "c"}, {"kind", "A", "b", "c"}, where)
        return LogLinearIntensity(block["A"], np.asarray(block["b"], float), block["c"])
    if kind == "constant":
        _require_keys(block, {"kind", "value"}, {"kind", "value"}, where)
        return ConstantIntensity(block["value"])
    raise ConfigError(f"unsupported intensity kind {kind!r} in {where}")


def _parse_covariance(block: dict, where: str) -> CovarianceModel:
    _require_keys(
        block, {"kind", "spatial", "temporal"}, {"kind", "spatial", "temporal"}, where
    )
    spatial = PowerExponential(block["spatial"]["var"], block["spatial"]["delta"])
    temporal = PowerExponential(block["temporal"]["var"], block["temporal"]["delta"])
    cov = CovarianceModel(block["kind"], spatial, temporal)
    ok, diag = validate_continuity(cov)
    if not ok:
        raise ConfigError(f"covariance fails continuity check in {where}: {diag}")
    return cov


def _parse_grid_axis(block, where: str) -> np.ndarray:
    if isinstance(block, dict):
        _require_keys(block, {"step", "n"}, {"step", "n"}, where)
        return block["step"] * np.arange(1, block["n"] + 1)
    return np.asarray(block, dtype=float)


@dataclass(frozen=True)
class ExperimentConfig:
    raw: dict
    model: dict
    window: Window
    grid: RangeGrid
    probe_shape: tuple[int, int, int]
    n_replicates: int
    seed: int
    envelope_opts: dict

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()
        ).hexdigest()


def load_config(source) -> ExperimentConfig:
    """Parse and fully validate a config dict or JSON file path."""
    if isinstance(source, (str, Path)):
        raw = json.loads(Path(source).read_text())
    else:
        raw = dict(source)
    _require_keys(
        raw,
        {
            "model",
            "window",
            "r_grid",
            "t_grid",
            "probe_grid",
            "n_replicates",
            "seed",
            "envelope",
        },
        {"model", "window", "r_grid", "t_grid", "probe_grid", "n_replicates", "seed"},
        "config",
    )
    window = window_from_dict(raw["window"])
    grid = RangeGrid(
        _parse_grid_axis(raw["r_grid"], "r_grid"),
        _parse_grid_axis(raw["t_grid"], "t_grid"),
    )
    grid.validate_for(window)
    model = raw["model"]
    kind = model.get("model")
    if kind == "poisson":
        _require_keys(model, {"model", "intensity"}, {"model", "intensity"}, "model")
        _parse_intensity(model["intensity"], "model.intensity")
    elif kind == "thinned_hardcore":
        _require_keys(
            model,
            {"model", "beta", "R_S", "R_T", "mcmc_steps", "torus", "retention"},
            {"model", "beta", "R_S", "R_T", "retention"},
            "model",
        )
        _parse_intensity(model["retention"], "model.retention")
    elif kind == "lgcp":
        _require_keys(
            model,
            {"model", "mu", "covariance", "grid"},
            {"model", "mu", "covariance", "grid"},
            "model",
        )
        _require_keys(model["mu"], {"m0", "b", "c"}, {"m0", "b", "c"}, "model.mu")
        _parse_covariance(model["covariance"], "model.covariance")
    else:
        raise ConfigError(f"unknown model kind {kind!r}")
    envelope_opts = dict(raw.get("envelope", {}))
    if envelope_opts:
        _require_keys(
            envelope_opts, {"n_sim", "alpha", "statistic"}, {"n_sim"}, "envelope"
        )
        if envelope_opts["n_sim"] < 20:
            raise ConfigError("envelope.n_sim must be at least 20")
    n_rep = int(raw["n_replicates"])
    if n_rep < 0:
        raise ConfigError("n_replicates must be nonnegative")
    probe_shape = tuple(int(v) for v in raw["probe_grid"])
    if len(probe_shape) != 3:
        raise ConfigError("probe_grid must list three lattice sizes")
    return ExperimentConfig(
        raw=raw,
        model=model,
        window=window,
        grid=grid,
        probe_shape=probe_shape,
        n_replicates=n_rep,
        seed=int(raw["seed"]),
        envelope_opts=envelope_opts,
    )


def estimation_field(cfg: ExperimentConfig) -> IntensityField:
    """The intensity field the estimators reweight by.

    The estimators only consume the ratio lambda_bar/lambda, so the
    hard-core retention function stands in for the (constant-scaled)
    thinned intensity, and the LGCP field is the closed-form
    exp(m0 + b.x + c*t + variance/2).
    """
    model = cfg.model
    if model["model"] == "poisson":
        return _parse_intensity(model["intensity"], "model.intensity")
    if model["model"] == "thinned_hardcore":
        return _parse_intensity(model["retention"], "model.retention")
    cov = _parse_covariance(model["covariance"], "model.covariance")
    mu = model["mu"]
    amp = float(np.exp(mu["m0"] + cov.variance / 2.0))
    return LogLinearIntensity(amp, np.asarray(mu["b"], float), mu["c"])


def simulate_replicate(cfg: ExperimentConfig, seed) -> dict:
    """Draw one replicate; returns the pattern plus model-specific extras."""
    model = cfg.model
    kind = model["model"]
    if kind == "poisson":
        field = _parse_intensity(model["intensity"], "model.intensity")
        return {"pattern": simulate_poisson(field, cfg.window, seed)}
    if kind == "thinned_hardcore":
        spec = HardCoreSpec(
            model["beta"],
            model["R_S"],
            model["R_T"],
            model.get("mcmc_steps", 1_000_000),
            model.get("torus", True),
        )
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence(seed)
        chain_seed, thin_seed = seed.spawn(2)
        unthinned, trace = simulate_hardcore_chain(spec, cfg.window, chain_seed)
        ret = RetentionFunction(_parse_intensity(model["retention"], "model.retention"))
        thinned = thin_pattern(unthinned, ret, thin_seed)
        return {"pattern": thinned, "unthinned": unthinned, "trace": trace}
    cov = _parse_covariance(model["covariance"], "model.covariance")
    mu = model["mu"]
    b = np.asarray(mu["b"], float)
    mu_fn = lambda sp, tm: mu["m0"] + sp @ b + mu["c"] * tm  # noqa: E731
    geom = GridGeometry(*model["grid"], window=cfg.window)
    pattern, field = simulate_lgcp(mu_fn, cov, geom, cfg.window, seed)
    return {"pattern": pattern, "field": field}


def replicate_seeds(master: int, n: int) -> list:
    return np.random.SeedSequence(master).spawn(n)


def default_jobs(cli_value=None) -> int:
    if cli_value:
        return int(cli_value)
    env = os.environ.get("STPP_LAB_JOBS")
    return int(env) if env else 1


def _simulate_one(raw_cfg: dict, index: int):
    cfg = load_config(raw_cfg)
    seed = replicate_seeds(cfg.seed, cfg.n_replicates)[index]
    return index, simulate_replicate(cfg, seed)


def _run_indexed(raw_cfg: dict, n: int, jobs: int):
    if jobs <= 1:
        return [_simulate_one(raw_cfg, i) for i in range(n)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_simulate_one, raw_cfg, i) for i in range(n)]
        return sorted((f.result() for f in futures), key=lambda x: x[0])


def run_simulate(cfg: ExperimentConfig, out_dir, jobs: int = 1) -> dict:
    """Simulate all replicates and write pattern CSVs plus a run manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config_hash": cfg.config_hash,
        "master_seed": cfg.seed,
        "replicates": cfg.n_replicates,
        "version": VERSION,
        "status": "running",
        "outputs": [],
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1))
    start = _time.time()
    outputs = []
    for index, result in _run_indexed(cfg.raw, cfg.n_replicates, jobs):
        path = out_dir / f"pattern_{index:04d}.csv"
        write_pattern(path, result["pattern"])
        outputs.append(path.name)
        if "unthinned" in result:
            upath = out_dir / f"pattern_{index:04d}_unthinned.csv"
            write_pattern(upath, result["unthinned"])
            outputs.append(upath.name)
    manifest.update(
        status="done", wall_time_s=round(_time.time() - start, 3), outputs=outputs
    )
    manifest_path.write_text(json.dumps(manifest, indent=1))
    return manifest


def run_estimate(cfg: ExperimentConfig, pattern_paths, out_dir) -> SummaryEstimate:
    """Estimate the summary grid for each pattern and a pooled mean grid."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    field = estimation_field(cfg)
    probes = probe_lattice(cfg.window, cfg.probe_shape)
    estimates = []
    for path in pattern_paths:
        pattern = read_pattern(path)
        if not (
            pattern.window.contains_window(cfg.window)
            and cfg.window.contains_window(pattern.window)
        ):
            raise ConfigError(f"window of {path} disagrees with the config window")
        est = estimate_J(pattern, field, probes, cfg.grid, with_K=True)
        estimates.append(est)
        write_summary(out_dir / (Path(path).stem + "_summary.csv"), est)
    pooled = SummaryEstimate(
        cfg.grid,
        np.nanmean([e.F for e in estimates], axis=0),
        np.nanmean([e.G for e in estimates], axis=0),
        np.nanmean([e.J for e in estimates], axis=0),
        np.nanmean([e.K for e in estimates], axis=0),
        np.sum([e.n_centers for e in estimates], axis=0),
        np.sum([e.n_probes for e in estimates], axis=0),
        {"pooled_over": len(estimates)},
    )
    write_summary(out_dir / "pooled_summary.csv", pooled)
    return pooled


def run_envelope(cfg: ExperimentConfig, out_dir) -> dict:
    """Monte Carlo envelope of the configured statistic under the model."""
    if not cfg.envelope_opts:
        raise ConfigError("config has no envelope block")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    statistic = cfg.envelope_opts.get("statistic", "J")
    alpha = cfg.envelope_opts.get("alpha", 0.05)
    field = estimation_field(cfg)
    probes = probe_lattice(cfg.window, cfg.probe_shape)
    lo, hi = envelope(
        lambda s: simulate_replicate(cfg, s)["pattern"],
        statistic,
        cfg.envelope_opts["n_sim"],
        field,
        probes,
        cfg.grid,
        cfg.seed,
        alpha=alpha,
    )
    write_envelope(out_dir / "envelope.csv", cfg.grid, lo, hi)
    defined = ~(np.isnan(lo) | np.isnan(hi))
    covers_one = defined & (lo <= 1.0) & (1.0 <= hi)
    coverage = float(covers_one.sum() / max(defined.sum(), 1))
    verdict = {
        "statistic": statistic,
        "alpha": alpha,
        "n_sim": cfg.envelope_opts["n_sim"],
        "defined_cells": int(defined.sum()),
        "coverage_of_one": coverage,
    }
    (out_dir / "verdict.json").write_text(json.dumps(verdict, indent=1))
    return verdict


def preset_config(name: str, n_replicates: int = 1, seed: int = 20260824) -> dict:
    """One of the reference experiment configurations on the unit cube."""
    base = {
        "window": {"spatial": [[0.0, 1.0], [0.0, 1.0]], "time": [0.0, 1.0]},
        "r_grid": {"step": 0.005, "n": 20},
        "t_grid": {"step": 0.005, "n": 20},
        "probe_grid": [20, 20, 20],
        "n_replicates": n_replicates,
        "seed": seed,
        "envelope": {"n_sim": 99, "alpha": 0.05, "statistic": "J"},
    }
    decay = {"kind": "log_linear", "A": 750.0, "b": [0.0, -1.5], "c": -1.5}
    if name == "poisson_paper":
        base["model"] = {"model": "poisson", "intensity": decay}
    elif name == "hardcore_paper":
        base["model"] = {
            "model": "thinned_hardcore",
            "beta": 1300.0,
            "R_S": 0.05,
            "R_T": 0.05,
            "mcmc_steps": 1_000_000,
            "torus": True,
            "retention": {"kind": "log_linear", "A": 1.0, "b": [0.0, -1.5], "c": -1.5},
        }
    elif name == "lgcp_paper":
        sigma2 = 0.25 * 0.25
        base["model"] = {
            "model": "lgcp",
            "mu": {"m0": float(np.log(750.0) - sigma2 / 2.0), "b": [0.0, -1.5], "c": -1.5},
            "covariance": {
                "kind": "separable_mult",
                "spatial": {"var": 0.25, "delta": 2.0},
                "temporal": {"var": 0.25, "delta": 1.0},
            },
            "grid": [32, 32, 32],
        }
    else:
        raise ConfigError(f"unknown preset {name!r}")
    return base


PRESETS = ("poisson_paper", "hardcore_paper", "lgcp_paper")
