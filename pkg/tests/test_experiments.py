import json

import numpy as np
import pytest

from stpp_lab import experiments
from stpp_lab.experiments import (
    ConfigError,
    default_jobs,
    estimation_field,
    load_config,
    preset_config,
    replicate_seeds,
    run_envelope,
    run_estimate,
    run_simulate,
    simulate_replicate,
)
from stpp_lab.patternio import read_pattern, read_summary


def tiny_poisson_config(seed=7, n_replicates=3):
    return {
        "model": {
            "model": "poisson",
            "intensity": {"kind": "log_linear", "A": 120.0, "b": [0.0, -1.5], "c": -1.5},
        },
        "window": {"spatial": [[0.0, 1.0], [0.0, 1.0]], "time": [0.0, 1.0]},
        "r_grid": [0.05, 0.1],
        "t_grid": [0.05, 0.1],
        "probe_grid": [6, 6, 6],
        "n_replicates": n_replicates,
        "seed": seed,
        "envelope": {"n_sim": 20, "alpha": 0.05, "statistic": "J"},
    }


class TestConfigParsing:
    def test_valid_round_trip(self):
        cfg = load_config(tiny_poisson_config())
        assert cfg.n_replicates == 3
        assert cfg.seed == 7
        assert cfg.probe_shape == (6, 6, 6)
        np.testing.assert_allclose(cfg.grid.r, [0.05, 0.1])

    def test_file_source(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(tiny_poisson_config()))
        cfg = load_config(path)
        assert cfg.seed == 7

    def test_unknown_top_level_key(self):
        raw = tiny_poisson_config()
        raw["typo"] = 1
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_missing_required_key(self):
        raw = tiny_poisson_config()
        del raw["seed"]
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_unknown_model(self):
        raw = tiny_poisson_config()
        raw["model"] = {"model": "strauss"}
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_unknown_intensity_kind(self):
        raw = tiny_poisson_config()
        raw["model"]["intensity"]["kind"] = "spline"
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_grid_must_fit_window(self):
        raw = tiny_poisson_config()
        raw["r_grid"] = [0.6]
        with pytest.raises(Exception):
            load_config(raw)

    def test_envelope_nsim_floor(self):
        raw = tiny_poisson_config()
        raw["envelope"]["n_sim"] = 5
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_step_grid_expansion(self):
        raw = tiny_poisson_config()
        raw["r_grid"] = {"step": 0.01, "n": 4}
        cfg = load_config(raw)
        np.testing.assert_allclose(cfg.grid.r, [0.01, 0.02, 0.03, 0.04])

    def test_discontinuous_covariance_rejected(self):
        raw = preset_config("lgcp_paper")
        raw["model"]["covariance"]["spatial"]["delta"] = 3.0
        with pytest.raises(ConfigError):
            load_config(raw)

    def test_hash_depends_on_content(self):
        a = load_config(tiny_poisson_config(seed=1))
        b = load_config(tiny_poisson_config(seed=2))
        assert a.config_hash != b.config_hash
        assert a.config_hash == load_config(tiny_poisson_config(seed=1)).config_hash


class TestPresets:
    @pytest.mark.parametrize("name", experiments.PRESETS)
    def test_presets_validate(self, name):
        cfg = load_config(preset_config(name))
        assert cfg.window.volume == pytest.approx(1.0)
        estimation_field(cfg)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            preset_config("nope")

    def test_lgcp_estimation_field_amplitude(self):
        # exp(m0 + sigma^2/2) must cancel the preset's lognormal offset
        cfg = load_config(preset_config("lgcp_paper"))
        field = estimation_field(cfg)
        assert field.amplitude == pytest.approx(750.0)


class TestReplicateMachinery:
    def test_seed_spawning_stable(self):
        a = replicate_seeds(5, 3)
        b = replicate_seeds(5, 3)
        for s1, s2 in zip(a, b):
            assert np.random.default_rng(s1).integers(1 << 30) == np.random.default_rng(
                s2
            ).integers(1 << 30)

    def test_simulate_replicate_deterministic(self):
        cfg = load_config(tiny_poisson_config())
        seed = replicate_seeds(cfg.seed, 1)[0]
        a = simulate_replicate(cfg, seed)["pattern"]
        seed2 = replicate_seeds(cfg.seed, 1)[0]
        b = simulate_replicate(cfg, seed2)["pattern"]
        np.testing.assert_array_equal(a.space, b.space)

    def test_default_jobs_env(self, monkeypatch):
        monkeypatch.delenv("STPP_LAB_JOBS", raising=False)
        assert default_jobs() == 1
        monkeypatch.setenv("STPP_LAB_JOBS", "3")
        assert default_jobs() == 3
        assert default_jobs(2) == 2


class TestRunners:
    def test_simulate_writes_patterns_and_manifest(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        manifest = run_simulate(cfg, tmp_path)
        assert manifest["status"] == "done"
        assert len(manifest["outputs"]) == 3
        on_disk = json.loads((tmp_path / "manifest.json").read_text())
        assert on_disk["config_hash"] == cfg.config_hash
        p = read_pattern(tmp_path / "pattern_0000.csv")
        assert p.window.volume == pytest.approx(1.0)

    def test_parallel_matches_serial(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        run_simulate(cfg, tmp_path / "serial", jobs=1)
        run_simulate(cfg, tmp_path / "par", jobs=2)
        for i in range(cfg.n_replicates):
            a = (tmp_path / "serial" / f"pattern_{i:04d}.csv").read_bytes()
            b = (tmp_path / "par" / f"pattern_{i:04d}.csv").read_bytes()
            assert a == b

    def test_rerun_byte_identical(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        run_simulate(cfg, tmp_path / "a")
        run_simulate(cfg, tmp_path / "b")
        assert (tmp_path / "a" / "pattern_0001.csv").read_bytes() == (
            tmp_path / "b" / "pattern_0001.csv"
        ).read_bytes()

    def test_estimate_writes_summaries(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        run_simulate(cfg, tmp_path)
        paths = sorted(tmp_path.glob("pattern_*.csv"))
        pooled = run_estimate(cfg, paths, tmp_path)
        assert (tmp_path / "pooled_summary.csv").exists()
        assert (tmp_path / "pattern_0000_summary.csv").exists()
        table = read_summary(tmp_path / "pooled_summary.csv")
        assert table["r"].size == cfg.grid.r.size * cfg.grid.t.size
        assert pooled.metadata["pooled_over"] == len(paths)

    def test_estimate_rejects_foreign_window(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        run_simulate(cfg, tmp_path)
        other = tiny_poisson_config()
        other["window"] = {"spatial": [[0.0, 2.0], [0.0, 1.0]], "time": [0.0, 1.0]}
        with pytest.raises(ConfigError):
            run_estimate(load_config(other), [tmp_path / "pattern_0000.csv"], tmp_path)

    def test_envelope_runner(self, tmp_path):
        cfg = load_config(tiny_poisson_config())
        verdict = run_envelope(cfg, tmp_path)
        assert (tmp_path / "envelope.csv").exists()
        assert (tmp_path / "verdict.json").exists()
        assert verdict["n_sim"] == 20
        assert 0.0 <= verdict["coverage_of_one"] <= 1.0

    def test_hardcore_writes_unthinned(self, tmp_path):
        raw = preset_config("hardcore_paper", n_replicates=1, seed=1)
        raw["model"]["beta"] = 100.0
        raw["model"]["mcmc_steps"] = 20_000
        cfg = load_config(raw)
        run_simulate(cfg, tmp_path)
        assert (tmp_path / "pattern_0000_unthinned.csv").exists()
        thin = read_pattern(tmp_path / "pattern_0000.csv")
        full = read_pattern(tmp_path / "pattern_0000_unthinned.csv")
        assert len(thin) <= len(full)
