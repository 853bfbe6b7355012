import numpy as np
import pytest

from stpp_lab import (
    ConstantIntensity,
    CovarianceModel,
    HardCoreSpec,
    LogLinearIntensity,
    PowerExponential,
    RetentionFunction,
    Window,
    chain_is_stationary,
    simulate_hardcore,
    simulate_hardcore_chain,
    simulate_lgcp,
    simulate_poisson,
    thin_pattern,
)
from stpp_lab.geometry import GridGeometry

UNIT = Window([[0, 1], [0, 1]], (0, 1))
DECAY = LogLinearIntensity(750.0, [0.0, -1.5], -1.5)


class TestPoisson:
    def test_deterministic_in_seed(self):
        a = simulate_poisson(DECAY, UNIT, 4)
        b = simulate_poisson(DECAY, UNIT, 4)
        np.testing.assert_array_equal(a.space, b.space)
        np.testing.assert_array_equal(a.time, b.time)
        assert len(simulate_poisson(DECAY, UNIT, 5)) != len(a) or not np.array_equal(
            simulate_poisson(DECAY, UNIT, 5).space, a.space
        )

    def test_count_mean_matches_intensity_measure(self):
        counts = [len(simulate_poisson(DECAY, UNIT, s)) for s in range(200)]
        mean = np.mean(counts)
        mu = DECAY.integral(UNIT)
        se = np.sqrt(mu / len(counts))
        assert abs(mean - mu) < 4 * se

    def test_homogeneous_count_distribution(self):
        f = ConstantIntensity(50.0)
        counts = np.array([len(simulate_poisson(f, UNIT, s)) for s in range(300)])
        assert abs(counts.mean() - 50.0) < 4 * np.sqrt(50.0 / 300)
        # Poisson: variance == mean
        assert abs(counts.var(ddof=1) - 50.0) < 0.35 * 50.0

    def test_thinning_profile(self):
        # more mass where the intensity is high: compare the two halves in t
        p = simulate_poisson(DECAY, UNIT, 11)
        early = np.sum(p.time < 0.5)
        late = len(p) - early
        assert early > late

    def test_empty_window_intensity_ok(self):
        f = ConstantIntensity(1e-6)
        p = simulate_poisson(f, UNIT, 0)
        assert len(p) == 0


class TestThinning:
    def test_retention_validation(self):
        bad = RetentionFunction(ConstantIntensity(1.5))
        with pytest.raises(ValueError):
            bad.validate(UNIT)
        with pytest.raises(ValueError):
            bad.p_bar(UNIT)

    def test_p_bar_positive(self):
        ret = RetentionFunction(LogLinearIntensity(1.0, [0.0, -1.5], -1.5))
        assert ret.p_bar(UNIT) == pytest.approx(np.exp(-3.0))
        ret.validate(UNIT)

    def test_thinning_rate(self):
        ret = RetentionFunction(ConstantIntensity(0.3))
        base = simulate_poisson(ConstantIntensity(400.0), UNIT, 1)
        kept = [len(thin_pattern(base, ret, s)) for s in range(100)]
        want = 0.3 * len(base)
        se = np.sqrt(len(base) * 0.3 * 0.7 / 100)
        assert abs(np.mean(kept) - want) < 4 * se

    def test_thinned_points_subset(self):
        ret = RetentionFunction(LogLinearIntensity(1.0, [0.0, -1.5], -1.5))
        base = simulate_poisson(ConstantIntensity(200.0), UNIT, 2)
        sub = thin_pattern(base, ret, 3)
        base_set = {tuple(x) + (t,) for x, t in zip(map(tuple, base.space), base.time)}
        for x, t in zip(sub.space, sub.time):
            assert tuple(x) + (t,) in base_set


SPEC_SMALL = HardCoreSpec(beta=300.0, R_S=0.05, R_T=0.05, mcmc_steps=200_000)


def min_separations(p, torus=True):
    """Smallest pairwise (spatial, temporal) separations among violating pairs."""
    n = len(p)
    ds = np.linalg.norm(p.space[:, None, :] - p.space[None, :, :], axis=-1)
    dt = np.abs(p.time[:, None] - p.time[None, :])
    if torus:
        dx = np.abs(p.space[:, None, 0] - p.space[None, :, 0])
        dy = np.abs(p.space[:, None, 1] - p.space[None, :, 1])
        dx = np.minimum(dx, 1 - dx)
        dy = np.minimum(dy, 1 - dy)
        ds = np.sqrt(dx**2 + dy**2)
        dt = np.minimum(dt, 1 - dt)
    iu = np.triu_indices(n, k=1)
    return ds[iu], dt[iu]


class TestHardCore:
    def test_no_violating_pairs(self):
        p = simulate_hardcore(SPEC_SMALL, UNIT, 0)
        ds, dt = min_separations(p)
        viol = (ds <= SPEC_SMALL.R_S) & (dt <= SPEC_SMALL.R_T)
        assert not np.any(viol)

    def test_deterministic_in_seed(self):
        a = simulate_hardcore(SPEC_SMALL, UNIT, 42)
        b = simulate_hardcore(SPEC_SMALL, UNIT, 42)
        np.testing.assert_array_equal(a.space, b.space)
        np.testing.assert_array_equal(a.time, b.time)

    def test_interaction_suppresses_intensity(self):
        # lambda_hat < beta: the exclusion rule can only delete mass
        counts = [len(simulate_hardcore(SPEC_SMALL, UNIT, s)) for s in range(5)]
        assert max(counts) < SPEC_SMALL.beta

    def test_free_limit_recovers_poisson_rate(self):
        # vanishing radii: birth-death chain targets Poisson(beta)
        spec = HardCoreSpec(beta=60.0, R_S=1e-9, R_T=1e-9, mcmc_steps=200_000)
        counts = np.array([len(simulate_hardcore(spec, UNIT, s)) for s in range(30)])
        assert abs(counts.mean() - 60.0) < 4 * np.sqrt(60.0 / 30)

    def test_trace_and_stationarity(self):
        p, trace = simulate_hardcore_chain(SPEC_SMALL, UNIT, 3)
        assert trace[0] <= 1  # chain starts empty; step 0 can add one birth
        assert len(p) <= trace.max() + 1
        assert chain_is_stationary(trace)

    def test_stationarity_rejects_trend(self):
        assert not chain_is_stationary(np.arange(100.0))
        assert chain_is_stationary(np.full(100, 7.0) + np.sin(np.arange(100)))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            HardCoreSpec(beta=-1.0, R_S=0.1, R_T=0.1)
        with pytest.raises(ValueError):
            HardCoreSpec(beta=1.0, R_S=0.1, R_T=0.1, mcmc_steps=0)


COV = CovarianceModel(
    "separable_mult", PowerExponential(0.25, 2.0), PowerExponential(0.25, 1.0)
)


class TestLgcp:
    GEOM = GridGeometry(16, 16, 16, UNIT)

    def mu(self, sp, tm):
        return np.log(200.0) - COV.variance / 2.0 + 0.0 * tm

    def test_deterministic_in_seed(self):
        a, fa = simulate_lgcp(self.mu, COV, self.GEOM, UNIT, 5)
        b, fb = simulate_lgcp(self.mu, COV, self.GEOM, UNIT, 5)
        np.testing.assert_array_equal(a.space, b.space)
        np.testing.assert_array_equal(fa.values, fb.values)

    def test_mean_count(self):
        # E N = exp(m0 + sigma^2/2) * volume = 200
        counts = [len(simulate_lgcp(self.mu, COV, self.GEOM, UNIT, s)[0]) for s in range(60)]
        # Cox overdispersion inflates the count variance well beyond Poisson
        assert abs(np.mean(counts) - 200.0) < 25.0

    def test_overdispersion(self):
        counts = np.array(
            [len(simulate_lgcp(self.mu, COV, self.GEOM, UNIT, s)[0]) for s in range(60)]
        )
        assert counts.var(ddof=1) > 1.5 * counts.mean()

    def test_points_in_window(self):
        p, _ = simulate_lgcp(self.mu, COV, self.GEOM, UNIT, 8)
        assert np.all((p.space >= 0) & (p.space <= 1))
        assert np.all((p.time >= 0) & (p.time <= 1))

    def test_requires_separable(self):
        sup = CovarianceModel("power_exponential_sup", PowerExponential(1.0, 1.0))
        with pytest.raises(ValueError):
            simulate_lgcp(self.mu, sup, self.GEOM, UNIT, 0)

    def test_window_mismatch_rejected(self):
        other = Window([[0, 2], [0, 1]], (0, 1))
        with pytest.raises(ValueError):
            simulate_lgcp(self.mu, COV, self.GEOM, other, 0)
