import numpy as np
import pytest

from stpp_lab import (
    Cylinder,
    EmptyErosionError,
    GridGeometry,
    PointPattern,
    SpacetimePoint,
    Window,
    cylinder_contains,
    cylinder_volume,
    erode_window,
    restrict_pattern,
    sup_distance,
)


def pt(*coords):
    return SpacetimePoint(np.array(coords[:-1]), coords[-1])


UNIT = Window([[0, 1], [0, 1]], (0, 1))


class TestSupDistance:
    def test_identity(self):
        a = pt(0.3, 0.4, 0.5)
        assert sup_distance(a, a) == 0.0

    def test_spatial_dominates(self):
        assert sup_distance(pt(0, 0, 0), pt(3, 4, 1)) == 5.0

    def test_temporal_dominates(self):
        assert sup_distance(pt(0, 0, 0), pt(0.3, 0, 0.7)) == pytest.approx(0.7)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sup_distance(pt(0, 0, 0), SpacetimePoint(np.zeros(3), 0.0))

    def test_metric_axioms_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            a, b, c = (pt(*rng.normal(size=3)) for _ in range(3))
            dab = sup_distance(a, b)
            assert dab >= 0
            assert dab == sup_distance(b, a)
            assert dab <= sup_distance(a, c) + sup_distance(c, b) + 1e-12


class TestCylinder:
    def test_boundary_included(self):
        c = Cylinder(pt(0, 0, 0), 1.0, 1.0)
        assert cylinder_contains(c, pt(1, 0, 0))

    def test_spatial_norm_excludes(self):
        c = Cylinder(pt(0, 0, 0), 0.05, 0.05)
        assert not cylinder_contains(c, pt(0.05, 0.001, 0))

    def test_temporal_excludes(self):
        c = Cylinder(pt(0, 0, 0), 1.0, 1.0)
        assert not cylinder_contains(c, pt(0, 0, 1.0000001))

    def test_sup_ball_equals_cylinder_at_equal_radii(self):
        # B[0,r] membership in the sup metric coincides with the r=t cylinder
        rng = np.random.default_rng(7)
        center = pt(0, 0, 0)
        c = Cylinder(center, 0.8, 0.8)
        for _ in range(300):
            q = pt(*rng.uniform(-1, 1, size=3))
            assert cylinder_contains(c, q) == (sup_distance(center, q) <= 0.8)

    def test_volume_d2(self):
        assert cylinder_volume(2, 1, 1) == pytest.approx(2 * np.pi)
        assert cylinder_volume(2, 0.1, 0.1) == pytest.approx(2 * np.pi * 1e-3)

    def test_volume_degenerate(self):
        assert cylinder_volume(5, 0.0, 1.0) == 0.0

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_volume_matches_rejection_sampling(self, d):
        r, t = 0.7, 0.4
        rng = np.random.default_rng(d)
        n = 200_000
        x = rng.uniform(-r, r, size=(n, d))
        inside = np.linalg.norm(x, axis=1) <= r
        # temporal factor is exact; estimate the ball volume factor
        p_hat = inside.mean()
        box = (2 * r) ** d
        est = p_hat * box * 2 * t
        se = np.sqrt(p_hat * (1 - p_hat) / n) * box * 2 * t
        assert abs(est - cylinder_volume(d, r, t)) <= 3 * se


class TestErosion:
    def test_basic(self):
        w = erode_window(Window([[0, 1], [0, 1]], (0, 1)), 0.1, 0.2)
        np.testing.assert_allclose(w.spatial, [[0.1, 0.9], [0.1, 0.9]])
        np.testing.assert_allclose(w.time, [0.2, 0.8])

    def test_identity(self):
        w = erode_window(UNIT, 0.0, 0.0)
        np.testing.assert_array_equal(w.spatial, UNIT.spatial)

    def test_empty(self):
        with pytest.raises(EmptyErosionError):
            erode_window(UNIT, 0.5, 0.0)

    def test_composition(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            r1, r2 = rng.uniform(0, 0.2, size=2)
            t1, t2 = rng.uniform(0, 0.2, size=2)
            a = erode_window(erode_window(UNIT, r1, t1), r2, t2)
            b = erode_window(UNIT, r1 + r2, t1 + t2)
            np.testing.assert_allclose(a.spatial, b.spatial)
            np.testing.assert_allclose(a.time, b.time)


class TestPattern:
    def test_restrict_empty(self):
        p = PointPattern(np.empty((0, 2)), np.empty(0), UNIT)
        sub = restrict_pattern(p, erode_window(UNIT, 0.1, 0.1))
        assert len(sub) == 0

    def test_restrict_enumeration(self):
        p = PointPattern(
            [[0.5, 0.5], [0.05, 0.5], [0.5, 0.95]], [0.5, 0.5, 0.5], UNIT
        )
        sub = restrict_pattern(p, erode_window(UNIT, 0.2, 0.2))
        assert len(sub) == 1
        np.testing.assert_allclose(sub.space[0], [0.5, 0.5])

    def test_restrict_identity(self):
        p = PointPattern([[0.2, 0.3]], [0.4], UNIT)
        sub = restrict_pattern(p, UNIT)
        np.testing.assert_array_equal(sub.space, p.space)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            PointPattern([[0.5, 0.5], [0.5, 0.5]], [0.5, 0.5], UNIT)

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            PointPattern([[1.5, 0.5]], [0.5], UNIT)


class TestGridGeometry:
    def test_locate_tie_break_lower_cell(self):
        g = GridGeometry(4, 4, 4, UNIT)
        # 0.5 is the boundary between cells 1 and 2: lower index wins
        ix, iy, it = g.locate(np.array([[0.5, 0.1]]), np.array([0.5]))
        assert (ix[0], iy[0], it[0]) == (1, 0, 1)

    def test_nodes_are_cell_centres(self):
        g = GridGeometry(2, 2, 2, UNIT)
        xs, ys, ts = g.axis_nodes()
        np.testing.assert_allclose(xs, [0.25, 0.75])
        np.testing.assert_allclose(ts, [0.25, 0.75])

    def test_outside_raises(self):
        g = GridGeometry(4, 4, 4, UNIT)
        with pytest.raises(ValueError):
            g.locate(np.array([[1.2, 0.5]]), np.array([0.5]))
