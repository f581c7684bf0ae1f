import numpy as np
import pytest
from numpy.testing import assert_allclose

from mwarp import (
    CutLocusError,
    MismatchedReferenceError,
    Sphere,
    Trajectory,
    Warp,
    compute_tsrvf,
    dh,
    reconstruct,
    warp_action,
    warp_trajectory,
)
from mwarp.datasets import random_smooth_warp, random_trajectory_recipe
from mwarp.tsrvf import trajectory_velocity

from conftest import all_geometries

s2 = Sphere()
NORTH = s2.point([0, 0, 1])


def unit_speed_arc(T):
    t = np.linspace(0, 1, T)
    return Trajectory(s2, np.stack([np.cos(t), np.sin(t), np.zeros(T)], axis=1))


def constant_trajectory(T=20):
    return Trajectory(s2, np.tile([1.0, 0.0, 0.0], (T, 1)))


class TestComputeTsrvf:
    def test_constant_trajectory_gives_zero_field(self):
        h = compute_tsrvf(constant_trajectory(), NORTH)
        assert_allclose(h.values, 0.0)

    def test_unit_speed_arc_has_unit_norms(self):
        h = compute_tsrvf(unit_speed_arc(60), NORTH)
        norms = [h.vector(i).norm() for i in range(60)]
        assert_allclose(norms, 1.0, atol=1e-10)

    def test_norm_relation_random(self, rng):
        for man in all_geometries():
            traj = random_trajectory_recipe(man, rng)(40)
            c = man.default_reference()
            h = compute_tsrvf(traj, c)
            vels = trajectory_velocity(traj)
            for i in range(40):
                assert h.vector(i).norm() ** 2 == pytest.approx(
                    vels[i].norm(), abs=1e-9
                )

    def test_cut_locus_reports_index(self):
        # third sample sits at the antipode of the reference point
        vals = np.array(
            [[np.sin(0.2), 0, -np.cos(0.2)], [np.sin(0.1), 0, -np.cos(0.1)], [0.0, 0, -1.0]]
        )
        traj = Trajectory(s2, vals)
        with pytest.raises(CutLocusError) as err:
            compute_tsrvf(traj, NORTH)
        assert err.value.index == 2


class TestReconstruct:
    def test_zero_field_stays_put(self):
        h = compute_tsrvf(constant_trajectory(), NORTH)
        rec = reconstruct(s2.point([1, 0, 0]), h)
        assert_allclose(rec.values, constant_trajectory().values)

    def test_initial_condition_exact(self, rng):
        traj = random_trajectory_recipe(s2, rng)(50)
        rec = reconstruct(traj.start, compute_tsrvf(traj, NORTH))
        assert_allclose(rec.values[0], traj.values[0])

    def test_round_trip_converges_first_order(self, rng):
        recipe = random_trajectory_recipe(s2, rng, scale=1.0)
        errs = {}
        for T in (200, 400):
            traj = recipe(T)
            rec = reconstruct(traj.start, compute_tsrvf(traj, NORTH))
            errs[T] = max(
                s2._dist(a, b) for a, b in zip(traj.values, rec.values)
            )
        assert errs[200] <= 5e-2
        assert errs[400] <= 0.62 * errs[200]


class TestDh:
    def test_zero_on_equal_and_symmetry(self, rng):
        traj1 = random_trajectory_recipe(s2, rng)(30)
        traj2 = random_trajectory_recipe(s2, rng)(30)
        h1, h2 = compute_tsrvf(traj1, NORTH), compute_tsrvf(traj2, NORTH)
        assert dh(h1, h1) == 0.0
        assert dh(h1, h2) == dh(h2, h1)
        assert dh(h1, h2) > 0.0

    def test_mismatched_reference_rejected(self, rng):
        traj = random_trajectory_recipe(s2, rng)(30)
        h1 = compute_tsrvf(traj, NORTH)
        h2 = compute_tsrvf(traj, s2.point([1, 0, 0]))
        with pytest.raises(MismatchedReferenceError):
            dh(h1, h2)

    def test_mismatched_grid_rejected(self, rng):
        recipe = random_trajectory_recipe(s2, rng)
        with pytest.raises(ValueError):
            dh(compute_tsrvf(recipe(30), NORTH), compute_tsrvf(recipe(31), NORTH))


class TestWarpAction:
    def test_identity_returns_same_object(self, rng):
        h = compute_tsrvf(random_trajectory_recipe(s2, rng)(40), NORTH)
        assert warp_action(h, Warp.identity(40)) is h

    def test_l2_norm_preserved_up_to_discretization(self, rng):
        recipe = random_trajectory_recipe(s2, rng, scale=1.0)
        errs = {}
        for T in (100, 200):
            h = compute_tsrvf(recipe(T), NORTH)
            g = random_smooth_warp(T, np.random.default_rng(3))
            errs[T] = abs(warp_action(h, g).norm() - h.norm()) / h.norm()
        assert errs[100] <= 2e-2
        assert errs[200] <= errs[100]

    def test_group_action_composition(self, rng):
        T = 200
        h = compute_tsrvf(random_trajectory_recipe(s2, rng, scale=1.0)(T), NORTH)
        g1 = random_smooth_warp(T, np.random.default_rng(1), intensity=0.4)
        g2 = random_smooth_warp(T, np.random.default_rng(2), intensity=0.4)
        lhs = warp_action(warp_action(h, g1), g2)
        rhs = warp_action(h, g1.compose(g2))
        assert dh(lhs, rhs) <= 0.05 * h.norm()


class TestWarpTrajectory:
    def test_identity_returns_same_object(self, rng):
        traj = random_trajectory_recipe(s2, rng)(40)
        assert warp_trajectory(traj, Warp.identity(40)) is traj

    def test_endpoints_preserved(self, rng):
        traj = random_trajectory_recipe(s2, rng)(50)
        g = random_smooth_warp(50, rng)
        out = warp_trajectory(traj, g)
        assert_allclose(out.values[0], traj.values[0])
        assert_allclose(out.values[-1], traj.values[-1])

    def test_outputs_on_geodesic_segments(self, rng):
        traj = random_trajectory_recipe(s2, rng, scale=1.0)(30)
        g = random_smooth_warp(30, rng)
        out = warp_trajectory(traj, g)
        pos = g.values * 29
        idx = np.clip(np.floor(pos).astype(int), 0, 28)
        for k in range(30):
            i = idx[k]
            a = s2._dist(out.values[k], traj.values[i])
            b = s2._dist(out.values[k], traj.values[i + 1])
            ab = s2._dist(traj.values[i], traj.values[i + 1])
            assert a + b == pytest.approx(ab, abs=1e-9)


class TestIsometry:
    def test_simultaneous_warping_preserves_dh(self, rng):
        # Gamma acts on the TSRVF space by isometries; the discretized
        # action should preserve dh to within O(1/T^2)
        for man in all_geometries():
            rel = {}
            r1 = random_trajectory_recipe(man, rng, scale=0.9)
            r2 = random_trajectory_recipe(man, rng, scale=0.9)
            g_rng = np.random.default_rng(7)
            for T in (100, 200):
                g = random_smooth_warp(T, np.random.default_rng(11))
                c = man.default_reference()
                h1, h2 = compute_tsrvf(r1(T), c), compute_tsrvf(r2(T), c)
                base = dh(h1, h2)
                warped = dh(warp_action(h1, g), warp_action(h2, g))
                rel[T] = abs(warped - base) / base
            assert rel[100] <= 2e-2, man.name
            assert rel[200] <= rel[100] + 1e-12, man.name


class TestEuclideanReduction:
    def test_translation_factor_matches_srvf(self):
        # with identity rotations, SE(2) transport is trivial on the
        # translation block, so the TSRVF must equal the plain square-root
        # velocity function of the planar curve
        from mwarp import SpecialEuclidean2

        se2 = SpecialEuclidean2()
        T = 40
        t = np.linspace(0, 1, T)
        xy = np.stack([t**2 + 0.5 * t, 0.3 * np.sin(2 * t)], axis=1)
        vals = np.stack([se2.from_pose(0.0, x, y) for x, y in xy])
        traj = Trajectory(se2, vals)
        h = compute_tsrvf(traj, se2.default_reference())

        # independent SRVF oracle on the raw planar samples
        dt = 1.0 / (T - 1)
        vel = np.empty_like(xy)
        vel[0] = (xy[1] - xy[0]) / dt
        vel[-1] = (xy[-1] - xy[-2]) / dt
        vel[1:-1] = (xy[2:] - xy[:-2]) / (2 * dt)
        speed = np.linalg.norm(vel, axis=1)
        srvf = vel / np.sqrt(speed)[:, None]

        assert_allclose(h.values[:, 2, :], srvf, atol=1e-10)
        assert_allclose(h.values[:, :2, :], 0.0, atol=1e-12)
