import numpy as np
import pytest
from numpy.testing import assert_allclose

from mwarp import QSphere, Sphere
from mwarp.datasets import (
    Dataset,
    contour_sequence_dataset,
    migration_dataset,
    random_smooth_warp,
    random_trajectory_recipe,
    se2_intersection_dataset,
    synth_warp,
    warped_copies,
)

from conftest import all_geometries

s2 = Sphere()


class TestSynthWarp:
    def test_invariants_over_many_seeds(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            kind = ("fast-slow", "slow-fast", "stop-and-go")[int(rng.integers(3))]
            g = synth_warp(60, kind=kind, strength=float(rng.uniform(0.05, 0.95)), seed=rng)
            assert g.values[0] == 0.0 and g.values[-1] == 1.0
            assert np.all(np.diff(g.values) >= -1e-15)

    def test_small_strength_approaches_identity(self):
        for kind in ("fast-slow", "slow-fast", "stop-and-go"):
            g = synth_warp(80, kind=kind, strength=0.01, seed=4)
            assert np.max(np.abs(g.values - g.times)) <= 0.02

    def test_exponential_convexity(self):
        # the sign of the exponent fixes the convexity of the warp
        fs = synth_warp(100, "fast-slow", 0.6)
        sf = synth_warp(100, "slow-fast", 0.6)
        assert np.all(np.diff(fs.values, 2) >= -1e-12)  # convex
        assert np.all(np.diff(sf.values, 2) <= 1e-12)  # concave

    def test_stop_and_go_has_plateaus(self):
        g = synth_warp(200, "stop-and-go", 0.9, seed=1)
        dgamma = np.diff(g.values) * 199
        assert np.min(dgamma) < 0.2
        assert np.max(dgamma) > 1.0

    def test_bad_inputs_rejected(self):
        with pytest.raises(ValueError):
            synth_warp(50, "stop-and-go", 1.5)
        with pytest.raises(ValueError):
            synth_warp(50, "sideways", 0.5)


class TestRandomSmoothWarp:
    def test_diffeomorphic_slopes(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            g = random_smooth_warp(100, rng)
            d = np.diff(g.values) * 99
            assert np.all(d > 0.2)
            assert np.all(d < 2.0)


class TestTrajectoryRecipe:
    def test_resolution_refinement_consistency(self, rng):
        for man in all_geometries():
            recipe = random_trajectory_recipe(man, rng)
            coarse = recipe(20)
            fine = recipe(39)
            # every second sample of the 39-grid hits the 20-grid times
            for i in range(20):
                assert man._dist(coarse.values[i], fine.values[2 * i]) <= 1e-12

    def test_warped_sampling_matches_composition(self, rng):
        recipe = random_trajectory_recipe(s2, rng)
        g = synth_warp(50, "fast-slow", 0.4)
        direct = recipe.warped(g, 50)
        manual = recipe.path_at(g(np.linspace(0, 1, 50)))
        assert_allclose(direct.values, manual.values)

    def test_stays_in_safe_ball(self, rng):
        for man in all_geometries():
            recipe = random_trajectory_recipe(man, rng, scale=1.0)
            traj = recipe(40)
            c = man.default_reference()
            for x in traj.values:
                assert man._dist(x, c.coords) < 0.8 * np.pi


class TestScenarioDatasets:
    def test_warped_copies_share_geometry(self, rng):
        recipe = random_trajectory_recipe(s2, rng)
        data = warped_copies(recipe, 7, 30, seed=1)
        assert len(data) == 7
        assert data.ids[0] == "original"
        assert data.n_samples == 30

    def test_migration_dataset_shape(self):
        data = migration_dataset(seed=0, n_tracks=5, n_samples=40)
        assert len(data) == 5
        assert data.manifold.name == "s2"
        # tracks go from the northern to the southern hemisphere
        for t in data.trajectories:
            assert t.values[0][2] > 0.4
            assert t.values[-1][2] < -0.2

    def test_se2_dataset_composition(self):
        data = se2_intersection_dataset(seed=0, n_samples=50)
        assert len(data) == 14
        assert data.manifold.name == "se2"
        counts = {lab: data.labels.count(lab) for lab in set(data.labels)}
        assert counts == {"right": 5, "straight": 5, "left": 4}

    def test_contour_dataset_composition(self):
        data = contour_sequence_dataset(seed=0, n_classes=2, per_class=3, n_samples=9)
        assert len(data) == 6
        assert data.manifold.name == "qsphere"
        assert data.n_samples == 9
        assert isinstance(data.manifold, QSphere)

    def test_dataset_validation(self, rng):
        recipe = random_trajectory_recipe(s2, rng)
        trajs = [recipe(20), recipe(20)]
        with pytest.raises(ValueError):
            Dataset(manifold=s2, trajectories=trajs, ids=["only-one"])
        with pytest.raises(ValueError):
            Dataset(manifold=s2, trajectories=trajs, ids=["a", "b"], labels=["x"])

    def test_dataset_subset(self, rng):
        data = warped_copies(random_trajectory_recipe(s2, rng), 5, 20, seed=2)
        sub = data.subset([0, 2])
        assert len(sub) == 2
        assert sub.ids == [data.ids[0], data.ids[2]]
