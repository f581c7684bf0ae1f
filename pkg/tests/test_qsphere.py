import numpy as np
import pytest
from numpy.testing import assert_allclose

from mwarp import DegenerateCurveError, PlanarCurve, QSphere, rotation_align
from mwarp.manifolds.qsphere import resample_closed_curve


def circle(n=200, radius=1.0, center=(0.0, 0.0)):
    s = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.stack([center[0] + radius * np.cos(s), center[1] + radius * np.sin(s)], axis=1)


def ellipse(n=200, a=1.0, b=0.6):
    s = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.stack([a * np.cos(s), b * np.sin(s)], axis=1)


class TestQFunction:
    qs = QSphere(n_points=100)

    def test_unit_circle_q_is_tangent_field(self):
        # unit-length circle has |beta'| = 1, so q equals the unit tangent
        q = self.qs.q_function(circle(radius=1.0 / (2 * np.pi)))
        s = np.arange(100) / 100.0
        expected = np.stack([-np.sin(2 * np.pi * s), np.cos(2 * np.pi * s)], axis=1)
        # the resampled curve starts at the same point, so phases agree
        assert np.max(np.linalg.norm(q.coords - expected, axis=1)) < 5e-3

    def test_unit_norm_postcondition(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            pts = circle(radius=rng.uniform(0.2, 3.0)) + rng.normal(0, 0.02, (200, 2))
            q = self.qs.q_function(pts)
            assert abs(np.sqrt(np.sum(q.coords**2) / 100.0) - 1.0) <= 1e-8

    def test_translation_invariance(self):
        base = ellipse()
        q1 = self.qs.q_function(base)
        q2 = self.qs.q_function(base + np.array([5.0, 7.0]))
        assert_allclose(q1.coords, q2.coords, atol=1e-10)

    def test_scale_invariance(self):
        base = ellipse()
        q1 = self.qs.q_function(base)
        q2 = self.qs.q_function(3.7 * base)
        assert np.max(np.abs(q1.coords - q2.coords)) <= 1e-8

    def test_degenerate_curve_raises(self):
        pts = np.tile([[1.0, 2.0]], (20, 1))
        with pytest.raises(DegenerateCurveError):
            self.qs.q_function(pts)

    def test_default_reference_is_circle_q(self):
        ref = self.qs.default_reference()
        q = self.qs.q_function(circle())
        assert self.qs.dist(ref, q) < 2e-3

    def test_discretization_convergence(self):
        # distance between two fixed analytic shapes, refined grids
        errs = []
        prev = None
        for n in (50, 100, 200, 400):
            qs = QSphere(n_points=n)
            d = qs.dist(qs.q_function(circle(800)), qs.q_function(ellipse(800)))
            if prev is not None:
                errs.append(abs(d - prev))
            prev = d
        assert errs[1] < errs[0]
        assert errs[1] < 2.0 * errs[0] * (50 / 100)  # about O(1/n)


class TestPreShapeSphere:
    qs = QSphere(n_points=64)

    def test_antipodal_distance(self):
        q = self.qs.q_function(ellipse())
        minus = self.qs.point(-q.coords)
        assert_allclose(self.qs.dist(q, minus), np.pi)

    def test_self_distance_and_transport(self):
        q = self.qs.q_function(ellipse())
        assert self.qs.dist(q, q) == 0.0
        rng = np.random.default_rng(0)
        v = self.qs.random_tangent(q, rng)
        assert_allclose(self.qs.transport(v, q, q).components, v.components)


class TestRotationAlign:
    qs = QSphere(n_points=80)

    def rotated(self, pts, theta):
        c, s = np.cos(theta), np.sin(theta)
        return pts @ np.array([[c, -s], [s, c]]).T

    def test_identity_on_equal(self):
        q = self.qs.q_function(ellipse())
        R, aligned = rotation_align(q, q)
        assert_allclose(R, np.eye(2), atol=1e-10)
        assert self.qs.dist(q, aligned) <= 1e-10

    def test_recovers_rotation(self):
        base = ellipse()
        q1 = self.qs.q_function(base)
        theta = 0.8
        q2 = self.qs.q_function(self.rotated(base, theta))
        R, aligned = rotation_align(q1, q2)
        assert_allclose(R, self.rotated(np.eye(2), -theta).T @ np.eye(2), atol=1e-6)
        assert self.qs.dist(q1, aligned) <= 1e-6

    def test_never_increases_distance(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = ellipse(a=rng.uniform(0.7, 1.3), b=rng.uniform(0.4, 0.9))
            b = self.rotated(ellipse(a=1.1, b=0.5), rng.uniform(-np.pi, np.pi))
            q1, q2 = self.qs.q_function(a), self.qs.q_function(b)
            _, aligned = rotation_align(q1, q2)
            assert self.qs.dist(q1, aligned) <= self.qs.dist(q1, q2) + 1e-12

    def test_rejects_reflection(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = ellipse(a=rng.uniform(0.8, 1.2), b=rng.uniform(0.3, 0.7))
            b = circle() + rng.normal(0, 0.05, (200, 2))
            R, _ = rotation_align(self.qs.q_function(a), self.qs.q_function(b))
            assert np.linalg.det(R) > 0.999


class TestResampling:
    def test_uniform_spacing(self):
        pts = resample_closed_curve(ellipse(37), 64)
        closed = np.vstack([pts, pts[:1]])
        seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
        assert np.std(seg) / np.mean(seg) < 0.05

    def test_consecutive_duplicates_removed(self):
        pts = np.repeat(circle(40), 3, axis=0)
        out = resample_closed_curve(pts, 32)
        assert np.all(np.linalg.norm(np.diff(out, axis=0), axis=1) > 1e-12)

    def test_curve_type_validation(self):
        with pytest.raises(ValueError):
            PlanarCurve(np.zeros((4, 2)))
        with pytest.raises(ValueError):
            PlanarCurve(np.full((20, 2), np.nan))
