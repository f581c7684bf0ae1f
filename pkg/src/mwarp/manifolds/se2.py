"""SE(2) = SO(2) x R^2 with a product metric.

Points are stored as a (3, 2) array: rows 0-1 hold the rotation matrix O,
row 2 the translation.  Tangent vectors use the same layout with rows 0-1
holding W = O A (A skew) and row 2 the translation velocity.  The metric is
``rotation_weight * trace(W1^T W2) + <u1, u2>``; the weight is configurable
because the data's rotation/translation units are application specific.
"""

import numpy as np

from ..exceptions import CutLocusError
from .base import Manifold

__all__ = ["SpecialEuclidean2"]

CUT_LOCUS_MARGIN = 1e-6

_J = np.array([[0.0, -1.0], [1.0, 0.0]])


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _angle(O):
    return float(np.arctan2(O[1, 0], O[0, 0]))


class SpecialEuclidean2(Manifold):
    """Planar rigid motions (position + heading)."""

    name = "se2"
    point_tol = 1e-10
    dim = 3

    def __init__(self, rotation_weight=1.0):
        if rotation_weight <= 0:
            raise ValueError("rotation_weight must be positive")
        self.rotation_weight = float(rotation_weight)

    @staticmethod
    def from_pose(theta, x, y):
        """Build the (3, 2) coordinate array from (heading, position)."""
        return np.vstack([_rot(theta), [x, y]])

    @staticmethod
    def to_pose(coords):
        return _angle(coords[:2]), float(coords[2, 0]), float(coords[2, 1])

    def _exp(self, x, v):
        O, t = x[:2], x[2]
        W, u = v[:2], v[2]
        A = O.T @ W
        omega = 0.5 * (A[1, 0] - A[0, 1])
        out = np.empty((3, 2))
        out[:2] = O @ _rot(omega)
        out[2] = t + u
        return out

    def _log(self, x, y):
        dtheta = self._relative_angle(x, y)
        out = np.empty((3, 2))
        out[:2] = dtheta * (x[:2] @ _J)
        out[2] = y[2] - x[2]
        return out

    def _relative_angle(self, x, y):
        dtheta = _angle(x[:2].T @ y[:2])
        if abs(dtheta) > np.pi - CUT_LOCUS_MARGIN:
            raise CutLocusError("relative rotation is (nearly) a half turn")
        return dtheta

    def _dist(self, x, y):
        if np.array_equal(x, y):
            return 0.0
        dtheta = _angle(x[:2].T @ y[:2])
        dt = y[2] - x[2]
        return np.sqrt(
            2.0 * self.rotation_weight * dtheta**2 + float(np.dot(dt, dt))
        )

    def _transport(self, v, x, y):
        # rotation part rebases by group translation: W -> O_y (O_x^T W);
        # the flat R^2 factor carries over unchanged
        out = np.empty((3, 2))
        out[:2] = y[:2] @ (x[:2].T @ v[:2])
        out[2] = v[2]
        return out

    def _inner(self, x, v, w):
        return self.rotation_weight * float(np.sum(v[:2] * w[:2])) + float(
            np.dot(v[2], w[2])
        )

    def _project_point(self, x):
        U, _, Vt = np.linalg.svd(x[:2])
        R = U @ Vt
        if np.linalg.det(R) < 0:
            R = U @ np.diag([1.0, -1.0]) @ Vt
        out = x.copy()
        out[:2] = R
        return out

    def _project_tangent(self, x, v):
        A = x[:2].T @ v[:2]
        A = 0.5 * (A - A.T)
        out = v.copy()
        out[:2] = x[:2] @ A
        return out

    def _point_violation(self, x):
        if x.shape != (3, 2):
            raise ValueError(f"SE(2) point must have shape (3, 2), got {x.shape}")
        O = x[:2]
        return max(
            float(np.abs(O.T @ O - np.eye(2)).max()),
            abs(float(np.linalg.det(O)) - 1.0),
        )

    def _tangent_violation(self, x, v):
        if v.shape != (3, 2):
            raise ValueError(f"SE(2) tangent must have shape (3, 2), got {v.shape}")
        A = x[:2].T @ v[:2]
        return 0.5 * float(np.abs(A + A.T).max())

    def _flatten(self, c, stacked):
        arr = np.asarray(stacked, dtype=float)
        rot = arr[:, :2, :].reshape(len(arr), 4) * np.sqrt(self.rotation_weight)
        return np.concatenate([rot, arr[:, 2, :]], axis=1)

    def _unflatten(self, c, flat):
        arr = np.asarray(flat, dtype=float)
        out = np.empty((len(arr), 3, 2))
        out[:, :2, :] = arr[:, :4].reshape(len(arr), 2, 2) / np.sqrt(
            self.rotation_weight
        )
        out[:, 2, :] = arr[:, 4:]
        return out

    def default_reference(self):
        return self.point(self.from_pose(0.0, 0.0, 0.0))

    def tangent_basis(self, p):
        O = p.coords[:2]
        b_rot = np.zeros((3, 2))
        b_rot[:2] = O @ _J / np.sqrt(2.0 * self.rotation_weight)
        b_t1 = np.zeros((3, 2))
        b_t1[2, 0] = 1.0
        b_t2 = np.zeros((3, 2))
        b_t2[2, 1] = 1.0
        return np.stack([b_rot, b_t1, b_t2])

    def random_point(self, rng):
        theta = rng.uniform(-0.9 * np.pi, 0.9 * np.pi)
        x, y = rng.standard_normal(2)
        return self.point(self.from_pose(theta, x, y))

    def _exp_within_injectivity(self, x, v):
        A = x[:2].T @ v[:2]
        omega = 0.5 * (A[1, 0] - A[0, 1])
        return abs(omega) < np.pi - 1e-6

    def _exp_many(self, X, V):
        X = np.broadcast_to(X, V.shape)
        O, W = X[:, :2, :], V[:, :2, :]
        A = np.matmul(np.transpose(O, (0, 2, 1)), W)
        omega = 0.5 * (A[:, 1, 0] - A[:, 0, 1])
        c, s = np.cos(omega), np.sin(omega)
        rots = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], 1)
        out = np.empty_like(V)
        out[:, :2, :] = np.matmul(O, rots)
        out[:, 2, :] = X[:, 2, :] + V[:, 2, :]
        return out

    def _log_pairs(self, X, Y):
        rel = np.matmul(np.transpose(X[:, :2, :], (0, 2, 1)), Y[:, :2, :])
        dtheta = np.arctan2(rel[:, 1, 0], rel[:, 0, 0])
        if np.any(np.abs(dtheta) > np.pi - CUT_LOCUS_MARGIN):
            idx = int(np.argmax(np.abs(dtheta)))
            raise CutLocusError("relative rotation is (nearly) a half turn", index=idx)
        out = np.empty_like(X)
        out[:, :2, :] = dtheta[:, None, None] * np.matmul(X[:, :2, :], _J[None])
        out[:, 2, :] = Y[:, 2, :] - X[:, 2, :]
        return out

    def _transport_to(self, V, X, c):
        out = np.empty_like(V)
        rebased = np.matmul(np.transpose(X[:, :2, :], (0, 2, 1)), V[:, :2, :])
        out[:, :2, :] = np.matmul(c[None, :2, :], rebased)
        out[:, 2, :] = V[:, 2, :]
        return out

    def spec(self):
        return {"name": self.name, "rotation_weight": self.rotation_weight}

    def __repr__(self):
        return f"SpecialEuclidean2(rotation_weight={self.rotation_weight})"
