"""Unit 2-sphere with the standard Euclidean round metric."""

import numpy as np

from ..exceptions import CutLocusError
from .base import Manifold

__all__ = ["Sphere"]

# angular margin below pi at which log/transport refuse to operate
CUT_LOCUS_MARGIN = 1e-6


class Sphere(Manifold):
    """S^2 embedded in R^3; points are unit 3-vectors."""

    name = "s2"
    point_tol = 1e-10
    dim = 2

    def _exp(self, x, v):
        theta = np.linalg.norm(v)
        if theta < 1e-12:
            return x.copy()
        return np.cos(theta) * x + np.sin(theta) * (v / theta)

    def _log(self, x, y):
        theta = self._dist(x, y)
        if theta > np.pi - CUT_LOCUS_MARGIN:
            raise CutLocusError("points are (nearly) antipodal on S^2")
        u = y - np.dot(x, y) * x
        nu = np.linalg.norm(u)
        if nu < 1e-15:
            return np.zeros(3)
        return (theta / nu) * u

    def _dist(self, x, y):
        # chord-based formula: accurate near coincident points, where
        # arccos of a dot product loses half the significant digits
        return 2.0 * np.arcsin(min(0.5 * np.linalg.norm(y - x), 1.0))

    def _transport(self, v, x, y):
        # closed form along the great circle: v - 2<v,y>/|x+y|^2 (x+y)
        if self._dist(x, y) > np.pi - CUT_LOCUS_MARGIN:
            raise CutLocusError("cannot transport between (nearly) antipodal points")
        s = x + y
        return v - (2.0 * np.dot(v, y) / np.dot(s, s)) * s

    def _inner(self, x, v, w):
        return np.dot(v, w)

    def _project_point(self, x):
        return x / np.linalg.norm(x)

    def _project_tangent(self, x, v):
        return v - np.dot(v, x) * x

    def _point_violation(self, x):
        if x.shape != (3,):
            raise ValueError(f"S^2 point must be a 3-vector, got shape {x.shape}")
        return abs(np.linalg.norm(x) - 1.0)

    def _tangent_violation(self, x, v):
        if v.shape != (3,):
            raise ValueError(f"S^2 tangent must be a 3-vector, got shape {v.shape}")
        return abs(np.dot(v, x))

    def _flatten(self, c, stacked):
        return np.asarray(stacked, dtype=float).reshape(len(stacked), 3)

    def _unflatten(self, c, flat):
        return np.asarray(flat, dtype=float).reshape(len(flat), 3)

    def _exp_many(self, X, V):
        X = np.broadcast_to(X, V.shape)
        theta = np.linalg.norm(V, axis=1)
        safe = np.maximum(theta, 1e-300)
        out = np.cos(theta)[:, None] * X + np.sin(theta)[:, None] * (V / safe[:, None])
        out[theta < 1e-12] = X[theta < 1e-12]
        return out

    def _log_pairs(self, X, Y):
        chord = np.linalg.norm(Y - X, axis=1)
        theta = 2.0 * np.arcsin(np.minimum(0.5 * chord, 1.0))
        if np.any(theta > np.pi - CUT_LOCUS_MARGIN):
            idx = int(np.argmax(theta))
            raise CutLocusError("points are (nearly) antipodal on S^2", index=idx)
        U = Y - np.sum(X * Y, axis=1)[:, None] * X
        nu = np.maximum(np.linalg.norm(U, axis=1), 1e-300)
        out = (theta / nu)[:, None] * U
        out[theta < 1e-15] = 0.0
        return out

    def _transport_to(self, V, X, c):
        chord = np.linalg.norm(c[None, :] - X, axis=1)
        theta = 2.0 * np.arcsin(np.minimum(0.5 * chord, 1.0))
        if np.any(theta > np.pi - CUT_LOCUS_MARGIN):
            idx = int(np.argmax(theta))
            raise CutLocusError(
                "cannot transport between (nearly) antipodal points", index=idx
            )
        S = X + c[None, :]
        coef = 2.0 * (V @ c) / np.sum(S * S, axis=1)
        return V - coef[:, None] * S

    def default_reference(self):
        return self.point([0.0, 0.0, 1.0])

    def tangent_basis(self, p):
        x = p.coords
        k = int(np.argmin(np.abs(x)))
        e = np.zeros(3)
        e[k] = 1.0
        b1 = e - x[k] * x
        b1 /= np.linalg.norm(b1)
        b2 = np.cross(x, b1)
        return np.stack([b1, b2])

    def random_point(self, rng):
        x = rng.standard_normal(3)
        return self.point(x / np.linalg.norm(x))


def latlon_to_point(sphere, lat_deg, lon_deg):
    """Geographic convention: (lat, lon) in degrees to a unit vector.

    (lat, lon) maps to (cos lon cos lat, sin lon cos lat, sin lat), so the
    north pole is (0, 0, 1) and (lat=0, lon=0) is (1, 0, 0).
    """
    lat = np.deg2rad(lat_deg)
    lon = np.deg2rad(lon_deg)
    return sphere.point(
        [np.cos(lon) * np.cos(lat), np.sin(lon) * np.cos(lat), np.sin(lat)]
    )


def point_to_latlon(p):
    """Inverse of :func:`latlon_to_point`, in degrees."""
    x, y, z = p.coords
    lat = np.rad2deg(np.arcsin(np.clip(z, -1.0, 1.0)))
    lon = np.rad2deg(np.arctan2(y, x))
    return float(lat), float(lon)
