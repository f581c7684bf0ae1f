"""Pre-shape sphere of planar closed curves via square-root functions.

A closed curve beta is represented by q = beta' / sqrt(|beta'|) sampled on a
uniform circular grid of n points.  Unit-length curves give q-arrays of unit
discrete L^2 norm, so shapes live on a hypersphere in L^2(S^1, R^2) and the
great-circle formulas of the 2-sphere apply verbatim under the L^2 inner
product.  Translation drops out of q automatically; scale is removed by
rescaling curves to unit length; rotation can be removed with
:func:`rotation_align`.  The closed-curve closure constraint is not enforced
(pre-shape sphere only).
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import CutLocusError, DegenerateCurveError
from .base import Manifold

__all__ = ["PlanarCurve", "QSphere", "rotation_align", "resample_closed_curve"]

CUT_LOCUS_MARGIN = 1e-6


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Closed planar curve given by sample points; last connects to first."""

    samples: np.ndarray

    def __post_init__(self):
        pts = np.array(self.samples, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"curve samples must have shape (m, 2), got {pts.shape}")
        if len(pts) < 8:
            raise ValueError("a closed curve needs at least 8 samples")
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve samples must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "samples", pts)

    def __len__(self):
        return len(self.samples)


def resample_closed_curve(curve, n):
    """Resample a closed curve to ``n`` points uniform in arc length.

    Consecutive duplicate points are dropped first; a curve of zero total
    length raises :class:`DegenerateCurveError`.
    """
    pts = np.asarray(curve.samples if isinstance(curve, PlanarCurve) else curve, dtype=float)
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-14
    pts = pts[keep]
    if len(pts) > 1 and np.linalg.norm(pts[-1] - pts[0]) <= 1e-14:
        pts = pts[:-1]
    closed = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    total = float(seg.sum())
    if total < 1e-12 or len(pts) < 3:
        raise DegenerateCurveError("curve has (near-)zero length after deduplication")
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, n, endpoint=False)
    out = np.empty((n, 2))
    out[:, 0] = np.interp(targets, arc, closed[:, 0])
    out[:, 1] = np.interp(targets, arc, closed[:, 1])
    return out


class QSphere(Manifold):
    """Unit hypersphere of discretized q-functions on an n-point grid."""

    name = "qsphere"
    point_tol = 1e-8
    dim = None  # infinite dimensional; statistics use a data-driven basis

    def __init__(self, n_points=100):
        if n_points < 8:
            raise ValueError("n_points must be at least 8")
        self.n_points = int(n_points)
        self.ds = 1.0 / self.n_points

    def _dot(self, a, b):
        return float(np.sum(a * b)) * self.ds

    def _exp(self, x, v):
        theta = np.sqrt(max(self._dot(v, v), 0.0))
        if theta < 1e-12:
            return x.copy()
        return np.cos(theta) * x + np.sin(theta) * (v / theta)

    def _log(self, x, y):
        theta = self._dist(x, y)
        if theta > np.pi - CUT_LOCUS_MARGIN:
            raise CutLocusError("q-functions are (nearly) antipodal")
        u = y - self._dot(x, y) * x
        nu = np.sqrt(max(self._dot(u, u), 0.0))
        if nu < 1e-15:
            return np.zeros_like(x)
        return (theta / nu) * u

    def _dist(self, x, y):
        # chord-based formula, stable near coincident q-functions
        d = y - x
        return 2.0 * np.arcsin(min(0.5 * np.sqrt(max(self._dot(d, d), 0.0)), 1.0))

    def _transport(self, v, x, y):
        if self._dist(x, y) > np.pi - CUT_LOCUS_MARGIN:
            raise CutLocusError("cannot transport between (nearly) antipodal q-functions")
        s = x + y
        return v - (2.0 * self._dot(v, y) / self._dot(s, s)) * s

    def _inner(self, x, v, w):
        return self._dot(v, w)

    def _project_point(self, x):
        return x / np.sqrt(self._dot(x, x))

    def _project_tangent(self, x, v):
        return v - self._dot(v, x) * x

    def _point_violation(self, x):
        if x.shape != (self.n_points, 2):
            raise ValueError(
                f"q-function must have shape ({self.n_points}, 2), got {x.shape}"
            )
        return abs(np.sqrt(self._dot(x, x)) - 1.0)

    def _tangent_violation(self, x, v):
        if v.shape != (self.n_points, 2):
            raise ValueError(
                f"q-tangent must have shape ({self.n_points}, 2), got {v.shape}"
            )
        return abs(self._dot(v, x))

    def _exp_many(self, X, V):
        X = np.broadcast_to(X, V.shape)
        theta = np.sqrt(np.maximum(np.sum(V * V, axis=(1, 2)) * self.ds, 0.0))
        safe = np.maximum(theta, 1e-300)
        out = (
            np.cos(theta)[:, None, None] * X
            + np.sin(theta)[:, None, None] * V / safe[:, None, None]
        )
        out[theta < 1e-12] = X[theta < 1e-12]
        return out

    def _log_pairs(self, X, Y):
        D = Y - X
        chord = np.sqrt(np.maximum(np.sum(D * D, axis=(1, 2)) * self.ds, 0.0))
        theta = 2.0 * np.arcsin(np.minimum(0.5 * chord, 1.0))
        if np.any(theta > np.pi - CUT_LOCUS_MARGIN):
            idx = int(np.argmax(theta))
            raise CutLocusError("q-functions are (nearly) antipodal", index=idx)
        dots = np.sum(X * Y, axis=(1, 2)) * self.ds
        U = Y - dots[:, None, None] * X
        nu = np.maximum(np.sqrt(np.sum(U * U, axis=(1, 2)) * self.ds), 1e-300)
        out = (theta / nu)[:, None, None] * U
        out[theta < 1e-15] = 0.0
        return out

    def _transport_to(self, V, X, c):
        D = c[None] - X
        chord = np.sqrt(np.maximum(np.sum(D * D, axis=(1, 2)) * self.ds, 0.0))
        theta = 2.0 * np.arcsin(np.minimum(0.5 * chord, 1.0))
        if np.any(theta > np.pi - CUT_LOCUS_MARGIN):
            idx = int(np.argmax(theta))
            raise CutLocusError(
                "cannot transport between (nearly) antipodal q-functions", index=idx
            )
        S = X + c[None]
        coef = 2.0 * np.sum(V * c[None], axis=(1, 2)) / np.sum(S * S, axis=(1, 2))
        return V - coef[:, None, None] * S

    def _flatten(self, c, stacked):
        arr = np.asarray(stacked, dtype=float)
        return arr.reshape(len(arr), 2 * self.n_points) * np.sqrt(self.ds)

    def _unflatten(self, c, flat):
        arr = np.asarray(flat, dtype=float) / np.sqrt(self.ds)
        return arr.reshape(len(arr), self.n_points, 2)

    def default_reference(self):
        """q-function of the unit-length circle, the standard shape."""
        s = np.arange(self.n_points) / self.n_points
        q = np.stack([-np.sin(2 * np.pi * s), np.cos(2 * np.pi * s)], axis=1)
        return self.point(q)

    def q_function(self, curve):
        """Square-root function of a closed curve, as a point on this sphere.

        The curve is resampled to the grid by arc length and rescaled to
        unit length, so translation and scale do not affect the result.
        """
        pts = resample_closed_curve(curve, self.n_points)
        closed = np.vstack([pts, pts[:1]])
        length = float(np.linalg.norm(np.diff(closed, axis=0), axis=1).sum())
        if length < 1e-12:
            raise DegenerateCurveError("curve has (near-)zero length")
        pts = pts / length
        # circular central differences at uniform ds = 1/n
        deriv = (np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)) / (2.0 * self.ds)
        speed = np.linalg.norm(deriv, axis=1)
        if np.any(speed < 1e-10):
            raise DegenerateCurveError("curve derivative vanishes after resampling")
        q = deriv / np.sqrt(speed)[:, None]
        return self.point(self._project_point(q))

    def random_point(self, rng):
        base = self.default_reference()
        v = self.random_tangent(base, rng, scale=rng.uniform(0.1, 1.0))
        return self.exp(base, v)

    def spec(self):
        return {"name": self.name, "n_points": self.n_points}

    def __repr__(self):
        return f"QSphere(n_points={self.n_points})"


def rotation_align(q1, q2):
    """Best SO(2) rotation of ``q2`` onto ``q1`` (Procrustes on q-functions).

    Returns ``(R, q2_aligned)`` where R minimizes the L^2 distance between
    q1 and the pointwise-rotated q2; the reflection branch is rejected so
    det(R) = +1 always.
    """
    man = q1.manifold
    if man.name != "qsphere" or q2.manifold.name != "qsphere":
        raise ValueError("rotation_align expects q-sphere points")
    if q1.coords.shape != q2.coords.shape:
        raise ValueError("q-functions live on different grids")
    a, b = q1.coords, q2.coords
    # maximize trace(R M) with M = sum_i q2_i q1_i^T
    M = b.T @ a
    U, _, Vt = np.linalg.svd(M)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    R = Vt.T @ np.diag([1.0, d]) @ U.T
    aligned = man.point(man._project_point(b @ R.T))
    return R, aligned
