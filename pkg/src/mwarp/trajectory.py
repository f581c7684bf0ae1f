"""Trajectory and time-warp value types.

A trajectory is a uniformly sampled path alpha(t_1), ..., alpha(t_T) on one
manifold with t_i = (i-1)/(T-1).  A warp is a discretized boundary-fixed
nondecreasing reparameterization of [0, 1]; flat segments are allowed.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import CutLocusError
from .manifolds.base import Manifold, ManifoldPoint

__all__ = ["Trajectory", "Warp"]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled path on a manifold; ``values`` stacks point coords."""

    manifold: Manifold
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if len(vals) < 3:
            raise ValueError("a trajectory needs at least 3 samples")
        tol = self.manifold.point_tol
        for i, x in enumerate(vals):
            err = self.manifold._point_violation(x)
            if err > tol:
                raise ValueError(f"sample {i} violates the point invariant by {err:.2e}")
            if err > 0.5 * tol:
                vals[i] = self.manifold._project_point(x)
        try:
            self.manifold._log_pairs(vals[:-1], vals[1:])
        except CutLocusError as e:
            raise ValueError(
                f"consecutive samples near index {e.index} are cut-locus pairs; "
                "the trajectory is not resolvable at this sampling rate"
            ) from None
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_points(cls, points):
        points = list(points)
        if not points:
            raise ValueError("empty point list")
        man = points[0].manifold
        return cls(man, np.stack([p.coords for p in points]))

    @property
    def n_samples(self):
        return len(self.values)

    @property
    def times(self):
        return np.linspace(0.0, 1.0, self.n_samples)

    def point(self, i):
        return ManifoldPoint(self.manifold, self.values[i])

    @property
    def points(self):
        return [self.point(i) for i in range(self.n_samples)]

    @property
    def start(self):
        return self.point(0)

    def __len__(self):
        return self.n_samples

    def __repr__(self):
        return f"Trajectory({self.manifold.name}, T={self.n_samples})"


@dataclass(frozen=True, eq=False)
class Warp:
    """Discretized time warp gamma on the uniform grid of [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 3:
            raise ValueError("a warp needs at least 3 samples")
        if abs(vals[0]) > 1e-9 or abs(vals[-1] - 1.0) > 1e-9:
            raise ValueError("warp must satisfy gamma(0) = 0 and gamma(1) = 1")
        if np.any(np.diff(vals) < -1e-12):
            raise ValueError("warp must be nondecreasing")
        vals[0], vals[-1] = 0.0, 1.0
        vals = np.maximum.accumulate(np.clip(vals, 0.0, 1.0))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def identity(cls, n_samples):
        return cls(np.linspace(0.0, 1.0, n_samples))

    @classmethod
    def from_function(cls, fn, n_samples):
        t = np.linspace(0.0, 1.0, n_samples)
        return cls(np.asarray([fn(ti) for ti in t], dtype=float))

    @property
    def n_samples(self):
        return len(self.values)

    @property
    def times(self):
        return np.linspace(0.0, 1.0, self.n_samples)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    def derivative(self):
        """Finite-difference gamma'; central in the interior, one-sided at ends."""
        v = self.values
        dt = 1.0 / (self.n_samples - 1)
        d = np.empty_like(v)
        d[1:-1] = (v[2:] - v[:-2]) / (2.0 * dt)
        d[0] = (v[1] - v[0]) / dt
        d[-1] = (v[-1] - v[-2]) / dt
        return np.maximum(d, 0.0)

    def compose(self, other):
        """Pointwise composition self(other(t)) on other's grid."""
        return Warp(np.interp(other.values, self.times, self.values))

    def inverse(self):
        """Numerical inverse by monotone interpolation (flats become jumps)."""
        return Warp(np.interp(self.times, self.values, self.times))

    def is_identity(self, tol=1e-12):
        return bool(np.max(np.abs(self.values - self.times)) <= tol)

    def __repr__(self):
        return f"Warp(T={self.n_samples})"
