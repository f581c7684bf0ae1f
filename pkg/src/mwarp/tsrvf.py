"""Transported square-root vector fields and the warp-invariant machinery.

The TSRVF of a trajectory alpha is the velocity field scaled by inverse
square-root speed and parallel-transported to a fixed reference point c:
``h(t) = transport(alpha'(t), alpha(t) -> c) / sqrt(|alpha'(t)|)``.  Warping
alpha by gamma acts on h as ``(h, gamma) = h(gamma(t)) sqrt(gamma'(t))``,
and the L^2 distance between TSRVFs is invariant to simultaneous warping,
which is what makes it usable for temporal registration.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import CutLocusError, MismatchedReferenceError
from .manifolds.base import ManifoldPoint, TangentVector
from .trajectory import Trajectory, Warp

__all__ = [
    "Tsrvf",
    "compute_tsrvf",
    "reconstruct",
    "dh",
    "warp_action",
    "warp_trajectory",
]

# below this speed a sample is treated as stationary and h is set to 0,
# the continuous extension of v/sqrt(|v|)
ZERO_SPEED = 1e-12


def _trapezoid_weights(n):
    w = np.full(n, 1.0 / (n - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass(frozen=True, eq=False)
class Tsrvf:
    """Sampled curve in the tangent space at ``reference``."""

    reference: ManifoldPoint
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if len(vals) < 3:
            raise ValueError("a TSRVF needs at least 3 samples")
        if not np.all(np.isfinite(vals)):
            raise ValueError("TSRVF values must be finite")
        man = self.reference.manifold
        tol = man.point_tol
        c = self.reference.coords
        for i, v in enumerate(vals):
            err = man._tangent_violation(c, v)
            if err > tol * max(1.0, float(np.sum(v * v))):
                raise ValueError(
                    f"value {i} is not tangent at the reference (violation {err:.2e})"
                )
            if err > 0.5 * tol:
                vals[i] = man._project_tangent(c, v)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def manifold(self):
        return self.reference.manifold

    @property
    def n_samples(self):
        return len(self.values)

    @property
    def times(self):
        return np.linspace(0.0, 1.0, self.n_samples)

    def vector(self, i):
        return TangentVector(self.reference, self.values[i])

    def flat(self):
        """Values as rows in coordinates where the metric is the dot product."""
        return self.manifold._flatten(self.reference.coords, self.values)

    def norm(self):
        """Trapezoidal L^2 norm of the field."""
        f = self.flat()
        w = _trapezoid_weights(self.n_samples)
        return float(np.sqrt(np.sum(w * np.sum(f * f, axis=1))))

    def __len__(self):
        return self.n_samples

    def __repr__(self):
        return f"Tsrvf({self.manifold.name}, T={self.n_samples})"


def _raw_velocity(man, vals):
    """Finite-difference velocities on raw stacked coordinates."""
    n = len(vals)
    dt = 1.0 / (n - 1)
    fwd = man._log_pairs(vals[:-1], vals[1:])  # log(a_i, a_{i+1})
    bwd = man._log_pairs(vals[1:], vals[:-1])  # log(a_{i+1}, a_i)
    out = np.empty_like(vals)
    out[0] = fwd[0] / dt
    out[-1] = -bwd[-1] / dt
    out[1:-1] = (fwd[1:] - bwd[:-1]) / (2.0 * dt)
    return out


def trajectory_velocity(traj):
    """Intrinsic finite-difference velocities alpha'(t_i) as tangent vectors.

    Uses symmetrized log-map differences in the interior and one-sided
    differences at the ends, so the estimates stay in the tangent spaces.
    """
    raw = _raw_velocity(traj.manifold, traj.values)
    return [TangentVector(traj.point(i), raw[i]) for i in range(len(raw))]


def compute_tsrvf(traj, reference):
    """TSRVF of ``traj`` with respect to the reference point.

    Raises :class:`CutLocusError` carrying the offending sample index when
    a trajectory point is (nearly) in the cut locus of the reference.
    """
    man = traj.manifold
    man._check_owned(reference)
    c = reference.coords
    raw = _raw_velocity(man, traj.values)
    flat = man._flatten(c, raw)
    speed = np.sqrt(np.maximum(np.sum(flat * flat, axis=1), 0.0))
    moved = man._transport_to(raw, traj.values, c)
    scale = np.where(speed < ZERO_SPEED, 0.0, 1.0 / np.sqrt(np.maximum(speed, 1e-300)))
    vals = moved * scale.reshape((-1,) + (1,) * (moved.ndim - 1))
    return Tsrvf(reference, vals)


def reconstruct(start, h):
    """Integrate the trajectory back from its start point and TSRVF.

    Uses geodesic Euler steps of the integral-curve equation
    ``beta'(t) = |V(t)| V(t)`` with ``V(t) = transport(h(t), c -> beta(t))``,
    at the grid resolution of ``h``; the round-trip error is O(1/T).
    """
    man = start.manifold
    man._check_owned(h.reference)
    c = h.reference.coords
    n = h.n_samples
    dt = 1.0 / (n - 1)
    vals = np.empty((n,) + start.coords.shape)
    vals[0] = start.coords
    for k in range(n - 1):
        try:
            V = man._transport(h.values[k], c, vals[k])
        except CutLocusError as e:
            raise CutLocusError(str(e), index=k) from None
        nv = np.sqrt(max(man._inner(vals[k], V, V), 0.0))
        vals[k + 1] = man._exp(vals[k], (dt * nv) * V)
    return Trajectory(man, vals)


def _check_compatible(h1, h2):
    if h1.manifold.name != h2.manifold.name or not h1.reference.allclose(
        h2.reference, atol=1e-9
    ):
        raise MismatchedReferenceError(
            "TSRVFs have different reference points; recompute on a common one"
        )
    if h1.n_samples != h2.n_samples:
        raise ValueError(
            f"TSRVF grids differ: {h1.n_samples} vs {h2.n_samples} samples"
        )


def dh(h1, h2):
    """L^2 distance between two TSRVFs on a common reference and grid."""
    _check_compatible(h1, h2)
    d = h1.flat() - h2.flat()
    w = _trapezoid_weights(h1.n_samples)
    return float(np.sqrt(np.sum(w * np.sum(d * d, axis=1))))


def warp_action(h, warp):
    """Group action of a warp on a TSRVF: ``h(gamma(t)) sqrt(gamma'(t))``.

    Values are linearly interpolated at the warped times; gamma' comes from
    finite differences.  The identity warp returns ``h`` unchanged.
    """
    n = h.n_samples
    if warp.n_samples != n:
        raise ValueError("warp grid must match the TSRVF grid")
    if np.array_equal(warp.values, warp.times):
        return h
    pos = warp.values * (n - 1)
    idx = np.clip(np.floor(pos).astype(int), 0, n - 2)
    frac = pos - idx
    vals = h.values.reshape(n, -1)
    interp = vals[idx] * (1.0 - frac[:, None]) + vals[idx + 1] * frac[:, None]
    scaled = interp * np.sqrt(warp.derivative())[:, None]
    return Tsrvf(h.reference, scaled.reshape(h.values.shape))


def warp_trajectory(traj, warp):
    """Reparameterize a trajectory by a warp using geodesic interpolation.

    Every output sample lies on the constant-speed geodesic segment between
    the two neighboring input samples; endpoints are preserved.
    """
    n = traj.n_samples
    if warp.n_samples != n:
        raise ValueError("warp grid must match the trajectory grid")
    if np.array_equal(warp.values, warp.times):
        return traj
    man = traj.manifold
    pos = warp.values * (n - 1)
    idx = np.clip(np.floor(pos).astype(int), 0, n - 2)
    frac = pos - idx
    logs = man._log_pairs(traj.values[idx], traj.values[idx + 1])
    steps = logs * frac.reshape((-1,) + (1,) * (logs.ndim - 1))
    vals = man._exp_many(traj.values[idx], steps)
    vals[frac <= 0.0] = traj.values[idx[frac <= 0.0]]
    return Trajectory(man, vals)
