"""Abstract Riemannian manifold interface used by every geometry.

Points and tangent vectors are immutable value objects in ambient
(embedded) coordinates.  Tangent vectors carry their base point and every
operation checks base agreement before touching coordinates, so a vector
transported to the wrong point fails fast instead of corrupting results.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..exceptions import CutLocusError

__all__ = ["ManifoldPoint", "TangentVector", "Manifold"]


def _freeze(arr):
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point on a manifold, stored in the geometry's ambient coordinates."""

    manifold: "Manifold"
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _freeze(self.coords))

    def allclose(self, other, atol=1e-10):
        return (
            self.manifold.name == other.manifold.name
            and self.coords.shape == other.coords.shape
            and np.allclose(self.coords, other.coords, atol=atol)
        )

    def __repr__(self):
        return f"ManifoldPoint({self.manifold.name}, {np.array2string(self.coords, precision=4)})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A vector in the tangent space at ``base``, in ambient coordinates."""

    base: ManifoldPoint
    components: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "components", _freeze(self.components))

    @property
    def manifold(self):
        return self.base.manifold

    def norm(self):
        return self.manifold.norm(self.base, self)

    def _same_base(self, other):
        if not self.base.allclose(other.base, atol=1e-9):
            raise ValueError("tangent vectors have different base points")

    def __add__(self, other):
        self._same_base(other)
        return TangentVector(self.base, self.components + other.components)

    def __sub__(self, other):
        self._same_base(other)
        return TangentVector(self.base, self.components - other.components)

    def __mul__(self, scalar):
        return TangentVector(self.base, self.components * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return TangentVector(self.base, -self.components)

    def __repr__(self):
        return f"TangentVector({self.manifold.name}, {np.array2string(self.components, precision=4)})"


class Manifold(ABC):
    """Riemannian geometry contract: exp, log, dist, transport, metric.

    Subclasses implement the raw-array kernels (prefixed ``_``); the public
    methods wrap them with base-point checks and drift control.  All
    operations are pure functions, safe to call from multiple threads.
    """

    #: short tag used in file formats and the CLI
    name = "abstract"
    #: tolerance of the point invariant; drift above half of it is projected
    point_tol = 1e-10
    #: intrinsic dimension, or None when only a data-driven basis makes sense
    dim = None

    # ------------------------------------------------------------------
    # raw kernels, to be provided per geometry
    # ------------------------------------------------------------------

    @abstractmethod
    def _exp(self, x, v):
        """Exponential map on raw coordinate arrays."""

    @abstractmethod
    def _log(self, x, y):
        """Log map on raw arrays; raises CutLocusError near the cut locus."""

    @abstractmethod
    def _dist(self, x, y):
        """Geodesic distance between raw points."""

    @abstractmethod
    def _transport(self, v, x, y):
        """Parallel transport of raw tangent ``v`` from ``x`` to ``y``."""

    @abstractmethod
    def _inner(self, x, v, w):
        """Riemannian metric on raw tangent arrays at ``x``."""

    @abstractmethod
    def _project_point(self, x):
        """Project a raw array back onto the constraint set."""

    @abstractmethod
    def _project_tangent(self, x, v):
        """Project a raw array onto the tangent space at ``x``."""

    @abstractmethod
    def _point_violation(self, x):
        """Scalar measure of how far ``x`` is from satisfying the invariant."""

    @abstractmethod
    def _tangent_violation(self, x, v):
        """Scalar measure of how far ``v`` is from tangency at ``x``."""

    @abstractmethod
    def _flatten(self, c, stacked):
        """Map stacked tangent components to rows in which the metric is
        the Euclidean dot product; shape (N, flat_dim).

        All supported geometries have metrics that are fixed quadratic
        forms in ambient coordinates, so the flattening is the same at
        every base point; downstream code (TSRVF speeds, the registration
        cost tables) relies on that.
        """

    @abstractmethod
    def _unflatten(self, c, flat):
        """Inverse of :meth:`_flatten`."""

    @abstractmethod
    def default_reference(self):
        """Conventional reference point of the geometry."""

    @abstractmethod
    def random_point(self, rng):
        """Random point, for tests and simulation."""

    def _exp_within_injectivity(self, x, v):
        """Whether exp(x, v) stays uniquely log-invertible from ``x``.

        Default: metric norm below pi, which is exact for the spherical
        geometries; SE(2) overrides with its rotation-angle criterion.
        """
        nrm = np.sqrt(max(self._inner(x, v, v), 0.0))
        return nrm < np.pi - 1e-6

    # batch kernels for hot paths; geometries override with vector code

    def _exp_many(self, X, V):
        """Row-wise exponential of stacked points and tangents."""
        return np.stack([self._exp(x, v) for x, v in zip(X, V)])

    def _log_pairs(self, X, Y):
        """Row-wise log map of stacked point pairs."""
        return np.stack([self._log(x, y) for x, y in zip(X, Y)])

    def _transport_to(self, V, X, c):
        """Row-wise transport of V[i] from X[i] to the single point ``c``."""
        return np.stack([self._transport(v, x, c) for v, x in zip(V, X)])

    def spec(self):
        """Serializable constructor description of this geometry."""
        return {"name": self.name}

    # ------------------------------------------------------------------
    # public object API
    # ------------------------------------------------------------------

    def point(self, coords, project=False):
        """Wrap raw coordinates as a validated :class:`ManifoldPoint`."""
        x = np.asarray(coords, dtype=float)
        if project:
            x = self._project_point(x)
        err = self._point_violation(x)
        if err > self.point_tol:
            raise ValueError(
                f"invalid {self.name} point: invariant violated by {err:.2e}"
            )
        if err > 0.5 * self.point_tol:
            x = self._project_point(x)
        return ManifoldPoint(self, x)

    def tangent(self, base, components, project=False):
        """Wrap raw components as a validated :class:`TangentVector`."""
        v = np.asarray(components, dtype=float)
        if project:
            v = self._project_tangent(base.coords, v)
        err = self._tangent_violation(base.coords, v)
        if err > self.point_tol:
            raise ValueError(
                f"invalid {self.name} tangent vector: tangency violated by {err:.2e}"
            )
        if err > 0.5 * self.point_tol:
            v = self._project_tangent(base.coords, v)
        return TangentVector(base, v)

    def zero_tangent(self, base):
        return TangentVector(base, np.zeros_like(base.coords))

    def _check_owned(self, p):
        if p.manifold.name != self.name:
            raise ValueError(f"point belongs to {p.manifold.name}, not {self.name}")

    def _check_based(self, v, p):
        if not v.base.allclose(p, atol=1e-9):
            raise ValueError("tangent vector is not based at the given point")

    def exp(self, p, v):
        """Point at unit time along the geodesic from ``p`` with velocity ``v``."""
        self._check_owned(p)
        self._check_based(v, p)
        x = self._exp(p.coords, v.components)
        if self._point_violation(x) > 0.5 * self.point_tol:
            x = self._project_point(x)
        return ManifoldPoint(self, x)

    def log(self, p, q):
        """Initial velocity of the unit-time geodesic from ``p`` to ``q``."""
        self._check_owned(p)
        self._check_owned(q)
        v = self._log(p.coords, q.coords)
        if self._tangent_violation(p.coords, v) > 0.5 * self.point_tol:
            v = self._project_tangent(p.coords, v)
        return TangentVector(p, v)

    def dist(self, p, q):
        self._check_owned(p)
        self._check_owned(q)
        return float(self._dist(p.coords, q.coords))

    def transport(self, v, p, q):
        """Parallel transport along the shortest geodesic from ``p`` to ``q``."""
        self._check_owned(p)
        self._check_owned(q)
        self._check_based(v, p)
        w = self._transport(v.components, p.coords, q.coords)
        if self._tangent_violation(q.coords, w) > 0.5 * self.point_tol:
            w = self._project_tangent(q.coords, w)
        return TangentVector(ManifoldPoint(self, q.coords), w)

    def inner(self, p, v, w):
        self._check_owned(p)
        self._check_based(v, p)
        self._check_based(w, p)
        return float(self._inner(p.coords, v.components, w.components))

    def norm(self, p, v):
        return float(np.sqrt(max(self._inner(p.coords, v.components, v.components), 0.0)))

    def geodesic_point(self, p, q, frac):
        """Point at parameter ``frac`` on the constant-speed geodesic p -> q."""
        if frac == 0.0:
            return p
        v = self.log(p, q)
        return self.exp(p, frac * v)

    def tangent_basis(self, p):
        """Orthonormal basis of T_p(M) as an array of stacked components,
        or None when the geometry has no canonical finite basis."""
        return None

    def random_tangent(self, p, rng, scale=1.0):
        raw = rng.standard_normal(p.coords.shape)
        v = self._project_tangent(p.coords, raw)
        nrm = np.sqrt(max(self._inner(p.coords, v, v), 1e-300))
        return TangentVector(p, v * (scale / nrm))

    @property
    def flat_dim(self):
        zero = np.zeros_like(self.default_reference().coords)
        return self._flatten(zero, zero[np.newaxis]).shape[1]

    def __repr__(self):
        return f"{type(self).__name__}()"
