"""Gaussian-type model on per-time tangent spaces of the mean trajectory.

After registration, a trajectory is treated as a discrete-time process on
m grid times.  At each time the shooting vector from the mean is modeled
as a mean-zero multivariate normal with the sample Karcher covariance, and
the joint density is the product over times (no temporal correlation).
The model supports simulation, log-density evaluation and parametric
bootstrap p-values: the proportion of model samples whose joint density
falls strictly below that of the test trajectory.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_rng
from .exceptions import CutLocusError, InsufficientDataError
from .manifolds import get_manifold
from .manifolds.base import ManifoldPoint, TangentVector
from .stats import KarcherMean
from .trajectory import Trajectory

__all__ = [
    "GaussianModel",
    "TangentGaussianModel",
    "fit_model",
    "sample",
    "log_density",
    "p_value",
]

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class GaussianModel:
    """Per-time tangent Gaussian parameters at the mean trajectory.

    ``bases[j]`` holds orthonormal rows spanning the modeled tangent
    subspace at ``mean_values[j]``; covariances are regularized to be
    strictly positive definite, with the epsilon recorded per time.
    Variability outside the retained subspace is ignored by the density.
    """

    manifold: object
    mean_values: np.ndarray
    grid_times: np.ndarray
    grid_indices: np.ndarray
    source_n_samples: int
    bases: np.ndarray
    covariance: np.ndarray
    epsilon: np.ndarray
    cholesky: np.ndarray
    log_det: np.ndarray

    @property
    def n_times(self):
        return len(self.grid_times)

    @property
    def rank(self):
        return self.covariance.shape[1]

    def mean_point(self, j):
        return ManifoldPoint(self.manifold, self.mean_values[j])

    def max_log_density(self):
        """Log density of the mean trajectory itself (zero exponent)."""
        return float(-0.5 * np.sum(self.rank * _LOG_2PI + self.log_det))

    def to_dict(self):
        spec = self.manifold.spec()
        name = spec.pop("name")
        doc = {
            "schema": "mwarp/1",
            "kind": "gaussian-model",
            "manifold": name,
        }
        if spec:
            doc["manifold_params"] = spec
        return {
            **doc,
            "mean_values": self.mean_values.tolist(),
            "grid_times": self.grid_times.tolist(),
            "grid_indices": self.grid_indices.tolist(),
            "source_n_samples": int(self.source_n_samples),
            "bases": self.bases.tolist(),
            "covariance": self.covariance.tolist(),
            "epsilon": self.epsilon.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("kind") != "gaussian-model":
            raise ValueError("not a gaussian-model document")
        man = get_manifold(data["manifold"], **data.get("manifold_params", {}))
        cov = np.asarray(data["covariance"], dtype=float)
        chol = np.linalg.cholesky(cov)
        log_det = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=1, axis2=2)), axis=1)
        return cls(
            manifold=man,
            mean_values=np.asarray(data["mean_values"], dtype=float),
            grid_times=np.asarray(data["grid_times"], dtype=float),
            grid_indices=np.asarray(data["grid_indices"], dtype=int),
            source_n_samples=int(data["source_n_samples"]),
            bases=np.asarray(data["bases"], dtype=float),
            covariance=cov,
            epsilon=np.asarray(data["epsilon"], dtype=float),
            cholesky=chol,
            log_det=log_det,
        )


def fit_model(summary, n_times=None):
    """Fit the tangent Gaussian model from a Karcher summary.

    Subsamples the time grid to ``n_times`` points (default: the full grid)
    and regularizes each covariance to ``K + eps I`` with
    ``eps = max(1e-6, 1e-3 * rho / d)`` so all covariances are invertible.
    """
    stats = summary.stats
    if stats.n_samples < 2:
        raise InsufficientDataError("need at least 2 trajectories to fit a model")
    T = summary.mean.n_samples
    m = T if n_times is None else int(n_times)
    if m < 2 or m > T:
        raise ValueError(f"n_times must be in [2, {T}], got {m}")
    idx = np.unique(np.round(np.linspace(0, T - 1, m)).astype(int))
    d = stats.covariance.shape[1]
    eps = np.maximum(1e-6, 1e-3 * stats.rho[idx] / d)
    cov = stats.covariance[idx] + eps[:, None, None] * np.eye(d)
    chol = np.linalg.cholesky(cov)
    log_det = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=1, axis2=2)), axis=1)
    return GaussianModel(
        manifold=summary.mean.manifold,
        mean_values=summary.mean.values[idx],
        grid_times=summary.mean.times[idx],
        grid_indices=idx,
        source_n_samples=T,
        bases=stats.bases[idx],
        covariance=cov,
        epsilon=eps,
        cholesky=chol,
        log_det=log_det,
    )


def _draw_coords(model, j, rng, max_tries=10):
    """One tangent draw at time j, in basis coordinates, inside the
    injectivity radius; returns (coords, standard normal z)."""
    man = model.manifold
    x = model.mean_values[j]
    for _ in range(max_tries):
        z = rng.standard_normal(model.rank)
        coords = model.cholesky[j] @ z
        flat = coords @ model.bases[j]
        comp = man._unflatten(x, flat[None])[0]
        if man._exp_within_injectivity(x, comp):
            return comp, z
    raise CutLocusError(
        f"sampled tangent vectors at time index {j} kept exceeding the "
        "injectivity radius; the model covariance is too wide"
    )


def sample(model, seed=None):
    """Draw one trajectory from the model; deterministic given the seed.

    Tangent vectors are drawn independently per time and mapped through
    the exponential at the mean; draws beyond the injectivity radius are
    redrawn up to 10 times before raising :class:`CutLocusError`.
    """
    if model.n_times < 3:
        raise ValueError("sampling needs a model with at least 3 grid times")
    rng = as_rng(seed)
    man = model.manifold
    pts = []
    for j in range(model.n_times):
        comp, _ = _draw_coords(model, j, rng)
        p = model.mean_point(j)
        pts.append(man.exp(p, TangentVector(p, comp)))
    return Trajectory.from_points(pts)


def _sample_log_densities(model, n, seed):
    """Log densities of n model draws, without materializing trajectories.

    Because draws use ``coords = L z``, the quadratic form reduces to
    ``|z|^2`` and densities follow directly; injectivity rejections are
    redrawn exactly as in :func:`sample`.
    """
    rng = as_rng(seed)
    man = model.manifold
    out = np.zeros(n)
    for j in range(model.n_times):
        x = model.mean_values[j]
        z = rng.standard_normal((n, model.rank))
        flat = (z @ model.cholesky[j].T) @ model.bases[j]
        comps = man._unflatten(x, flat)
        for i in range(n):
            if not man._exp_within_injectivity(x, comps[i]):
                comps[i], z[i] = _draw_coords(model, j, rng)
        out += -0.5 * (
            model.rank * _LOG_2PI + model.log_det[j] + np.sum(z * z, axis=1)
        )
    return out


def _shooting_coords(model, traj):
    """Basis coordinates of the shooting vectors from the model mean to a
    trajectory, at the model grid times."""
    man = model.manifold
    if traj.manifold.name != man.name:
        raise ValueError("trajectory manifold does not match the model")
    if traj.n_samples == model.source_n_samples:
        rows = model.grid_indices
    elif traj.n_samples == model.n_times:
        rows = np.arange(model.n_times)
    else:
        raise ValueError(
            f"trajectory grid ({traj.n_samples}) matches neither the model's "
            f"source grid ({model.source_n_samples}) nor its {model.n_times} times"
        )
    coords = np.empty((model.n_times, model.rank))
    for j, r in enumerate(rows):
        p = model.mean_point(j)
        v = man.log(p, traj.point(int(r)))
        flat = man._flatten(p.coords, v.components[None])[0]
        coords[j] = model.bases[j] @ flat
    return coords


def log_density(model, traj):
    """Joint log density of a trajectory under the model."""
    coords = _shooting_coords(model, traj)
    total = 0.0
    for j in range(model.n_times):
        y = np.linalg.solve(model.cholesky[j], coords[j])
        total += -0.5 * (model.rank * _LOG_2PI + model.log_det[j] + float(y @ y))
    return float(total)


def p_value(model, traj, n_samples=10000, seed=None):
    """Parametric-bootstrap p-value of a trajectory under the model.

    The proportion of ``n_samples`` model draws whose joint density is
    strictly below the trajectory's.  Deterministic given the seed.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    ref = log_density(model, traj)
    sims = _sample_log_densities(model, n_samples, seed)
    return float(np.count_nonzero(sims < ref) / n_samples)


class TangentGaussianModel(BaseEstimator):
    """Density model over trajectories, in the scikit-learn style.

    ``fit`` registers the training trajectories (optionally), estimates
    the Karcher mean and per-time covariances, and freezes the Gaussian
    parameters.  ``score_samples`` returns joint log densities, ``sample``
    draws new trajectories, and ``p_value`` runs the parametric bootstrap.

    Parameters
    ----------
    align : bool
        Register trajectories before estimating the summaries.
    reference : "default", "start-mean" or ManifoldPoint
        Reference-point policy for the TSRVFs.
    n_times : int or None
        Number of model grid times (None keeps the trajectory grid).
    tol, max_iter : float, int
        Mean-iteration controls, as in :class:`KarcherMean`.
    random_state : int or None
        Default seed for :meth:`sample` and :meth:`p_value`.
    """

    def __init__(
        self,
        align=True,
        reference="default",
        n_times=None,
        tol=1e-4,
        max_iter=50,
        random_state=None,
    ):
        self.align = align
        self.reference = reference
        self.n_times = n_times
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        km = KarcherMean(
            reference=self.reference,
            align=self.align,
            tol=self.tol,
            max_iter=self.max_iter,
        ).fit(X)
        self.karcher_ = km
        self.model_ = fit_model(km.summary_, self.n_times)
        return self

    @classmethod
    def from_summary(cls, summary, n_times=None):
        """Build a fitted estimator from a precomputed Karcher summary."""
        est = cls(n_times=n_times)
        est.model_ = fit_model(summary, n_times)
        return est

    def _require_fitted(self):
        if not hasattr(self, "model_"):
            raise ValueError("TangentGaussianModel is not fitted yet; call fit first")

    def sample(self, n_samples=1, random_state=None):
        self._require_fitted()
        seed = self.random_state if random_state is None else random_state
        streams = np.random.SeedSequence(seed).spawn(n_samples)
        return [sample(self.model_, np.random.default_rng(s)) for s in streams]

    def score_samples(self, X):
        self._require_fitted()
        return np.asarray([log_density(self.model_, t) for t in X])

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))

    def p_value(self, traj, n_samples=10000, random_state=None):
        self._require_fitted()
        seed = self.random_state if random_state is None else random_state
        return p_value(self.model_, traj, n_samples=n_samples, seed=seed)
