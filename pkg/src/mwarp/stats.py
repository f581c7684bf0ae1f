"""Karcher means, aligned-sample summaries and cross-sectional statistics.

The mean of multiple trajectories iterates: register every trajectory to
the current mean TSRVF by dynamic programming, average the warped TSRVFs
in the reference tangent space, and rebuild the mean trajectory as the
integral curve of the averaged field started at the Karcher mean of the
start points.  The summed squared distance to the mean decreases at every
iteration by construction.  Second-order statistics use shooting vectors
``v_i(t) = log(mu(t), aligned_i(t))`` expressed in per-time orthonormal
tangent bases; their uncentered covariance ``K(t) = sum v v^T / (n - 1)``,
its trace ``rho(t)`` and its SVD give the variance profile and the
principal modes of variation.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_trajectories
from .exceptions import ConvergenceError, CutLocusError
from .manifolds.base import ManifoldPoint, TangentVector
from .registration import align_pair
from .trajectory import Trajectory, Warp
from .tsrvf import (
    Tsrvf,
    _trapezoid_weights,
    compute_tsrvf,
    dh,
    reconstruct,
    warp_action,
    warp_trajectory,
)

__all__ = [
    "KarcherSummary",
    "CrossSectionalStats",
    "KarcherMean",
    "karcher_mean_points",
    "karcher_mean_trajectories",
    "cross_sectional_stats",
    "cross_sectional_mean",
    "resolve_reference",
    "dx",
]


def karcher_mean_points(points, step=0.5, tol=1e-8, max_iter=100):
    """Karcher (Frechet) mean of points under the geodesic distance.

    Fixed-point iteration ``p <- exp(p, step * mean_i log(p, p_i))`` until
    the gradient norm drops below ``tol``.  Raises
    :class:`ConvergenceError` when the iteration budget is exhausted.
    """
    pts = list(points)
    if not pts:
        raise ValueError("cannot average an empty point set")
    man = pts[0].manifold
    for q in pts[1:]:
        man._check_owned(q)
    p = pts[0]
    if len(pts) == 1:
        return p
    for _ in range(max_iter):
        grad = np.mean([man.log(p, q).components for q in pts], axis=0)
        gnorm = np.sqrt(max(man._inner(p.coords, grad, grad), 0.0))
        if gnorm <= tol:
            return p
        p = man.exp(p, TangentVector(p, step * grad))
    raise ConvergenceError(
        f"point mean did not reach gradient norm {tol:.0e} in {max_iter} iterations"
    )


def resolve_reference(trajs, reference="default"):
    """Reference-point policy: a fixed point, "start-mean" or "default"."""
    man = trajs[0].manifold
    if isinstance(reference, ManifoldPoint):
        man._check_owned(reference)
        return reference
    if reference in (None, "default"):
        return man.default_reference()
    if reference == "start-mean":
        return karcher_mean_points([t.start for t in trajs])
    raise ValueError(
        f"reference must be a ManifoldPoint, 'default' or 'start-mean', got {reference!r}"
    )


def dx(traj1, traj2):
    """Cross-sectional distance: time integral of pointwise geodesic
    distances.  The no-registration baseline; not warp invariant."""
    if traj1.manifold.name != traj2.manifold.name:
        raise ValueError("trajectories live on different manifolds")
    if traj1.n_samples != traj2.n_samples:
        raise ValueError("trajectories have different grid sizes")
    man = traj1.manifold
    d = np.array(
        [man._dist(x, y) for x, y in zip(traj1.values, traj2.values)]
    )
    return float(np.sum(_trapezoid_weights(traj1.n_samples) * d))


@dataclass(frozen=True, eq=False)
class CrossSectionalStats:
    """Per-time covariance summaries of shooting vectors around a mean."""

    rho: np.ndarray
    covariance: np.ndarray
    pca_directions: np.ndarray
    pca_singular_values: np.ndarray
    bases: np.ndarray
    n_samples: int

    def integrated_rho(self):
        return float(np.sum(_trapezoid_weights(len(self.rho)) * self.rho))


def _time_basis(man, mean_point, flat_shots, rank):
    """Orthonormal basis rows (d, D) of the tangent space used at one time."""
    fixed = man.tangent_basis(mean_point)
    if fixed is not None:
        return man._flatten(mean_point.coords, fixed)
    # data-driven basis: top right-singular vectors of the shooting matrix
    _, _, vt = np.linalg.svd(flat_shots, full_matrices=False)
    out = np.zeros((rank, flat_shots.shape[1]))
    out[: min(rank, vt.shape[0])] = vt[:rank]
    # pad with zero rows if the data rank is lower than requested
    return out


def cross_sectional_stats(mean, aligned):
    """Covariance, variance trace and tangent PCA around a mean trajectory.

    Shooting vectors from ``mean(t)`` to each aligned trajectory are
    expressed in an orthonormal basis of the tangent space (for the
    q-sphere, the top ``n - 1`` PCA directions of the shooting vectors
    themselves).  Covariances use the uncentered ``sum v v^T / (n - 1)``
    normalizer; singular values are returned in nonincreasing order.
    """
    aligned = check_trajectories(aligned, min_count=1)
    man = mean.manifold
    n = len(aligned)
    T = mean.n_samples
    if any(a.n_samples != T for a in aligned):
        raise ValueError("aligned trajectories must share the mean's grid")
    rank = man.dim if man.dim is not None else max(n - 1, 1)
    d_flat = man.flat_dim
    rank = min(rank, d_flat)
    bases = np.empty((T, rank, d_flat))
    cov = np.empty((T, rank, rank))
    rho = np.empty(T)
    pca_u = np.empty((T, rank, rank))
    pca_s = np.empty((T, rank))
    denom = max(n - 1, 1)
    for t in range(T):
        mp = mean.point(t)
        try:
            shots = np.stack(
                [man.log(mp, a.point(t)).components for a in aligned]
            )
        except CutLocusError as e:
            raise CutLocusError(str(e), index=t) from None
        flat = man._flatten(mp.coords, shots)
        B = _time_basis(man, mp, flat, rank)
        coords = flat @ B.T
        K = (coords.T @ coords) / denom
        K = 0.5 * (K + K.T)
        evals, evecs = np.linalg.eigh(K)
        order = np.argsort(evals)[::-1]
        bases[t] = B
        cov[t] = K
        rho[t] = float(np.trace(K))
        pca_u[t] = evecs[:, order]
        pca_s[t] = np.maximum(evals[order], 0.0)
    return CrossSectionalStats(
        rho=rho,
        covariance=cov,
        pca_directions=pca_u,
        pca_singular_values=pca_s,
        bases=bases,
        n_samples=n,
    )


@dataclass(frozen=True, eq=False)
class KarcherSummary:
    """Everything produced by averaging and registering a trajectory set."""

    mean: Trajectory
    aligned: list
    warps: list
    reference: ManifoldPoint
    stats: CrossSectionalStats
    energy_trace: np.ndarray
    converged: bool
    n_iterations: int

    @property
    def rho(self):
        return self.stats.rho

    @property
    def covariance(self):
        return self.stats.covariance

    def integrated_rho(self):
        return self.stats.integrated_rho()


def cross_sectional_mean(trajs):
    """Pointwise Karcher mean at every time; the no-registration mean."""
    trajs = check_trajectories(trajs, min_count=1)
    pts = [
        karcher_mean_points([t.point(i) for t in trajs])
        for i in range(trajs[0].n_samples)
    ]
    return Trajectory.from_points(pts)


def karcher_mean_trajectories(trajs, reference="default", tol=1e-4, max_iter=50):
    """Karcher mean of multiple trajectories with temporal registration.

    Parameters
    ----------
    trajs : sequence of Trajectory
        At least two trajectories on a common manifold and grid.
    reference : ManifoldPoint or "default" or "start-mean"
        Reference point for the TSRVFs.
    tol : float
        Relative energy decrease below which the iteration stops.
    max_iter : int
        Iteration budget; on exhaustion the best iterate is returned with
        ``converged=False``.

    Returns
    -------
    KarcherSummary
    """
    trajs = check_trajectories(trajs, min_count=2)
    c = resolve_reference(trajs, reference)
    n = len(trajs)
    hs = [compute_tsrvf(t, c) for t in trajs]

    # initialize from the medoid under unaligned dh
    gram = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            gram[i, j] = gram[j, i] = dh(hs[i], hs[j])
    medoid = int(np.argmin(np.sum(gram**2, axis=1)))
    h_mu = hs[medoid]

    mu_start = karcher_mean_points([t.start for t in trajs])

    warps = [None] * n
    energy = []
    converged = False
    for _ in range(max_iter):
        # re-registering keeps each previous warp as a candidate and the
        # tangent-space average minimizes the summed squared dh exactly, so
        # the energy cannot increase between iterations
        new_warps = []
        new_aligned = []
        for i in range(n):
            extra = (warps[i],) if warps[i] is not None else ()
            res = align_pair(h_mu, hs[i], extra_warps=extra)
            new_warps.append(res.warp)
            new_aligned.append(warp_action(hs[i], res.warp))
        h_new = Tsrvf(c, np.mean([a.values for a in new_aligned], axis=0))
        E = float(sum(dh(h_new, a) ** 2 for a in new_aligned))
        if energy and E > energy[-1]:
            # descent is guaranteed up to rounding; stop on numerical stall
            converged = True
            break
        warps, h_mu = new_warps, h_new
        energy.append(E)
        if E <= 1e-14 or (
            len(energy) >= 2
            and energy[-2] - energy[-1] <= tol * max(energy[-2], 1e-300)
        ):
            converged = True
            break

    # the integral curve never feeds back into the registration loop, so
    # it is rebuilt once from the final mean field
    mean = reconstruct(mu_start, h_mu)
    aligned = [warp_trajectory(t, g) for t, g in zip(trajs, warps)]
    stats = cross_sectional_stats(mean, aligned)
    return KarcherSummary(
        mean=mean,
        aligned=aligned,
        warps=warps,
        reference=c,
        stats=stats,
        energy_trace=np.asarray(energy),
        converged=converged,
        n_iterations=len(energy),
    )


def _unaligned_summary(trajs, reference):
    trajs = check_trajectories(trajs, min_count=2)
    c = resolve_reference(trajs, reference)
    mean = cross_sectional_mean(trajs)
    stats = cross_sectional_stats(mean, trajs)
    return KarcherSummary(
        mean=mean,
        aligned=list(trajs),
        warps=[Warp.identity(trajs[0].n_samples) for _ in trajs],
        reference=c,
        stats=stats,
        energy_trace=np.asarray([]),
        converged=True,
        n_iterations=0,
    )


class KarcherMean(BaseEstimator):
    """Mean trajectory and registration of a trajectory sample.

    Follows the scikit-learn estimator conventions: hyperparameters in
    ``__init__``, data-dependent results as trailing-underscore attributes
    after :meth:`fit`.  With ``align=False`` the estimator computes the
    plain cross-sectional (pointwise) mean and covariance instead, which is
    the baseline that registration is meant to improve on.

    Parameters
    ----------
    reference : "default", "start-mean" or ManifoldPoint
        Reference-point policy for the TSRVF representation.
    align : bool
        Whether to remove temporal variability by DP registration.
    tol : float
        Relative energy decrease that stops the mean iteration.
    max_iter : int
        Iteration budget of the mean iteration.

    Attributes
    ----------
    mean_ : Trajectory
    aligned_ : list of Trajectory
    warps_ : list of Warp
    rho_ : ndarray of shape (T,)
    covariance_ : ndarray of shape (T, d, d)
    pca_directions_, pca_singular_values_, tangent_bases_ : ndarray
    energy_trace_ : ndarray
    converged_ : bool
    reference_ : ManifoldPoint
    summary_ : KarcherSummary
    """

    def __init__(self, reference="default", align=True, tol=1e-4, max_iter=50):
        self.reference = reference
        self.align = align
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        if self.align:
            summary = karcher_mean_trajectories(
                X, reference=self.reference, tol=self.tol, max_iter=self.max_iter
            )
        else:
            summary = _unaligned_summary(X, self.reference)
        self.summary_ = summary
        self.mean_ = summary.mean
        self.aligned_ = summary.aligned
        self.warps_ = summary.warps
        self.rho_ = summary.stats.rho
        self.covariance_ = summary.stats.covariance
        self.pca_directions_ = summary.stats.pca_directions
        self.pca_singular_values_ = summary.stats.pca_singular_values
        self.tangent_bases_ = summary.stats.bases
        self.energy_trace_ = summary.energy_trace
        self.converged_ = summary.converged
        self.n_iter_ = summary.n_iterations
        self.reference_ = summary.reference
        return self

    def transform(self, X):
        """Register trajectories to the fitted mean; returns aligned copies."""
        if not hasattr(self, "mean_"):
            raise ValueError("KarcherMean is not fitted yet; call fit first")
        trajs = check_trajectories(X, min_count=1)
        if not self.align:
            return list(trajs)
        h_mu = compute_tsrvf(self.mean_, self.reference_)
        out = []
        for t in trajs:
            res = align_pair(h_mu, compute_tsrvf(t, self.reference_))
            out.append(warp_trajectory(t, res.warp))
        return out

    def fit_transform(self, X, y=None):
        return self.fit(X).aligned_
