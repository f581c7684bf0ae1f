"""Input validation helpers shared by estimators and the CLI."""

import numpy as np

from .trajectory import Trajectory

__all__ = ["as_rng", "check_trajectories", "check_square_matrix", "check_labels"]


def as_rng(seed):
    """Normalize None / int / Generator into a numpy Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def check_trajectories(X, min_count=1):
    """Validate a collection of trajectories on a common manifold and grid."""
    trajs = list(X)
    if len(trajs) < min_count:
        raise ValueError(f"need at least {min_count} trajectories, got {len(trajs)}")
    for t in trajs:
        if not isinstance(t, Trajectory):
            raise TypeError(f"expected Trajectory, got {type(t).__name__}")
    names = {t.manifold.name for t in trajs}
    if len(names) > 1:
        raise ValueError(f"trajectories mix manifolds: {sorted(names)}")
    sizes = {t.n_samples for t in trajs}
    if len(sizes) > 1:
        raise ValueError(f"trajectories mix grid sizes: {sorted(sizes)}")
    return trajs


def check_square_matrix(values):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def check_labels(labels, n):
    labels = list(labels)
    if len(labels) != n:
        raise ValueError(f"expected {n} labels, got {len(labels)}")
    return labels
