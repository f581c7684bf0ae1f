"""Dataset-level analytics: distance matrices, leave-one-out k-NN
classification, average-linkage clustering and classical MDS."""

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from ._validation import check_labels, check_square_matrix, check_trajectories
from .registration import align_pair
from .stats import dx, resolve_reference
from .tsrvf import compute_tsrvf, dh

__all__ = [
    "DistanceMatrix",
    "distance_matrix",
    "knn_classify",
    "hierarchical_cluster",
    "Dendrogram",
    "mds",
]

METRICS = ("dh", "ds", "dx")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise distances with a metric tag and identifiers."""

    values: np.ndarray
    metric: str
    ids: list

    def __post_init__(self):
        arr = check_square_matrix(self.values)
        if np.any(np.abs(np.diag(arr)) > 1e-10):
            raise ValueError("distance matrix must have a zero diagonal")
        if np.max(np.abs(arr - arr.T)) > 1e-10:
            raise ValueError("distance matrix must be symmetric")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "ids", list(self.ids))
        if len(self.ids) != len(arr):
            raise ValueError("one identifier per row is required")

    def __len__(self):
        return len(self.values)


def distance_matrix(trajs, metric="ds", reference="default", ids=None):
    """Pairwise distances under ``dh`` (no registration), ``ds`` (with
    registration) or the cross-sectional baseline ``dx``.

    ``ds`` entries never exceed the corresponding ``dh`` entries, since the
    identity warp is always in the registration search set.
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    trajs = check_trajectories(trajs, min_count=1)
    n = len(trajs)
    ids = list(ids) if ids is not None else list(range(n))
    if len(ids) != n:
        raise ValueError("one identifier per trajectory is required")
    out = np.zeros((n, n))
    if metric == "dx":
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = dx(trajs[i], trajs[j])
    else:
        c = resolve_reference(trajs, reference)
        hs = [compute_tsrvf(t, c) for t in trajs]
        for i in range(n):
            for j in range(i + 1, n):
                if metric == "dh":
                    d = dh(hs[i], hs[j])
                else:
                    d = min(
                        align_pair(hs[i], hs[j]).distance,
                        align_pair(hs[j], hs[i]).distance,
                    )
                out[i, j] = out[j, i] = d
    return DistanceMatrix(values=out, metric=metric, ids=ids)


def knn_classify(dm, labels, k=1):
    """Leave-one-out k-nearest-neighbor classification on a distance matrix.

    Each trajectory is classified by majority vote among its k nearest
    others; vote ties fall back to the single nearest neighbor's label.
    Returns ``(predictions, rate)`` with the fraction classified correctly.
    """
    values = dm.values if isinstance(dm, DistanceMatrix) else check_square_matrix(dm)
    n = len(values)
    labels = check_labels(labels, n)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    preds = []
    for i in range(n):
        order = np.argsort(values[i], kind="stable")
        neighbors = [j for j in order if j != i][:k]
        votes = Counter(labels[j] for j in neighbors)
        top = votes.most_common()
        if len(top) > 1 and top[0][1] == top[1][1]:
            preds.append(labels[neighbors[0]])
        else:
            preds.append(top[0][0])
    correct = sum(p == y for p, y in zip(preds, labels))
    return preds, correct / n


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Agglomerative merge list; row i merges clusters ``merges[i]`` at
    ``heights[i]``, following the scipy linkage numbering."""

    merges: np.ndarray
    heights: np.ndarray
    n_leaves: int
    _linkage: np.ndarray

    def cut(self, n_clusters):
        """Flat cluster labels (0-based) for a requested cluster count."""
        return fcluster(self._linkage, n_clusters, criterion="maxclust") - 1

    def to_dict(self):
        return {
            "n_leaves": int(self.n_leaves),
            "merges": self.merges.tolist(),
            "heights": self.heights.tolist(),
        }


def hierarchical_cluster(dm):
    """Average-linkage agglomerative clustering of a distance matrix.

    Returns a :class:`Dendrogram`; merge heights are nondecreasing because
    average linkage is monotone.
    """
    values = dm.values if isinstance(dm, DistanceMatrix) else check_square_matrix(dm)
    Z = linkage(squareform(values, checks=False), method="average")
    return Dendrogram(
        merges=Z[:, :2].astype(int),
        heights=Z[:, 2].copy(),
        n_leaves=len(values),
        _linkage=Z,
    )


def mds(dm, dim=2):
    """Classical (Torgerson) multidimensional scaling.

    Double-centers the squared distances and embeds along the top ``dim``
    spectral directions; negative eigenvalues are truncated at zero.  The
    output is centered, and each column's sign is fixed so that its entry
    of largest magnitude is positive.
    """
    values = dm.values if isinstance(dm, DistanceMatrix) else check_square_matrix(dm)
    n = len(values)
    if not 1 <= dim <= n:
        raise ValueError(f"dim must be in [1, {n}], got {dim}")
    J = np.eye(n) - np.ones((n, n)) / n
    B = -0.5 * J @ (values**2) @ J
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:dim]
    lam = np.maximum(evals[order], 0.0)
    coords = evecs[:, order] * np.sqrt(lam)
    for col in range(dim):
        pivot = np.argmax(np.abs(coords[:, col]))
        if coords[pivot, col] < 0:
            coords[:, col] = -coords[:, col]
    return coords
