"""mwarp: registration, comparison and statistics of time-warped
trajectories on Riemannian manifolds.

The core representation is the transported square-root vector field
(TSRVF): a trajectory's velocity, scaled by inverse square-root speed and
parallel-transported to a fixed reference point.  The L^2 distance between
TSRVFs is invariant to simultaneous time warping, which yields a proper
warp-invariant distance, dynamic-programming registration, Karcher means
with reduced cross-sectional variance, and tangent-space Gaussian models
with Monte-Carlo p-values.  Concrete geometries: the unit 2-sphere, SE(2)
and the pre-shape sphere of planar closed curves.
"""

from .analysis import (
    DistanceMatrix,
    distance_matrix,
    hierarchical_cluster,
    knn_classify,
    mds,
)
from .exceptions import (
    ConvergenceError,
    CutLocusError,
    DegenerateCurveError,
    EmptyTrackError,
    InsufficientDataError,
    MismatchedReferenceError,
    MwarpError,
    ParseError,
)
from .manifolds import (
    Manifold,
    ManifoldPoint,
    PlanarCurve,
    QSphere,
    SpecialEuclidean2,
    Sphere,
    TangentVector,
    get_manifold,
    rotation_align,
)
from .model import GaussianModel, TangentGaussianModel, fit_model, log_density, p_value, sample
from .registration import AlignmentResult, align_pair, ds, ds_from_tsrvfs
from .stats import (
    KarcherMean,
    KarcherSummary,
    cross_sectional_stats,
    dx,
    karcher_mean_points,
    karcher_mean_trajectories,
    resolve_reference,
)
from .trajectory import Trajectory, Warp
from .tsrvf import Tsrvf, compute_tsrvf, dh, reconstruct, warp_action, warp_trajectory

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # geometries
    "Manifold",
    "ManifoldPoint",
    "TangentVector",
    "Sphere",
    "SpecialEuclidean2",
    "QSphere",
    "PlanarCurve",
    "rotation_align",
    "get_manifold",
    # core types
    "Trajectory",
    "Warp",
    "Tsrvf",
    # TSRVF operations
    "compute_tsrvf",
    "reconstruct",
    "dh",
    "warp_action",
    "warp_trajectory",
    # registration
    "AlignmentResult",
    "align_pair",
    "ds",
    "ds_from_tsrvfs",
    # statistics
    "KarcherMean",
    "KarcherSummary",
    "karcher_mean_points",
    "karcher_mean_trajectories",
    "cross_sectional_stats",
    "resolve_reference",
    "dx",
    # modeling
    "GaussianModel",
    "TangentGaussianModel",
    "fit_model",
    "sample",
    "log_density",
    "p_value",
    # analysis
    "DistanceMatrix",
    "distance_matrix",
    "knn_classify",
    "hierarchical_cluster",
    "mds",
    # errors
    "MwarpError",
    "CutLocusError",
    "MismatchedReferenceError",
    "DegenerateCurveError",
    "ConvergenceError",
    "ParseError",
    "EmptyTrackError",
    "InsufficientDataError",
]
