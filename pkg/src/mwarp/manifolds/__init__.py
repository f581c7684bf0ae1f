"""Concrete geometries and the shared manifold interface."""

from .base import Manifold, ManifoldPoint, TangentVector
from .qsphere import PlanarCurve, QSphere, resample_closed_curve, rotation_align
from .se2 import SpecialEuclidean2
from .sphere import Sphere, latlon_to_point, point_to_latlon

__all__ = [
    "Manifold",
    "ManifoldPoint",
    "TangentVector",
    "Sphere",
    "SpecialEuclidean2",
    "QSphere",
    "PlanarCurve",
    "rotation_align",
    "resample_closed_curve",
    "latlon_to_point",
    "point_to_latlon",
    "get_manifold",
]


def get_manifold(name, **kwargs):
    """Instantiate a geometry from its tag ("s2", "se2" or "qsphere")."""
    table = {
        "s2": Sphere,
        "se2": SpecialEuclidean2,
        "qsphere": QSphere,
    }
    try:
        cls = table[name]
    except KeyError:
        raise ValueError(
            f"unknown manifold {name!r}; expected one of {sorted(table)}"
        ) from None
    return cls(**kwargs)
