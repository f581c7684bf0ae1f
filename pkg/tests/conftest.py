import numpy as np
import pytest

from mwarp import QSphere, SpecialEuclidean2, Sphere


def all_geometries():
    # a small q-sphere grid keeps the generic property sweeps fast; the
    # modules that pin n = 100 build their own instances
    return [Sphere(), SpecialEuclidean2(), QSphere(n_points=24)]


@pytest.fixture(params=all_geometries(), ids=lambda m: m.name)
def manifold(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_nearby_pair(man, rng, max_dist=1.2):
    """Two random points within a safe geodesic distance of each other."""
    p = man.random_point(rng)
    v = man.random_tangent(p, rng, scale=rng.uniform(0.05, max_dist))
    return p, man.exp(p, v)
