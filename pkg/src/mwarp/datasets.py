"""Trajectory collections, synthetic generators and resampling.

The synthetic generators replace data sets that cannot be redistributed:
a migration-style bundle of sphere tracks, the 14-trajectory 3-class
vehicle experiment on SE(2), and deforming-contour sequences for the
pre-shape geometry.  Warp generators produce fast-slow / slow-fast
exponential warps and randomized stop-and-go profiles.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import as_rng, check_trajectories
from .manifolds import QSphere, SpecialEuclidean2, Sphere, latlon_to_point
from .manifolds.base import ManifoldPoint
from .trajectory import Trajectory, Warp
from .tsrvf import warp_trajectory

__all__ = [
    "Dataset",
    "synth_warp",
    "random_smooth_warp",
    "random_warp_function",
    "TrajectoryRecipe",
    "random_trajectory_recipe",
    "warped_copies",
    "migration_dataset",
    "se2_intersection_dataset",
    "contour_sequence_dataset",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Trajectories on one manifold with identifiers and optional labels."""

    manifold: object
    trajectories: list
    ids: list
    labels: list = None
    notes: str = ""

    def __post_init__(self):
        trajs = check_trajectories(self.trajectories, min_count=1)
        object.__setattr__(self, "trajectories", trajs)
        ids = list(self.ids) if self.ids is not None else [str(i) for i in range(len(trajs))]
        if len(ids) != len(trajs):
            raise ValueError("one identifier per trajectory is required")
        object.__setattr__(self, "ids", ids)
        if self.labels is not None:
            labels = list(self.labels)
            if len(labels) != len(trajs):
                raise ValueError("labels, when present, must cover all trajectories")
            object.__setattr__(self, "labels", labels)
        if trajs[0].manifold.name != self.manifold.name:
            raise ValueError("dataset manifold tag does not match its trajectories")

    @property
    def n_samples(self):
        return self.trajectories[0].n_samples

    def __len__(self):
        return len(self.trajectories)

    def subset(self, indices):
        idx = list(indices)
        return Dataset(
            manifold=self.manifold,
            trajectories=[self.trajectories[i] for i in idx],
            ids=[self.ids[i] for i in idx],
            labels=[self.labels[i] for i in idx] if self.labels is not None else None,
            notes=self.notes,
        )


# ----------------------------------------------------------------------
# warps
# ----------------------------------------------------------------------


def synth_warp(n_samples, kind="stop-and-go", strength=0.5, seed=None):
    """Synthetic time warp of a named kind.

    ``fast-slow`` and ``slow-fast`` are the exponential family
    ``gamma(t) = (exp(a t) - 1) / (exp(a) - 1)`` with ``a = +-5 strength``
    (fast-slow convex, slow-fast concave); both are deterministic.
    ``stop-and-go`` integrates a randomized piecewise speed profile with
    2 to 5 near-zero plateaus, so it needs a seed.
    """
    if not 0.0 < strength < 1.0:
        raise ValueError(f"strength must be in (0, 1), got {strength}")
    t = np.linspace(0.0, 1.0, n_samples)
    if kind in ("fast-slow", "slow-fast"):
        a = 5.0 * strength if kind == "fast-slow" else -5.0 * strength
        return Warp((np.exp(a * t) - 1.0) / (np.exp(a) - 1.0))
    if kind != "stop-and-go":
        raise ValueError(f"unknown warp kind {kind!r}")
    rng = as_rng(seed)
    n_plateaus = int(rng.integers(2, 6))
    speed = np.ones(n_samples)
    low = max(1.0 - strength, 0.02)
    # plateaus jointly cover about 0.85 * strength of the time axis
    centers = np.sort(rng.uniform(0.08, 0.92, size=n_plateaus))
    raw = rng.uniform(0.5, 1.5, size=n_plateaus)
    widths = raw / raw.sum() * (0.85 * strength) / 2.0
    for cx, w in zip(centers, widths):
        speed[np.abs(t - cx) < w] = low
    gamma = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]))])
    return Warp(gamma / gamma[-1])


def random_warp_function(rng=None, intensity=0.6):
    """Analytic random smooth warp ``t + sum_k a_k sin(k pi t)``.

    The coefficient budget keeps ``gamma'`` within roughly
    ``1 +- 0.65 intensity``, so the warp and its inverse stay inside the
    slope range the registration stencil can represent.  Returns a callable
    usable at any grid resolution.
    """
    if not 0.0 < intensity <= 1.0:
        raise ValueError(f"intensity must be in (0, 1], got {intensity}")
    rng = as_rng(rng)
    n_modes = 3
    raw = rng.uniform(-1.0, 1.0, size=n_modes)
    budget = 0.65 * intensity
    coeffs = raw * budget / np.sum(np.abs(raw) * np.arange(1, n_modes + 1) * np.pi)

    def gamma(t):
        out = np.asarray(t, dtype=float).copy()
        for k, a in enumerate(coeffs, start=1):
            out = out + a * np.sin(k * np.pi * np.asarray(t))
        return out

    return gamma


def random_smooth_warp(n_samples, rng=None, intensity=0.6):
    """Random smooth diffeomorphic warp sampled on a grid."""
    fn = random_warp_function(rng, intensity)
    return Warp(fn(np.linspace(0.0, 1.0, n_samples)))


# ----------------------------------------------------------------------
# smooth trajectories evaluable at any resolution
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrajectoryRecipe:
    """Analytic smooth path ``alpha(t) = exp(base, sum_j f_j(t) d_j)``.

    The envelope functions are ``f_j(t) = amp_j sin(freq_j pi t + phase_j)
    + drift_j t``, so the same path can be sampled on any grid; this is
    what makes resolution-refinement experiments meaningful.
    """

    base: ManifoldPoint
    directions: np.ndarray
    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray
    drifts: np.ndarray

    @property
    def manifold(self):
        return self.base.manifold

    def path_at(self, times):
        man = self.manifold
        times = np.asarray(times, dtype=float)
        envel = self.amplitudes[None, :] * np.sin(
            np.outer(times, self.frequencies) * np.pi + self.phases[None, :]
        ) + np.outer(times, self.drifts)
        tangents = np.tensordot(envel, self.directions, axes=1)
        vals = man._exp_many(self.base.coords[None], tangents)
        return Trajectory(man, vals)

    def __call__(self, n_samples):
        return self.path_at(np.linspace(0.0, 1.0, n_samples))

    def warped(self, warp_fn, n_samples):
        """Sample the path at warped times; exact composition alpha o gamma."""
        t = np.linspace(0.0, 1.0, n_samples)
        if isinstance(warp_fn, Warp):
            times = warp_fn(t)
        else:
            times = np.asarray([warp_fn(ti) for ti in t], dtype=float)
        return self.path_at(np.clip(times, 0.0, 1.0))


def _orthonormal_tangents(man, base, rng, k):
    flat_rows = []
    raw = np.stack(
        [man._project_tangent(base.coords, rng.standard_normal(base.coords.shape)) for _ in range(k)]
    )
    flat = man._flatten(base.coords, raw)
    q, _ = np.linalg.qr(flat.T)
    return man._unflatten(base.coords, q.T[:k])


def random_trajectory_recipe(man, rng=None, center=None, n_modes=2, scale=0.8):
    """Random smooth trajectory staying within a ball around ``center``.

    The total tangent excursion is bounded by ``scale`` (radians on the
    spherical geometries), which keeps every sample well away from the
    cut locus of the default reference point.
    """
    rng = as_rng(rng)
    if center is None:
        center = man.default_reference()
    offset = man.random_tangent(center, rng, scale=0.2 * scale)
    base = man.exp(center, offset)
    dirs = _orthonormal_tangents(man, base, rng, n_modes)
    raw_amp = rng.uniform(0.3, 1.0, size=n_modes)
    drifts = rng.uniform(-0.6, 0.6, size=n_modes)
    budget = scale / np.sum(raw_amp + np.abs(drifts))
    return TrajectoryRecipe(
        base=base,
        directions=dirs,
        amplitudes=raw_amp * budget,
        frequencies=rng.uniform(0.7, 2.2, size=n_modes),
        phases=rng.uniform(0.0, 2.0 * np.pi, size=n_modes),
        drifts=drifts * budget,
    )


# ----------------------------------------------------------------------
# scenario datasets
# ----------------------------------------------------------------------


def warped_copies(
    recipe,
    n_copies,
    n_samples,
    seed=None,
    warp_kinds=("fast-slow", "slow-fast", "stop-and-go"),
    strength=(0.15, 0.45),
    include_original=True,
):
    """Copies of one smooth path observed under random time warps.

    The variability in the result is purely compositional, which is the
    situation temporal registration is designed to undo.
    """
    rng = as_rng(seed)
    man = recipe.manifold
    trajs, ids = [], []
    if include_original:
        trajs.append(recipe(n_samples))
        ids.append("original")
    while len(trajs) < n_copies:
        kind = warp_kinds[int(rng.integers(len(warp_kinds)))]
        s = float(rng.uniform(*strength))
        g = synth_warp(n_samples, kind=kind, strength=s, seed=rng)
        trajs.append(recipe.warped(g, n_samples))
        ids.append(f"warp{len(trajs) - 1}-{kind}")
    return Dataset(manifold=man, trajectories=trajs, ids=ids, notes="warped copies")


def migration_dataset(seed=None, n_tracks=12, n_samples=80, warp_strength=0.35):
    """Synthetic seasonal-migration bundle on the sphere.

    Tracks follow a common north-to-south corridor (roughly North America
    to South America), each with a small smooth spatial detour and an
    individual random time warp; stands in for tracking data that cannot
    be shipped.
    """
    rng = as_rng(seed)
    s2 = Sphere()
    start = latlon_to_point(s2, 49.0, -110.0)
    end = latlon_to_point(s2, -30.0, -63.0)
    main = s2.log(start, end)
    side = s2.tangent(
        start, np.cross(start.coords, main.components / np.linalg.norm(main.components))
    )
    trajs, ids = [], []
    t = np.linspace(0.0, 1.0, n_samples)
    for i in range(n_tracks):
        amp = rng.uniform(0.04, 0.16)
        freq = rng.uniform(0.8, 1.6)
        phase = rng.uniform(0.0, np.pi)
        jitter = rng.uniform(-0.02, 0.02)
        g = synth_warp(
            n_samples,
            kind=("fast-slow", "slow-fast", "stop-and-go")[int(rng.integers(3))],
            strength=float(rng.uniform(0.1, warp_strength)),
            seed=rng,
        )
        tau = g(t)
        vals = np.empty((n_samples, 3))
        for k, u in enumerate(tau):
            wiggle = amp * np.sin(freq * np.pi * u + phase) + jitter
            vals[k] = s2._exp(start.coords, u * main.components + wiggle * side.components)
        trajs.append(Trajectory(s2, vals))
        ids.append(f"track{i:02d}")
    return Dataset(manifold=s2, trajectories=trajs, ids=ids, notes="synthetic migration bundle")


def _se2_track(se2, heading0, turn, turn_center, turn_width, speed, start_xy, n_samples):
    """Constant-speed planar track whose heading ramps by ``turn`` radians
    around ``turn_center`` (smoothstep); straight lines use turn = 0."""
    dense = 20 * n_samples
    t = np.linspace(0.0, 1.0, dense)
    u = np.clip((t - turn_center + turn_width) / (2.0 * turn_width), 0.0, 1.0)
    ramp = u * u * (3.0 - 2.0 * u)
    theta = heading0 + turn * ramp
    step = speed / (dense - 1)
    xy = np.cumsum(np.stack([np.cos(theta), np.sin(theta)], axis=1) * step, axis=0)
    xy += np.asarray(start_xy) - xy[0]
    idx = np.round(np.linspace(0, dense - 1, n_samples)).astype(int)
    vals = np.stack([se2.from_pose(theta[i], xy[i, 0], xy[i, 1]) for i in idx])
    return Trajectory(se2, vals)


def se2_intersection_dataset(
    seed=None,
    n_samples=100,
    warp_kind="stop-and-go",
    strength=0.95,
    rotation_weight=1.0,
):
    """The 3-class vehicle experiment: 5 right turns, 5 straight lines and
    4 left turns through an intersection, each observed under a random
    speed profile of the requested kind."""
    rng = as_rng(seed)
    se2 = SpecialEuclidean2(rotation_weight=rotation_weight)
    spec = [("right", 5, -np.pi / 2), ("straight", 5, 0.0), ("left", 4, np.pi / 2)]
    trajs, ids, labels = [], [], []
    for label, count, turn in spec:
        for i in range(count):
            # all vehicles enter along the same road and diverge only past
            # the corner, so unwarped paths overlap for most of their course
            base = _se2_track(
                se2,
                heading0=np.pi / 2 + rng.uniform(-0.04, 0.04),
                turn=turn * rng.uniform(0.92, 1.08) if turn else 0.0,
                turn_center=rng.uniform(0.62, 0.75),
                turn_width=rng.uniform(0.05, 0.10),
                speed=8.0 * rng.uniform(0.9, 1.1),
                start_xy=rng.uniform(-0.15, 0.15, size=2),
                n_samples=n_samples,
            )
            g = synth_warp(n_samples, kind=warp_kind, strength=strength, seed=rng)
            trajs.append(warp_trajectory(base, g))
            ids.append(f"{label}{i}")
            labels.append(label)
    return Dataset(
        manifold=se2,
        trajectories=trajs,
        ids=ids,
        labels=labels,
        notes="synthetic intersection tracks",
    )


def _harmonic_contour(weights, n_vertices=128):
    """Closed curve r(theta) = 1 + sum_m w_m cos(m theta), sampled densely."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_vertices, endpoint=False)
    r = np.ones_like(theta)
    for mode, w in weights:
        r = r + w * np.cos(mode * theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)


def contour_sequence_dataset(
    seed=None,
    n_classes=4,
    per_class=5,
    n_samples=17,
    n_points=100,
    max_weight=0.3,
    warp_strength=0.9,
    n_cycles=2,
):
    """Cyclic deforming-shape sequences on the pre-shape sphere.

    Class k oscillates between a circle and its class shape (harmonic
    ``k + 3``) over ``n_cycles`` cycles, the way silhouettes of a repeated
    activity do.  Random stop-and-go style warps de-phase the cycles, so
    cross-sectional comparison mixes classes up while registration
    re-phases them.  Harmonic amplitudes are rescaled so classes cannot be
    told apart by shape-space path length alone.
    """
    rng = as_rng(seed)
    qs = QSphere(n_points=n_points)
    trajs, ids, labels = [], [], []
    # shape-space arc length per unit amplitude grows with harmonic order
    length_scale = {3: 1.0, 4: 0.67, 5: 0.59, 6: 0.53}
    for cls in range(n_classes):
        mode = cls + 3
        for i in range(per_class):
            amp = max_weight * length_scale.get(mode, 1.7 / mode) * rng.uniform(0.8, 1.2)
            g = synth_warp(
                n_samples,
                kind=("stop-and-go", "fast-slow", "slow-fast")[int(rng.integers(3))],
                strength=float(rng.uniform(0.5, warp_strength)),
                seed=rng,
            )
            tau = g(np.linspace(0.0, 1.0, n_samples))
            vals = np.empty((n_samples, n_points, 2))
            for k, u in enumerate(tau):
                w = amp * np.sin(np.pi * n_cycles * u) ** 2
                vals[k] = qs.q_function(_harmonic_contour([(mode, w)])).coords
            trajs.append(Trajectory(qs, vals))
            ids.append(f"class{mode}-{i}")
            labels.append(f"harmonic-{mode}")
    return Dataset(
        manifold=qs,
        trajectories=trajs,
        ids=ids,
        labels=labels,
        notes="synthetic cyclic contour sequences",
    )
