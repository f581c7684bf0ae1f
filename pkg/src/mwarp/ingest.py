"""Readers for external track formats.

Supported inputs:

* geographic CSV: ``id,time,lat,lon`` rows (header optional), degrees;
* HURDAT2 best-track text (fixed-field, comma separated: header rows with
  the basin/cyclone id, name and row count, then one data row per fix);
* SE(2) CSV: ``id,time,theta,x,y`` rows, heading in radians;
* contour sequences: blocks of ``x,y`` rows separated by blank lines
  (one file per trajectory), or a JSON variant with the same content.

Every reader resamples tracks to a common grid of T samples, by
normalized observation time by default or by arc length on request,
using piecewise-geodesic interpolation between observations.
"""

import json
from datetime import datetime
from pathlib import Path

import numpy as np

from .datasets import Dataset
from .exceptions import EmptyTrackError, ParseError
from .manifolds import QSphere, SpecialEuclidean2, Sphere, latlon_to_point
from .trajectory import Trajectory

__all__ = ["ingest_geo", "ingest_se2", "ingest_contours", "parse_hurdat2"]

MIN_OBSERVATIONS = 4


def _resample_track(man, raw_values, params, n_samples):
    """Piecewise-geodesic resampling of observed points at uniform params."""
    params = np.asarray(params, dtype=float)
    keep = np.concatenate([[True], np.diff(params) > 1e-12])
    params = params[keep]
    raw_values = raw_values[keep]
    if len(raw_values) < 2:
        raise EmptyTrackError("track collapses to fewer than 2 distinct observations")
    params = (params - params[0]) / (params[-1] - params[0])
    targets = np.linspace(0.0, 1.0, n_samples)
    idx = np.clip(np.searchsorted(params, targets, side="right") - 1, 0, len(params) - 2)
    vals = np.empty((n_samples,) + raw_values.shape[1:])
    for k, (i, u) in enumerate(zip(idx, targets)):
        span = params[i + 1] - params[i]
        frac = (u - params[i]) / span
        if frac <= 0.0:
            vals[k] = raw_values[i]
        elif frac >= 1.0:
            vals[k] = raw_values[i + 1]
        else:
            step = frac * man._log(raw_values[i], raw_values[i + 1])
            vals[k] = man._exp(raw_values[i], step)
    return Trajectory(man, vals)


def _arclength_params(man, raw_values):
    seg = [man._dist(a, b) for a, b in zip(raw_values[:-1], raw_values[1:])]
    return np.concatenate([[0.0], np.cumsum(seg)])


def _finish_tracks(man, tracks, n_samples, parameterization, notes, min_observations):
    trajs, ids = [], []
    for track_id, values, times in tracks:
        if len(values) < min_observations:
            continue
        values = np.asarray(values)
        if parameterization == "arclength":
            params = _arclength_params(man, values)
        elif parameterization == "time":
            params = np.asarray(times, dtype=float)
            order = np.argsort(params, kind="stable")
            params = params[order]
            values = values[order]
        else:
            raise ValueError(
                f"parameterization must be 'time' or 'arclength', got {parameterization!r}"
            )
        if params[-1] - params[0] <= 1e-12:
            raise EmptyTrackError(f"track {track_id!r} has no usable extent")
        trajs.append(_resample_track(man, values, params, n_samples))
        ids.append(track_id)
    if not trajs:
        raise EmptyTrackError("no track has enough observations")
    return Dataset(manifold=man, trajectories=trajs, ids=ids, notes=notes)


# ----------------------------------------------------------------------
# geographic tracks
# ----------------------------------------------------------------------


def _parse_geo_csv(lines):
    tracks = {}
    order = []
    seen_data = False
    for lineno, line in enumerate(lines, start=1):
        row = line.strip()
        if not row or row.startswith("#"):
            continue
        parts = [p.strip() for p in row.split(",")]
        if len(parts) < 4:
            raise ParseError(f"expected 'id,time,lat,lon', got {row!r}", line=lineno)
        if not seen_data and not _is_number(parts[2]):
            continue  # header row
        seen_data = True
        try:
            stamp, lat, lon = float(parts[1]), float(parts[2]), float(parts[3])
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", line=lineno) from None
        if not -90.0 <= lat <= 90.0:
            raise ParseError(f"latitude {lat} out of range", line=lineno)
        key = parts[0]
        if key not in tracks:
            tracks[key] = []
            order.append(key)
        tracks[key].append((stamp, lat, lon))
    return [(k, tracks[k]) for k in order]


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def _hurdat_coord(token, positive, negative, lineno):
    token = token.strip()
    if not token or token[-1] not in (positive + negative):
        raise ParseError(f"bad coordinate field {token!r}", line=lineno)
    try:
        value = float(token[:-1])
    except ValueError:
        raise ParseError(f"bad coordinate field {token!r}", line=lineno) from None
    return value if token[-1] in positive else -value


def parse_hurdat2(lines):
    """Parse HURDAT2 text into ``(storm_id, name, observations)`` tuples,
    where observations are ``(timestamp_hours, lat, lon)``."""
    storms = []
    expected = 0
    current = None
    for lineno, line in enumerate(lines, start=1):
        row = line.strip()
        if not row:
            continue
        parts = [p.strip() for p in row.split(",")]
        looks_like_header = len(parts[0]) == 8 and parts[0][:2].isalpha()
        if looks_like_header:
            if current is not None and not current[2]:
                raise EmptyTrackError(f"storm {current[0]} declares no data rows")
            if len(parts) < 3:
                raise ParseError(f"malformed header {row!r}", line=lineno)
            try:
                expected = int(parts[2])
            except ValueError:
                raise ParseError(f"bad row count in header {row!r}", line=lineno) from None
            current = (parts[0], parts[1], [])
            storms.append(current)
            continue
        if current is None:
            raise ParseError("data row before any storm header", line=lineno)
        if len(parts) < 7:
            raise ParseError(f"data row has {len(parts)} fields, expected >= 7", line=lineno)
        date, hhmm = parts[0], parts[1]
        if len(date) != 8 or not date.isdigit() or len(hhmm) != 4 or not hhmm.isdigit():
            raise ParseError(f"bad date/time fields {date!r} {hhmm!r}", line=lineno)
        try:
            day = datetime(int(date[:4]), int(date[4:6]), int(date[6:8]))
        except ValueError:
            raise ParseError(f"invalid calendar date {date!r}", line=lineno) from None
        # hours since an arbitrary origin; only differences matter
        stamp = day.toordinal() * 24.0 + int(hhmm[:2]) + int(hhmm[2:]) / 60.0
        lat = _hurdat_coord(parts[4], "N", "S", lineno)
        lon = _hurdat_coord(parts[5], "E", "W", lineno)
        current[2].append((stamp, lat, lon))
    for sid, _, obs in storms:
        if len(obs) == 0:
            raise EmptyTrackError(f"storm {sid} declares no data rows")
    return storms


def ingest_geo(
    path, n_samples, fmt="auto", parameterization="time", min_observations=MIN_OBSERVATIONS
):
    """Read geographic tracks (CSV or HURDAT2) onto the unit sphere.

    Latitude/longitude pairs are mapped by the documented convention
    (lat 90 -> north pole (0, 0, 1)); tracks with fewer than
    ``min_observations`` fixes (default 4) are dropped, and the rest are
    resampled to ``n_samples`` uniform points.  Raising the threshold (for
    example to 20 six-hourly fixes) is the documented way to select
    well-observed storm subsets reproducibly.
    """
    path = Path(path)
    text = path.read_text().splitlines()
    if fmt == "auto":
        first = next((l for l in text if l.strip()), "")
        token = first.split(",")[0].strip()
        fmt = "hurdat2" if len(token) == 8 and token[:2].isalpha() and token[2:].isdigit() else "csv"
    s2 = Sphere()
    if fmt == "hurdat2":
        parsed = parse_hurdat2(text)
        tracks = [
            (f"{sid} {name}".strip(), [latlon_to_point(s2, la, lo).coords for _, la, lo in obs], [t for t, _, _ in obs])
            for sid, name, obs in parsed
        ]
        notes = f"HURDAT2 ingest of {path.name}"
    elif fmt == "csv":
        parsed = _parse_geo_csv(text)
        tracks = [
            (key, [latlon_to_point(s2, la, lo).coords for _, la, lo in obs], [t for t, _, _ in obs])
            for key, obs in parsed
        ]
        notes = f"geo CSV ingest of {path.name}"
    else:
        raise ValueError(f"fmt must be 'auto', 'csv' or 'hurdat2', got {fmt!r}")
    return _finish_tracks(s2, tracks, n_samples, parameterization, notes, min_observations)


# ----------------------------------------------------------------------
# SE(2) tracks
# ----------------------------------------------------------------------


def ingest_se2(path, n_samples, parameterization="time", rotation_weight=1.0):
    """Read SE(2) tracks from ``id,time,theta,x,y`` CSV rows (theta radians)."""
    path = Path(path)
    se2 = SpecialEuclidean2(rotation_weight=rotation_weight)
    tracks = {}
    order = []
    seen_data = False
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        row = line.strip()
        if not row or row.startswith("#"):
            continue
        parts = [p.strip() for p in row.split(",")]
        if len(parts) < 5:
            raise ParseError(f"expected 'id,time,theta,x,y', got {row!r}", line=lineno)
        if not seen_data and not _is_number(parts[2]):
            continue
        seen_data = True
        try:
            t, theta, x, y = (float(p) for p in parts[1:5])
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", line=lineno) from None
        key = parts[0]
        if key not in tracks:
            tracks[key] = []
            order.append(key)
        tracks[key].append((t, se2.from_pose(theta, x, y)))
    prepared = [
        (key, [c for _, c in tracks[key]], [t for t, _ in tracks[key]]) for key in order
    ]
    return _finish_tracks(
        se2,
        prepared,
        n_samples,
        parameterization,
        f"SE(2) ingest of {path.name}",
        MIN_OBSERVATIONS,
    )


# ----------------------------------------------------------------------
# contour sequences
# ----------------------------------------------------------------------


def _contours_from_csv(text):
    blocks = []
    current = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        row = line.strip()
        if not row:
            if current:
                blocks.append(np.asarray(current))
                current = []
            continue
        if row.startswith("#"):
            continue
        parts = row.split(",")
        if len(parts) != 2:
            raise ParseError(f"contour rows are 'x,y', got {row!r}", line=lineno)
        try:
            current.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError(f"non-numeric contour row {row!r}", line=lineno) from None
    if current:
        blocks.append(np.asarray(current))
    return blocks


def _contours_from_json(text):
    data = json.loads(text)
    contours = data["contours"] if isinstance(data, dict) else data
    return [np.asarray(c, dtype=float) for c in contours]


def _sequence_to_trajectory(qs, contours, n_samples):
    if len(contours) < n_samples:
        raise EmptyTrackError(
            f"sequence has {len(contours)} contours, fewer than the requested {n_samples}"
        )
    idx = np.round(np.linspace(0, len(contours) - 1, n_samples)).astype(int)
    vals = np.stack([qs.q_function(contours[i]).coords for i in idx])
    return Trajectory(qs, vals)


def ingest_contours(path, n_samples, n_points=100):
    """Read contour sequences onto the pre-shape sphere.

    ``path`` may be a single file (one trajectory) or a directory whose
    ``*.csv`` / ``*.json`` files each hold one sequence.  Sequences are
    down-sampled to ``n_samples`` contours; every contour is resampled to
    ``n_points`` points by arc length before taking its q-function.
    """
    path = Path(path)
    qs = QSphere(n_points=n_points)
    files = (
        sorted(list(path.glob("*.csv")) + list(path.glob("*.json")))
        if path.is_dir()
        else [path]
    )
    if not files:
        raise EmptyTrackError(f"no contour files under {path}")
    trajs, ids = [], []
    for f in files:
        text = f.read_text()
        contours = (
            _contours_from_json(text) if f.suffix == ".json" else _contours_from_csv(text)
        )
        if not contours:
            raise EmptyTrackError(f"{f.name} contains no contours")
        trajs.append(_sequence_to_trajectory(qs, contours, n_samples))
        ids.append(f.stem)
    return Dataset(
        manifold=qs, trajectories=trajs, ids=ids, notes=f"contour ingest of {path.name}"
    )
