"""Container formats and tabular exports.

JSON is the canonical interchange format (schema tag ``mwarp/1``); CSV is
the tabular export.  Point encodings per geometry:

* ``s2``: ``[x, y, z]`` unit vector;
* ``se2``: ``[theta, x, y]`` with the heading in radians (the rotation
  matrix is rebuilt on load);
* ``qsphere``: ``[[qx, qy], ...]`` the full q-array.

All writers are deterministic: identical inputs produce identical bytes.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .datasets import Dataset
from .manifolds import get_manifold
from .manifolds.se2 import SpecialEuclidean2
from .model import GaussianModel
from .trajectory import Trajectory, Warp

__all__ = [
    "SCHEMA",
    "trajectory_to_dict",
    "trajectory_from_dict",
    "dataset_to_dict",
    "dataset_from_dict",
    "save_trajectory",
    "load_trajectory",
    "save_dataset",
    "load_dataset",
    "save_model",
    "load_model",
    "write_warps_csv",
    "read_warps_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_rho_csv",
    "write_coords_csv",
    "write_pca_axes_csv",
    "save_json",
    "load_json",
]

SCHEMA = "mwarp/1"


def _encode_points(man, values):
    if man.name == "se2":
        return [list(SpecialEuclidean2.to_pose(v)) for v in values]
    return np.asarray(values).tolist()


def _decode_points(man, rows):
    if man.name == "se2":
        return np.stack([SpecialEuclidean2.from_pose(*row) for row in rows])
    return np.asarray(rows, dtype=float)


def _manifold_header(man):
    spec = man.spec()
    name = spec.pop("name")
    header = {"manifold": name}
    if spec:
        header["manifold_params"] = spec
    return header


def _manifold_from_header(data):
    return get_manifold(data["manifold"], **data.get("manifold_params", {}))


def trajectory_to_dict(traj):
    return {
        "schema": SCHEMA,
        **_manifold_header(traj.manifold),
        "T": traj.n_samples,
        "points": _encode_points(traj.manifold, traj.values),
    }


def trajectory_from_dict(data):
    _check_schema(data)
    man = _manifold_from_header(data)
    traj = Trajectory(man, _decode_points(man, data["points"]))
    if "T" in data and traj.n_samples != int(data["T"]):
        raise ValueError("declared T does not match the point list")
    return traj


def dataset_to_dict(ds):
    doc = {
        "schema": SCHEMA,
        **_manifold_header(ds.manifold),
        "T": ds.n_samples,
        "notes": ds.notes,
        "trajectories": [
            {
                "id": ds.ids[i],
                "points": _encode_points(ds.manifold, t.values),
            }
            for i, t in enumerate(ds.trajectories)
        ],
    }
    if ds.labels is not None:
        for i, entry in enumerate(doc["trajectories"]):
            entry["label"] = ds.labels[i]
    return doc


def dataset_from_dict(data):
    _check_schema(data)
    man = _manifold_from_header(data)
    entries = data["trajectories"]
    trajs = [Trajectory(man, _decode_points(man, e["points"])) for e in entries]
    labels = [e.get("label") for e in entries]
    if all(l is None for l in labels):
        labels = None
    return Dataset(
        manifold=man,
        trajectories=trajs,
        ids=[str(e["id"]) for e in entries],
        labels=labels,
        notes=data.get("notes", ""),
    )


def _check_schema(data):
    if data.get("schema") != SCHEMA:
        raise ValueError(f"expected schema {SCHEMA!r}, got {data.get('schema')!r}")


def save_json(path, doc):
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def load_json(path):
    return json.loads(Path(path).read_text())


def save_trajectory(path, traj):
    save_json(path, trajectory_to_dict(traj))


def load_trajectory(path):
    return trajectory_from_dict(load_json(path))


def save_dataset(path, ds):
    save_json(path, dataset_to_dict(ds))


def load_dataset(path):
    data = load_json(path)
    if "trajectories" in data:
        return dataset_from_dict(data)
    # single-trajectory container: lift to a one-element dataset
    traj = trajectory_from_dict(data)
    return Dataset(manifold=traj.manifold, trajectories=[traj], ids=["0"])


def save_model(path, model):
    save_json(path, model.to_dict())


def load_model(path):
    return GaussianModel.from_dict(load_json(path))


# ----------------------------------------------------------------------
# CSV exports
# ----------------------------------------------------------------------


def _open_writer(path):
    return open(path, "w", newline="")


def write_warps_csv(path, warps, ids=None):
    """Warps as columns: header ``t,<id>,...``, one row per grid time."""
    warps = list(warps)
    ids = ids if ids is not None else [str(i) for i in range(len(warps))]
    times = warps[0].times
    with _open_writer(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t", *[str(i) for i in ids]])
        for k, t in enumerate(times):
            w.writerow([repr(float(t)), *[repr(float(g.values[k])) for g in warps]])


def read_warps_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = np.asarray(body, dtype=float).T
    return [Warp(c) for c in cols[1:]], header[1:]


def write_matrix_csv(path, dm):
    """Distance matrix with an id header row/column and a metric comment."""
    with _open_writer(path) as fh:
        fh.write(f"# metric,{dm.metric}\n")
        w = csv.writer(fh)
        w.writerow(["id", *[str(i) for i in dm.ids]])
        for i, row in enumerate(dm.values):
            w.writerow([str(dm.ids[i]), *[repr(float(x)) for x in row]])


def read_matrix_csv(path):
    from .analysis import DistanceMatrix

    metric = "ds"
    with open(path, newline="") as fh:
        first = fh.readline()
        if first.startswith("# metric,"):
            metric = first.strip().split(",", 1)[1]
            rows = list(csv.reader(fh))
        else:
            rows = list(csv.reader([first] + fh.readlines()))
    ids = rows[0][1:]
    values = np.asarray([r[1:] for r in rows[1:]], dtype=float)
    return DistanceMatrix(values=values, metric=metric, ids=ids)


def write_rho_csv(path, times, rho_unaligned, rho_aligned):
    with _open_writer(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t", "rho_unaligned", "rho_aligned"])
        for t, ru, ra in zip(times, rho_unaligned, rho_aligned):
            w.writerow([repr(float(t)), repr(float(ru)), repr(float(ra))])


def write_coords_csv(path, coords, ids=None):
    coords = np.asarray(coords)
    ids = ids if ids is not None else [str(i) for i in range(len(coords))]
    with _open_writer(path) as fh:
        w = csv.writer(fh)
        w.writerow(["id", *[f"dim{k}" for k in range(coords.shape[1])]])
        for i, row in enumerate(coords):
            w.writerow([str(ids[i]), *[repr(float(x)) for x in row]])


def write_pca_axes_csv(path, times, pca_directions, pca_singular_values, top=2):
    """Per-time top principal directions and singular values, for plotting
    tangential variance ellipses along the mean."""
    top = min(top, pca_directions.shape[2])
    d = pca_directions.shape[1]
    with _open_writer(path) as fh:
        w = csv.writer(fh)
        header = ["t"]
        for k in range(top):
            header += [f"sigma{k + 1}"] + [f"u{k + 1}_{j}" for j in range(d)]
        w.writerow(header)
        for i, t in enumerate(times):
            row = [repr(float(t))]
            for k in range(top):
                row.append(repr(float(pca_singular_values[i][k])))
                row += [repr(float(x)) for x in pca_directions[i][:, k]]
            w.writerow(row)
