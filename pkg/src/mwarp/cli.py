"""Command-line interface.

Subcommands: ingest, simulate, register, distmat, mean, model (fit, sample,
pvalue), classify, cluster, mds.  Outputs are machine-readable JSON/CSV and
deterministic given the same inputs, flags and seed.  Exit codes: 0 on
success, 1 on usage errors, 2 on data errors.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as mio
from ._validation import as_rng
from .analysis import distance_matrix, hierarchical_cluster, knn_classify, mds
from .datasets import (
    Dataset,
    contour_sequence_dataset,
    migration_dataset,
    random_trajectory_recipe,
    se2_intersection_dataset,
    warped_copies,
)
from .exceptions import MwarpError
from .ingest import ingest_contours, ingest_geo, ingest_se2
from .manifolds import get_manifold
from .model import TangentGaussianModel, log_density, p_value, sample
from .registration import align_pair
from .stats import KarcherMean, resolve_reference
from .tsrvf import compute_tsrvf, dh

__all__ = ["main", "cli_main", "build_parser"]


def _parse_reference(spec, manifold, trajs):
    if spec in ("default", "start-mean"):
        return resolve_reference(trajs, spec)
    if spec.startswith("fixed:"):
        payload = spec[len("fixed:"):]
        if manifold.name == "s2":
            coords = [float(x) for x in payload.split(",")]
            return manifold.point(coords, project=True)
        if manifold.name == "se2":
            theta, x, y = (float(v) for v in payload.split(","))
            return manifold.point(manifold.from_pose(theta, x, y))
        if manifold.name == "qsphere":
            if not payload.startswith("@"):
                raise ValueError(
                    "qsphere fixed reference takes '@<contour.csv>' with x,y rows"
                )
            pts = np.loadtxt(payload[1:], delimiter=",")
            return manifold.q_function(pts)
    raise ValueError(
        f"--ref-point must be 'default', 'start-mean' or 'fixed:...', got {spec!r}"
    )


def _load_dataset(args):
    ds = mio.load_dataset(args.input)
    return ds


def _add_common(p, ref=True, seed=False):
    p.add_argument("--out", required=True, help="output path (or prefix)")
    if ref:
        p.add_argument(
            "--ref-point",
            default="default",
            help="'default', 'start-mean' or 'fixed:<payload>'",
        )
    if seed:
        p.add_argument("--seed", type=int, default=0, help="random seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mwarp",
        description="Registration and statistics of time-warped trajectories on manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read external track files into a dataset")
    p.add_argument("--input", required=True)
    p.add_argument(
        "--format",
        default="auto",
        choices=["auto", "csv", "hurdat2", "se2", "contours", "json"],
    )
    p.add_argument("--grid", type=int, required=True, help="samples per trajectory")
    p.add_argument("--n-points", type=int, default=100, help="points per contour")
    p.add_argument(
        "--parameterization",
        default="time",
        choices=["time", "arclength"],
        help="resampling parameter: observation time or arc length",
    )
    _add_common(p, ref=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("simulate", help="generate a synthetic dataset")
    p.add_argument(
        "--kind",
        required=True,
        choices=["migration", "se2-classes", "contours", "warped-copies"],
    )
    p.add_argument("--manifold", default="s2", choices=["s2", "se2", "qsphere"])
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--n", type=int, default=12, help="number of trajectories")
    p.add_argument("--warp-kind", default="stop-and-go")
    p.add_argument("--strength", type=float, default=0.5)
    _add_common(p, ref=False, seed=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("register", help="pairwise temporal registration")
    p.add_argument("--input", required=True, help="dataset JSON")
    p.add_argument("--i", type=int, default=0, help="index of the fixed trajectory")
    p.add_argument("--j", type=int, default=1, help="index of the warped trajectory")
    _add_common(p)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("distmat", help="pairwise distance matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--metric", default="ds", choices=["dh", "ds", "dx"])
    _add_common(p)
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("mean", help="Karcher mean, variance profile and PCA axes")
    p.add_argument("--input", required=True)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-4)
    _add_common(p)
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("model", help="tangent Gaussian model")
    msub = p.add_subparsers(dest="model_command", required=True)

    pf = msub.add_parser("fit", help="fit the model from a dataset")
    pf.add_argument("--input", required=True)
    pf.add_argument("--no-align", action="store_true", help="skip registration")
    pf.add_argument("--n-times", type=int, default=None)
    _add_common(pf)
    pf.set_defaults(func=cmd_model_fit)

    ps = msub.add_parser("sample", help="draw trajectories from a model")
    ps.add_argument("--model", required=True)
    ps.add_argument("--n", type=int, default=1)
    _add_common(ps, ref=False, seed=True)
    ps.set_defaults(func=cmd_model_sample)

    pp = msub.add_parser("pvalue", help="bootstrap p-values of trajectories")
    pp.add_argument("--model", required=True)
    pp.add_argument("--input", required=True)
    pp.add_argument("--n-mc", type=int, default=10000)
    _add_common(pp, ref=False, seed=True)
    pp.set_defaults(func=cmd_model_pvalue)

    p = sub.add_parser("classify", help="leave-one-out k-NN classification")
    p.add_argument("--input", required=True, help="labeled dataset JSON")
    p.add_argument("--distmat", default=None, help="reuse a distance matrix CSV")
    p.add_argument("--metric", default="ds", choices=["dh", "ds", "dx"])
    p.add_argument("--k", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cluster", help="average-linkage dendrogram")
    p.add_argument("--distmat", required=True)
    p.add_argument("--n-clusters", type=int, default=None)
    _add_common(p, ref=False)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("mds", help="classical multidimensional scaling")
    p.add_argument("--distmat", required=True)
    p.add_argument("--dim", type=int, default=2)
    _add_common(p, ref=False)
    p.set_defaults(func=cmd_mds)

    return parser


def cmd_ingest(args):
    fmt = args.format
    if fmt in ("auto", "csv", "hurdat2"):
        ds = ingest_geo(
            args.input, args.grid, fmt=fmt, parameterization=args.parameterization
        )
    elif fmt == "se2":
        ds = ingest_se2(args.input, args.grid, parameterization=args.parameterization)
    elif fmt == "contours":
        ds = ingest_contours(args.input, args.grid, n_points=args.n_points)
    else:
        ds = mio.load_dataset(args.input)
    mio.save_dataset(args.out, ds)
    print(f"ingested {len(ds)} trajectories on {ds.manifold.name} -> {args.out}")
    return 0


def cmd_simulate(args):
    if args.kind == "migration":
        ds = migration_dataset(seed=args.seed, n_tracks=args.n, n_samples=args.grid)
    elif args.kind == "se2-classes":
        ds = se2_intersection_dataset(
            seed=args.seed,
            n_samples=args.grid,
            warp_kind=args.warp_kind,
            strength=args.strength,
        )
    elif args.kind == "contours":
        ds = contour_sequence_dataset(seed=args.seed, n_samples=args.grid)
    else:
        man = get_manifold(args.manifold)
        rng = as_rng(args.seed)
        recipe = random_trajectory_recipe(man, rng)
        ds = warped_copies(recipe, args.n, args.grid, seed=rng)
    mio.save_dataset(args.out, ds)
    print(f"simulated {len(ds)} trajectories ({args.kind}) -> {args.out}")
    return 0


def cmd_register(args):
    ds = _load_dataset(args)
    t1, t2 = ds.trajectories[args.i], ds.trajectories[args.j]
    c = _parse_reference(args.ref_point, ds.manifold, ds.trajectories)
    h1, h2 = compute_tsrvf(t1, c), compute_tsrvf(t2, c)
    before = dh(h1, h2)
    res = align_pair(h1, h2)
    out = Path(args.out)
    warp_path = out.with_suffix(".warp.csv")
    mio.write_warps_csv(warp_path, [res.warp], ids=[f"{ds.ids[args.i]}->{ds.ids[args.j]}"])
    mio.save_json(out, {"d_before": before, "d_after": res.distance})
    print(f"d_before={before:.6g} d_after={res.distance:.6g} -> {out}, {warp_path}")
    return 0


def cmd_distmat(args):
    ds = _load_dataset(args)
    c = _parse_reference(args.ref_point, ds.manifold, ds.trajectories)
    dm = distance_matrix(ds.trajectories, metric=args.metric, reference=c, ids=ds.ids)
    mio.write_matrix_csv(args.out, dm)
    print(f"{args.metric} matrix for {len(ds)} trajectories -> {args.out}")
    return 0


def cmd_mean(args):
    ds = _load_dataset(args)
    c = _parse_reference(args.ref_point, ds.manifold, ds.trajectories)
    aligned = KarcherMean(
        reference=c, align=True, tol=args.tol, max_iter=args.max_iter
    ).fit(ds.trajectories)
    unaligned = KarcherMean(reference=c, align=False).fit(ds.trajectories)
    out = Path(args.out)
    mio.save_trajectory(out, aligned.mean_)
    mio.write_rho_csv(
        out.with_suffix(".rho.csv"),
        aligned.mean_.times,
        unaligned.rho_,
        aligned.rho_,
    )
    mio.write_warps_csv(out.with_suffix(".warps.csv"), aligned.warps_, ids=ds.ids)
    mio.write_pca_axes_csv(
        out.with_suffix(".pca.csv"),
        aligned.mean_.times,
        aligned.pca_directions_,
        aligned.pca_singular_values_,
    )
    red = 100.0 * (1.0 - aligned.summary_.integrated_rho() / max(
        unaligned.summary_.integrated_rho(), 1e-300
    ))
    print(
        f"mean over {len(ds)} trajectories: converged={aligned.converged_} "
        f"iterations={aligned.n_iter_} variance_reduction={red:.1f}% -> {out}"
    )
    return 0


def cmd_model_fit(args):
    ds = _load_dataset(args)
    c = _parse_reference(args.ref_point, ds.manifold, ds.trajectories)
    est = TangentGaussianModel(
        align=not args.no_align, reference=c, n_times=args.n_times
    ).fit(ds.trajectories)
    mio.save_model(args.out, est.model_)
    print(f"model with {est.model_.n_times} grid times -> {args.out}")
    return 0


def cmd_model_sample(args):
    model = mio.load_model(args.model)
    streams = np.random.SeedSequence(args.seed).spawn(args.n)
    trajs = [sample(model, np.random.default_rng(s)) for s in streams]
    ds = Dataset(
        manifold=model.manifold,
        trajectories=trajs,
        ids=[f"sample{i}" for i in range(args.n)],
        notes=f"model samples, seed={args.seed}",
    )
    mio.save_dataset(args.out, ds)
    print(f"{args.n} samples -> {args.out}")
    return 0


def cmd_model_pvalue(args):
    model = mio.load_model(args.model)
    ds = mio.load_dataset(args.input)
    rows = []
    for tid, traj in zip(ds.ids, ds.trajectories):
        rows.append(
            {
                "id": tid,
                "log_density": log_density(model, traj),
                "p_value": p_value(model, traj, n_samples=args.n_mc, seed=args.seed),
            }
        )
    mio.save_json(args.out, {"schema": mio.SCHEMA, "n_mc": args.n_mc, "results": rows})
    mean_p = float(np.mean([r["p_value"] for r in rows]))
    print(f"mean p-value {mean_p:.4f} over {len(rows)} trajectories -> {args.out}")
    return 0


def cmd_classify(args):
    ds = _load_dataset(args)
    if ds.labels is None:
        raise MwarpError("classification needs a labeled dataset")
    if args.distmat:
        dm = mio.read_matrix_csv(args.distmat)
    else:
        c = _parse_reference(args.ref_point, ds.manifold, ds.trajectories)
        dm = distance_matrix(ds.trajectories, metric=args.metric, reference=c, ids=ds.ids)
    preds, rate = knn_classify(dm, ds.labels, k=args.k)
    mio.save_json(
        args.out,
        {
            "schema": mio.SCHEMA,
            "k": args.k,
            "metric": dm.metric,
            "rate": rate,
            "predictions": [
                {"id": i, "label": l, "predicted": p}
                for i, l, p in zip(ds.ids, ds.labels, preds)
            ],
        },
    )
    print(f"leave-one-out {args.k}-NN rate {100 * rate:.1f}% -> {args.out}")
    return 0


def cmd_cluster(args):
    dm = mio.read_matrix_csv(args.distmat)
    dendro = hierarchical_cluster(dm)
    doc = {"schema": mio.SCHEMA, "ids": dm.ids, **dendro.to_dict()}
    if args.n_clusters:
        doc["cut"] = {
            "n_clusters": args.n_clusters,
            "labels": dendro.cut(args.n_clusters).tolist(),
        }
    mio.save_json(args.out, doc)
    print(f"dendrogram over {len(dm)} items -> {args.out}")
    return 0


def cmd_mds(args):
    dm = mio.read_matrix_csv(args.distmat)
    coords = mds(dm, dim=args.dim)
    mio.write_coords_csv(args.out, coords, ids=dm.ids)
    print(f"{args.dim}-d embedding of {len(dm)} items -> {args.out}")
    return 0


def cli_main(argv=None):
    """Entry point returning the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args) or 0
    except MwarpError as e:
        print(f"error[data]: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"error[data]: {e}", file=sys.stderr)
        return 2


def main(argv=None):
    sys.exit(cli_main(argv))


if __name__ == "__main__":
    main()
