import json
from pathlib import Path

import numpy as np
import pytest

from mwarp.cli import cli_main
from mwarp import io as mio

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    return cli_main([str(a) for a in argv])


@pytest.fixture
def dataset_path(tmp_path):
    out = tmp_path / "ds.json"
    code = run(
        "simulate", "--kind", "warped-copies", "--manifold", "s2",
        "--grid", "50", "--n", "6", "--seed", "3", "--out", out,
    )
    assert code == 0
    return out


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self):
        assert run("frobnicate") == 1

    def test_missing_required_flag_is_usage_error(self):
        assert run("distmat") == 1

    def test_missing_file_is_data_error(self, tmp_path):
        assert run(
            "distmat", "--input", tmp_path / "nope.json", "--out", tmp_path / "o.csv"
        ) == 2

    def test_malformed_json_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run("distmat", "--input", bad, "--out", tmp_path / "o.csv") == 2


class TestRegister:
    def test_identical_inputs_give_zero_and_identity(self, tmp_path, dataset_path):
        # duplicate a trajectory so i and j are identical
        ds = mio.load_dataset(dataset_path)
        dup = ds.subset([0, 0])
        dup_path = tmp_path / "dup.json"
        mio.save_dataset(dup_path, dup)
        out = tmp_path / "reg.json"
        assert run("register", "--input", dup_path, "--i", 0, "--j", 1,
                   "--ref-point", "start-mean", "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["d_after"] == 0.0
        warps, _ = mio.read_warps_csv(out.with_suffix(".warp.csv"))
        assert warps[0].is_identity()

    def test_register_reduces_distance(self, tmp_path, dataset_path):
        out = tmp_path / "reg.json"
        assert run("register", "--input", dataset_path, "--i", 0, "--j", 2,
                   "--ref-point", "start-mean", "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["d_after"] <= report["d_before"]


class TestPipelines:
    def test_distmat_classify_cluster_mds(self, tmp_path):
        ds_path = tmp_path / "se2.json"
        assert run("simulate", "--kind", "se2-classes", "--grid", "60",
                   "--seed", "0", "--out", ds_path) == 0
        dm_path = tmp_path / "dm.csv"
        assert run("distmat", "--input", ds_path, "--metric", "ds",
                   "--out", dm_path) == 0
        cls_path = tmp_path / "cls.json"
        assert run("classify", "--input", ds_path, "--distmat", dm_path,
                   "--k", "1", "--out", cls_path) == 0
        report = json.loads(cls_path.read_text())
        assert report["rate"] == 1.0
        dendro_path = tmp_path / "dendro.json"
        assert run("cluster", "--distmat", dm_path, "--n-clusters", "3",
                   "--out", dendro_path) == 0
        dendro = json.loads(dendro_path.read_text())
        assert len(dendro["cut"]["labels"]) == 14
        mds_path = tmp_path / "coords.csv"
        assert run("mds", "--distmat", dm_path, "--dim", "2", "--out", mds_path) == 0
        assert mds_path.read_text().splitlines()[0] == "id,dim0,dim1"

    def test_mean_emits_all_outputs(self, tmp_path, dataset_path):
        out = tmp_path / "mean.json"
        assert run("mean", "--input", dataset_path, "--ref-point", "start-mean",
                   "--out", out) == 0
        assert out.exists()
        rho_lines = out.with_suffix(".rho.csv").read_text().splitlines()
        assert rho_lines[0] == "t,rho_unaligned,rho_aligned"
        unaligned = np.array([float(l.split(",")[1]) for l in rho_lines[1:]])
        aligned = np.array([float(l.split(",")[2]) for l in rho_lines[1:]])
        assert aligned.sum() < unaligned.sum()
        assert out.with_suffix(".warps.csv").exists()
        assert out.with_suffix(".pca.csv").exists()

    def test_model_fit_sample_pvalue(self, tmp_path, dataset_path):
        model_path = tmp_path / "model.json"
        assert run("model", "fit", "--input", dataset_path,
                   "--ref-point", "start-mean", "--out", model_path) == 0
        samples_path = tmp_path / "samples.json"
        assert run("model", "sample", "--model", model_path, "--n", "4",
                   "--seed", "1", "--out", samples_path) == 0
        assert len(mio.load_dataset(samples_path)) == 4
        pv_path = tmp_path / "pv.json"
        assert run("model", "pvalue", "--model", model_path, "--input", samples_path,
                   "--n-mc", "200", "--seed", "2", "--out", pv_path) == 0
        report = json.loads(pv_path.read_text())
        assert len(report["results"]) == 4
        assert all(0.0 <= r["p_value"] <= 1.0 for r in report["results"])

    def test_ingest_hurdat2(self, tmp_path):
        out = tmp_path / "hur.json"
        assert run("ingest", "--input", DATA_DIR / "hurdat2_sample.txt",
                   "--format", "hurdat2", "--grid", "30", "--out", out) == 0
        assert len(mio.load_dataset(out)) == 10


class TestDeterminism:
    def test_same_seed_same_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            assert run("simulate", "--kind", "migration", "--grid", "30",
                       "--n", "4", "--seed", "11", "--out", out) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_model_sampling_deterministic(self, tmp_path, dataset_path):
        model_path = tmp_path / "model.json"
        run("model", "fit", "--input", dataset_path, "--ref-point", "start-mean",
            "--out", model_path)
        s1, s2 = tmp_path / "s1.json", tmp_path / "s2.json"
        for out in (s1, s2):
            assert run("model", "sample", "--model", model_path, "--n", "2",
                       "--seed", "9", "--out", out) == 0
        assert s1.read_bytes() == s2.read_bytes()
