import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mwarp import EmptyTrackError, ParseError
from mwarp.ingest import ingest_contours, ingest_geo, ingest_se2, parse_hurdat2
from mwarp.io import load_dataset, save_dataset
from mwarp.manifolds.sphere import point_to_latlon

DATA_DIR = Path(__file__).resolve().parent.parent / "data"

HURDAT_SNIPPET = """\
AL011851,            UNNAMED,      4,
18510625, 0000,  , HU, 28.0N,  94.8W,  80, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999,
18510625, 0600,  , HU, 28.0N,  95.4W,  80, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999,
18510625, 1200,  , HU, 28.1N,  96.0W,  80, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999,
18510625, 1800,  , HU, 28.2N,  96.5W,  80, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999, -999,
"""


class TestGeoCsv:
    def write(self, tmp_path, text):
        path = tmp_path / "tracks.csv"
        path.write_text(text)
        return path

    def test_pole_and_origin_conventions(self, tmp_path):
        rows = ["id,time,lat,lon"]
        rows += [f"a,{i},90,{i * 10}" for i in range(4)]
        rows += [f"b,{i},0,0" for i in range(4)]
        # make tracks non-degenerate by a last distinct point
        rows[4] = "a,3,80,0"
        rows[-1] = "b,3,10,0"
        ds = ingest_geo(self.write(tmp_path, "\n".join(rows)), n_samples=4)
        assert_allclose(ds.trajectories[0].values[0], [0, 0, 1], atol=1e-12)
        assert_allclose(ds.trajectories[1].values[0], [1, 0, 0], atol=1e-12)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = self.write(tmp_path, "id,time,lat,lon\na,0,10,20\na,1,oops,30\n")
        with pytest.raises(ParseError) as err:
            ingest_geo(path, n_samples=4)
        assert err.value.line == 3

    def test_latitude_range_checked(self, tmp_path):
        path = self.write(tmp_path, "a,0,95,0\na,1,10,0\n")
        with pytest.raises(ParseError):
            ingest_geo(path, n_samples=4)

    def test_short_tracks_dropped(self, tmp_path):
        text = "\n".join(
            ["id,time,lat,lon"]
            + [f"long,{i},{10 + i},{i}" for i in range(6)]
            + ["short,0,0,0", "short,1,1,1"]
        )
        ds = ingest_geo(self.write(tmp_path, text), n_samples=5)
        assert ds.ids == ["long"]

    def test_all_tracks_short_raises(self, tmp_path):
        path = self.write(tmp_path, "a,0,0,0\na,1,1,1\n")
        with pytest.raises(EmptyTrackError):
            ingest_geo(path, n_samples=5)

    def test_resampling_grid_size(self, tmp_path):
        text = "\n".join(f"a,{i},{i * 2},{i * 3}" for i in range(10))
        ds = ingest_geo(self.write(tmp_path, text), n_samples=25)
        assert ds.trajectories[0].n_samples == 25

    def test_rows_sorted_by_timestamp(self, tmp_path):
        ordered = "\n".join(f"a,{i},{i * 2},{i * 3}" for i in range(8))
        rows = ordered.splitlines()
        shuffled = "\n".join([rows[4], rows[0], rows[6], rows[2], rows[1],
                              rows[3], rows[7], rows[5]])
        d1 = ingest_geo(self.write(tmp_path, ordered), n_samples=12)
        d2 = ingest_geo(self.write(tmp_path, shuffled), n_samples=12)
        assert_allclose(d1.trajectories[0].values, d2.trajectories[0].values)

    def test_arclength_parameterization(self, tmp_path):
        # uneven observation times, even spacing in arc length
        text = "\n".join(f"a,{t},{la},0" for t, la in [(0, 0), (1, 1), (2, 2), (10, 30)])
        ds = ingest_geo(self.write(tmp_path, text), n_samples=16, parameterization="arclength")
        t = ds.trajectories[0]
        steps = [t.manifold._dist(a, b) for a, b in zip(t.values[:-1], t.values[1:])]
        assert np.std(steps) / np.mean(steps) < 0.05


class TestHurdat2:
    def test_snippet_parses(self):
        storms = parse_hurdat2(HURDAT_SNIPPET.splitlines())
        assert len(storms) == 1
        sid, name, obs = storms[0]
        assert sid == "AL011851" and name == "UNNAMED"
        assert len(obs) == 4
        # six-hourly cadence
        stamps = [t for t, _, _ in obs]
        assert_allclose(np.diff(stamps), 6.0)
        assert obs[0][1] == 28.0 and obs[0][2] == -94.8

    def test_data_row_before_header_rejected(self):
        with pytest.raises(ParseError):
            parse_hurdat2(HURDAT_SNIPPET.splitlines()[1:])

    def test_bad_coordinate_rejected(self):
        lines = HURDAT_SNIPPET.splitlines()
        lines[1] = lines[1].replace("28.0N", "28.0X")
        with pytest.raises(ParseError) as err:
            parse_hurdat2(lines)
        assert err.value.line == 2

    def test_header_with_no_rows_rejected(self):
        with pytest.raises(EmptyTrackError):
            parse_hurdat2(["AL011851,            UNNAMED,      0,"])

    def test_shipped_sample_ingests(self):
        ds = ingest_geo(DATA_DIR / "hurdat2_sample.txt", n_samples=40)
        assert len(ds) == 10
        assert all(t.n_samples == 40 for t in ds.trajectories)
        # tracks live in the north Atlantic quadrant
        for t in ds.trajectories:
            lat, lon = point_to_latlon(t.start)
            assert 5 < lat < 40 and -90 < lon < -20

    def test_format_autodetection(self, tmp_path):
        path = tmp_path / "sample.txt"
        path.write_text(HURDAT_SNIPPET)
        ds = ingest_geo(path, n_samples=4, fmt="auto")
        assert ds.ids == ["AL011851 UNNAMED"]


class TestSe2Ingest:
    def test_constant_heading_straight_line(self, tmp_path):
        rows = ["id,time,theta,x,y"]
        rows += [f"v,{i},0.5,{i * 1.0},{i * 2.0}" for i in range(6)]
        path = tmp_path / "se2.csv"
        path.write_text("\n".join(rows))
        ds = ingest_se2(path, n_samples=9)
        traj = ds.trajectories[0]
        for coords in traj.values:
            theta = np.arctan2(coords[1, 0], coords[0, 0])
            assert theta == pytest.approx(0.5, abs=1e-9)

    def test_malformed_row_rejected(self, tmp_path):
        path = tmp_path / "se2.csv"
        path.write_text("v,0,0.5,1\n")
        with pytest.raises(ParseError):
            ingest_se2(path, n_samples=5)


class TestContours:
    def contour_block(self, n, phase=0.0, r=1.0):
        s = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return "\n".join(f"{r * np.cos(x + phase)},{r * np.sin(x + phase)}" for x in s)

    def test_sequence_downsampled(self, tmp_path):
        blocks = [self.contour_block(40, r=1 + 0.01 * k) for k in range(80)]
        path = tmp_path / "seq.csv"
        path.write_text("\n\n".join(blocks) + "\n")
        ds = ingest_contours(path, n_samples=17, n_points=60)
        assert len(ds) == 1
        assert ds.trajectories[0].n_samples == 17
        assert ds.trajectories[0].values.shape == (17, 60, 2)

    def test_json_variant(self, tmp_path):
        contours = [
            np.stack(
                [np.cos(np.linspace(0, 2 * np.pi, 30, endpoint=False)),
                 (1 + 0.02 * k) * np.sin(np.linspace(0, 2 * np.pi, 30, endpoint=False))],
                axis=1,
            ).tolist()
            for k in range(10)
        ]
        path = tmp_path / "seq.json"
        path.write_text(json.dumps({"contours": contours}))
        ds = ingest_contours(path, n_samples=5, n_points=40)
        assert ds.trajectories[0].n_samples == 5

    def test_too_few_contours_rejected(self, tmp_path):
        path = tmp_path / "seq.csv"
        path.write_text(self.contour_block(30) + "\n")
        with pytest.raises(EmptyTrackError):
            ingest_contours(path, n_samples=5)

    def test_directory_of_sequences(self, tmp_path):
        for name in ("a", "b"):
            blocks = [self.contour_block(30, r=1 + 0.02 * k) for k in range(6)]
            (tmp_path / f"{name}.csv").write_text("\n\n".join(blocks))
        ds = ingest_contours(tmp_path, n_samples=4, n_points=30)
        assert ds.ids == ["a", "b"]


class TestRoundTrip:
    def test_reingesting_exported_dataset_is_identity(self, tmp_path):
        ds = ingest_geo(DATA_DIR / "hurdat2_sample.txt", n_samples=20)
        out = tmp_path / "ds.json"
        save_dataset(out, ds)
        again = load_dataset(out)
        assert again.ids == ds.ids
        for a, b in zip(again.trajectories, ds.trajectories):
            assert_allclose(a.values, b.values)

    def test_resampling_stable_under_density_doubling(self, tmp_path):
        # observing the same analytic path twice as densely moves the
        # ingested trajectory by at most O(1/N)
        def track_csv(n):
            rows = [
                f"a,{i},{30 + 20 * np.sin(np.pi * i / (n - 1))},{-80 + 40 * i / (n - 1)}"
                for i in range(n)
            ]
            return "\n".join(rows)

        gaps = {}
        for n in (25, 50, 100):
            path = tmp_path / f"t{n}.csv"
            path.write_text(track_csv(n))
            gaps[n] = ingest_geo(path, n_samples=40).trajectories[0]
        d_coarse = max(
            gaps[25].manifold._dist(a, b)
            for a, b in zip(gaps[25].values, gaps[100].values)
        )
        d_fine = max(
            gaps[50].manifold._dist(a, b)
            for a, b in zip(gaps[50].values, gaps[100].values)
        )
        assert d_fine <= 0.75 * d_coarse
        assert d_coarse <= 0.1
