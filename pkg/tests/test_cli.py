import csv
import json
from pathlib import Path

import numpy as np
import pytest

from semloc.cli import (EXIT_DEGENERATE, EXIT_INSUFFICIENT, EXIT_IO, EXIT_OK,
                        EXIT_PARSE, main)


def run(argv):
    return main(argv)


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "synth"
    code = run(["synth", "--seed", "4", "--output", str(out)])
    assert code == EXIT_OK
    return out


class TestSynth:
    def test_outputs_exist(self, synth_dir):
        for name in ("scene.json", "reference.json", "query.json",
                     "ground_truth.json"):
            assert (synth_dir / name).exists()

    def test_deterministic_bytes(self, tmp_path, synth_dir):
        again = tmp_path / "again"
        assert run(["synth", "--seed", "4", "--output", str(again)]) == EXIT_OK
        for name in ("scene.json", "reference.json", "query.json",
                     "ground_truth.json"):
            assert (synth_dir / name).read_bytes() == (again / name).read_bytes()


class TestLocalize:
    def test_identity_pair(self, tmp_path, synth_dir):
        out = tmp_path / "loc"
        ref = str(synth_dir / "reference.json")
        code = run(["localize", ref, ref, "--score-threshold", "0.9",
                    "--ransac-tol", "0.001", "--output", str(out)])
        assert code == EXIT_OK
        doc = json.load(open(out / "transform.json"))
        assert np.allclose(doc["R"], np.eye(3), atol=1e-9)
        assert np.allclose(doc["t"], 0, atol=1e-9)
        for name in ("transform.txt", "matches.csv", "matches.png",
                     "summary.json", "timings.json"):
            assert (out / name).exists()

    def test_recovers_synth_offset(self, tmp_path, synth_dir):
        out = tmp_path / "loc"
        code = run(["localize", str(synth_dir / "reference.json"),
                    str(synth_dir / "query.json"),
                    "--ground-truth", str(synth_dir / "ground_truth.json"),
                    "--score-threshold", "0.9", "--ransac-tol", "0.001",
                    "--output", str(out)])
        assert code == EXIT_OK
        summary = json.load(open(out / "summary.json"))
        assert summary["translation_error_m"] < 1e-6
        assert summary["rotation_error_deg"] < 1e-6
        assert summary["good_match_rate"] == 1.0

    def test_point_file_input(self, tmp_path):
        # two clusters of points -> two nodes, matched against itself
        rng = np.random.default_rng(0)
        lines = []
        centers = [([0, 0, 0], 0), ([6, 0, 0], 1), ([0, 6, 0], 0), ([6, 6, 3], 2)]
        for center, label in centers:
            for _ in range(10):
                p = np.asarray(center, float) + rng.normal(0, 0.1, 3)
                lines.append(f"{p[0]} {p[1]} {p[2]} {label}")
        pts = tmp_path / "pts.txt"
        pts.write_text("\n".join(lines) + "\n")
        out = tmp_path / "loc"
        code = run(["localize", str(pts), str(pts), "--score-threshold", "0.5",
                    "--ransac-tol", "0.001", "--output", str(out)])
        assert code == EXIT_OK

    def test_malformed_input_exit_code(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1 2 3\n")
        code = run(["localize", str(bad), str(bad), "--output", str(tmp_path / "o")])
        assert code == EXIT_PARSE

    def test_missing_input_exit_code(self, tmp_path):
        code = run(["localize", "nope.json", "nope.json",
                    "--output", str(tmp_path / "o")])
        assert code == EXIT_IO

    def test_insufficient_candidates_exit_code(self, tmp_path):
        pts = tmp_path / "pts.txt"
        pts.write_text("\n".join(f"{x/10} 0 0 0" for x in range(10)) + "\n")
        other = tmp_path / "other.txt"
        other.write_text("\n".join(f"{x/10} 0 0 1" for x in range(10)) + "\n")
        code = run(["localize", str(pts), str(other), "--output", str(tmp_path / "o")])
        assert code == EXIT_INSUFFICIENT

    def test_degenerate_geometry_exit_code(self, tmp_path):
        # 5 collinear clusters close enough for edges: candidates exist,
        # but every 4-sample is collinear
        pts = tmp_path / "pts.txt"
        lines = []
        rng = np.random.default_rng(1)
        for k in range(5):
            for _ in range(6):
                p = np.array([5.0 * k, 0, 0]) + rng.normal(0, 0.05, 3) * [1, 0, 0]
                lines.append(f"{p[0]} {p[1]} {p[2]} 0")
        pts.write_text("\n".join(lines) + "\n")
        code = run(["localize", str(pts), str(pts), "--score-threshold", "0.0",
                    "--output", str(tmp_path / "o")])
        assert code == EXIT_DEGENERATE

    def test_byte_identical_reruns(self, tmp_path, synth_dir):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = run(["localize", str(synth_dir / "reference.json"),
                        str(synth_dir / "query.json"), "--seed", "9",
                        "--output", str(out)])
            assert code == EXIT_OK
            outs.append(out)
        for name in ("transform.json", "transform.txt", "matches.csv",
                     "summary.json"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_drop_labels(self, tmp_path, synth_dir):
        out = tmp_path / "loc"
        code = run(["localize", str(synth_dir / "reference.json"),
                    str(synth_dir / "query.json"), "--drop-labels", "0,1",
                    "--output", str(out)])
        assert code == EXIT_OK
        rows = list(csv.DictReader(open(out / "matches.csv")))
        assert all(int(r["label"]) not in (0, 1) for r in rows)


class TestExtract:
    def test_graph_and_descriptor_outputs(self, tmp_path):
        pts = tmp_path / "pts.txt"
        rng = np.random.default_rng(2)
        lines = []
        for k in range(6):
            center = rng.uniform(0, 40, 3)
            for _ in range(8):
                p = center + rng.normal(0, 0.2, 3)
                lines.append(f"{p[0]} {p[1]} {p[2]} {k % 3}")
        pts.write_text("\n".join(lines) + "\n")
        out = tmp_path / "ex"
        assert run(["extract", str(pts), "--output", str(out)]) == EXIT_OK
        doc = json.load(open(out / "graph.json"))
        assert len(doc["nodes"]) == 6
        assert (out / "descriptors.csv").exists()


class TestEvalPr:
    def test_csv_rows_and_figure(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("attempts=5\nobject_count=120\nextent=140,140,15\n"
                       "sensor_range=70\ntr_values=0,5,10\n"
                       "score_threshold=0.8\nransac_tolerance=1.0\n")
        out = tmp_path / "pr"
        code = run(["eval-pr", "--config", str(cfg), "--seed", "2",
                    "--output", str(out)])
        assert code == EXIT_OK
        rows = list(csv.DictReader(open(out / "pr_curve.csv")))
        assert len(rows) == 3
        assert (out / "pr_curve.png").exists()

    def test_deterministic_csv(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("attempts=4\nobject_count=100\nextent=140,140,15\n"
                       "sensor_range=70\ntr_values=0,5\n")
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run(["eval-pr", "--config", str(cfg), "--seed", "3",
                        "--threads", "2", "--output", str(out)]) == EXIT_OK
            outs.append(out)
        assert (outs[0] / "pr_curve.csv").read_bytes() == (outs[1] / "pr_curve.csv").read_bytes()


class TestBenchCmd:
    def test_json_shape(self, tmp_path, synth_dir):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("repetitions=5\n")
        out = tmp_path / "bench"
        code = run(["bench", str(synth_dir / "reference.json"),
                    str(synth_dir / "query.json"), "--config", str(cfg),
                    "--score-threshold", "0.8", "--output", str(out)])
        assert code == EXIT_OK
        report = json.load(open(out / "timings.json"))
        for stage in ("graph", "descriptor", "matching", "pose"):
            assert len(report[stage]["samples_ms"]) == 5
        assert (out / "timings.png").exists()


class TestConfigPrecedence:
    def test_flag_beats_file_beats_default(self, tmp_path, synth_dir):
        from semloc.cli import build_parser, _configure
        cfg = tmp_path / "c.cfg"
        cfg.write_text("connectivity_threshold=15\nransac_iterations=100\n")
        parser = build_parser()

        args = parser.parse_args(["synth", "--output", "x"])
        run_cfg, _ = _configure(args)
        assert run_cfg.connectivity_threshold == 10.0  # default

        args = parser.parse_args(["synth", "--config", str(cfg), "--output", "x"])
        run_cfg, _ = _configure(args)
        assert run_cfg.connectivity_threshold == 15.0  # file
        assert run_cfg.ransac_iterations == 100

        args = parser.parse_args(["synth", "--config", str(cfg),
                                  "--connectivity", "25", "--output", "x"])
        run_cfg, _ = _configure(args)
        assert run_cfg.connectivity_threshold == 25.0  # flag wins
        assert run_cfg.ransac_iterations == 100        # file still applies

    def test_bad_config_exit_code(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("bogus=1\n")
        assert run(["synth", "--config", str(cfg),
                    "--output", str(tmp_path / "o")]) == EXIT_PARSE
