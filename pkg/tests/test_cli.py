"""The experiment runner: config handling, exit codes, reports, determinism."""

import json

import pytest

from loopspace_lab.cli import load_config, main, run_suite
from loopspace_lab.errors import ConfigInvalid, UnknownSuite
from loopspace_lab.suites import SUITES, ExperimentConfig


def fast_config(suite, tmp_path, **kw):
    base = dict(suite=suite, resolution=32, samples=10, ode_steps=64,
                out_dir=str(tmp_path), seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_bad_resolution(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(suite="metric", resolution=24).validated()

    def test_bad_tolerance(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(suite="metric", oracle_tol=-1.0).validated()

    def test_bad_manifold(self):
        with pytest.raises(ConfigInvalid):
            ExperimentConfig(suite="metric", manifold="moebius").validated()

    def test_unknown_suite(self):
        with pytest.raises(UnknownSuite):
            ExperimentConfig(suite="no-such-suite").validated()

    def test_flags_win_over_file(self, tmp_path):
        cfg_file = tmp_path / "config.json"
        cfg_file.write_text(json.dumps({"suite": "metric", "seed": 1,
                                        "resolution": 64}))
        cfg = load_config(str(cfg_file), {"seed": 9, "manifold": None})
        assert cfg.seed == 9 and cfg.resolution == 64 and cfg.suite == "metric"

    def test_unknown_keys_rejected(self, tmp_path):
        cfg_file = tmp_path / "config.json"
        cfg_file.write_text(json.dumps({"suite": "metric", "bogus": 1}))
        with pytest.raises(ConfigInvalid):
            load_config(str(cfg_file), {})


class TestRunSuite:
    def test_report_files_written(self, tmp_path):
        cfg = fast_config("metric", tmp_path)
        report = run_suite(cfg)
        assert report.all_pass
        stem = tmp_path / "metric-3"
        data = json.loads((tmp_path / "metric-3.json").read_text())
        assert data["schema"] == "loopspace-lab/report-v1"
        assert data["all_pass"] is True
        assert data["config"]["resolution"] == 32
        for check in data["checks"]:
            assert set(check) == {"check_id", "anchor", "residual",
                                  "tolerance", "pass"}
            assert check["pass"] == (check["residual"] <= check["tolerance"])
        csv_lines = (tmp_path / "metric-3.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "check_id,anchor,residual,tolerance,pass"
        assert len(csv_lines) == len(data["checks"]) + 1
        meta = json.loads((tmp_path / "metric-3.meta.json").read_text())
        assert meta["wall_time_s"] > 0
        assert "wall_time_s" not in data

    def test_every_check_has_an_anchor(self, tmp_path):
        for suite in SUITES:
            report = run_suite(fast_config(suite, tmp_path), write=False)
            assert all(c.anchor for c in report.checks), suite

    def test_deterministic_reports(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_suite(fast_config("chart-roundtrip", a, out_dir=str(a)))
        run_suite(fast_config("chart-roundtrip", b, out_dir=str(b)))
        for ext in (".json", ".csv"):
            assert (a / f"chart-roundtrip-3{ext}").read_bytes() == \
                (b / f"chart-roundtrip-3{ext}").read_bytes()


class TestMainExitCodes:
    def test_pass_run(self, tmp_path, capsys):
        code = main(["run", "--suite", "metric", "--resolution", "32",
                     "--samples", "10", "--seed", "1",
                     "--out", str(tmp_path), "--quiet"])
        assert code == 0
        assert (tmp_path / "metric-1.json").exists()

    def test_unknown_suite_exits_2(self, tmp_path):
        code = main(["run", "--suite", "no-such-suite", "--out", str(tmp_path)])
        assert code == 2

    def test_invalid_config_exits_3(self, tmp_path):
        code = main(["run", "--suite", "metric", "--resolution", "24",
                     "--out", str(tmp_path)])
        assert code == 3

    def test_failing_check_exits_1_with_report(self, tmp_path):
        # an absurdly small oracle tolerance forces a failing record
        code = main(["run", "--suite", "geodesic-pointwise",
                     "--resolution", "32", "--ode-steps", "16",
                     "--tol", "1e-16", "--seed", "0",
                     "--out", str(tmp_path), "--quiet"])
        assert code == 1
        data = json.loads((tmp_path / "geodesic-pointwise-0.json").read_text())
        assert data["all_pass"] is False

    def test_list_suites(self, capsys):
        assert main(["list-suites"]) == 0
        out = capsys.readouterr().out.split()
        assert set(out) == set(SUITES)
        assert len(out) == 16

    def test_config_file_run(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "suite": "metric", "resolution": 32, "samples": 10,
            "seed": 5, "out_dir": str(tmp_path)}))
        assert main(["run", "--config", str(cfg), "--quiet"]) == 0
        assert (tmp_path / "metric-5.json").exists()

    def test_chart_roundtrip_sphere_seed7_example(self, tmp_path):
        code = main(["run", "--suite", "chart-roundtrip",
                     "--manifold", "sphere2", "--resolution", "128",
                     "--seed", "7", "--out", str(tmp_path), "--quiet"])
        assert code == 0
        data = json.loads((tmp_path / "chart-roundtrip-7.json").read_text())
        roundtrip = [c for c in data["checks"]
                     if c["check_id"] == "psi-roundtrip"][0]
        assert roundtrip["residual"] < 1e-7
