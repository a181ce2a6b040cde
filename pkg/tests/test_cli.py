"""CLI behavior: config handling, exit codes, determinism, CSV output."""

import json

import numpy as np
import pytest

from finslerlab.cli import (ConfigError, default_config, load_config, main,
                            metric_from_spec, run_verify)

FAST_CONFIG = """\
seed = 99

[grid]
radii = [0.2, 0.45, 0.7]
y_count = 3
u_count = 4

[samples]
r_flat = 12
pde = 10

[series]
match_points = 6
pde_points = 3

[geodesic]
count = 4
t_end = 0.8
"""


def write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return str(path)


@pytest.fixture()
def fast_config(tmp_path):
    return write(tmp_path / "fast.toml", FAST_CONFIG)


class TestConfig:
    def test_defaults_validate(self):
        cfg = load_config(None)
        assert cfg["dim"] == 2
        assert cfg["tolerances"]["funk_curvature"] == 1e-6

    def test_merge_and_override(self, fast_config):
        cfg = load_config(fast_config)
        assert cfg["seed"] == 99
        assert cfg["grid"]["radii"] == [0.2, 0.45, 0.7]
        # untouched sections keep defaults
        assert cfg["tolerances"]["r_flat"] == 1e-8

    def test_unknown_key_rejected(self, tmp_path):
        path = write(tmp_path / "bad.toml", "typo_key = 1\n")
        with pytest.raises(ConfigError, match="typo_key"):
            load_config(path)

    def test_parse_error_reports_line(self, tmp_path):
        path = write(tmp_path / "broken.toml", "seed = [unclosed\n")
        with pytest.raises(ConfigError, match="line"):
            load_config(path)

    def test_anchor_validation(self, tmp_path):
        path = write(tmp_path / "anchor.toml",
                     "[anchor]\nk0 = [1.5, 0.0]\n")
        with pytest.raises(ConfigError, match="anchor"):
            load_config(path)

    def test_bad_domain_parameters(self, tmp_path):
        path = write(tmp_path / "dom.toml",
                     "[[domains]]\nkind = \"randers\"\nb = [2.0, 0.0]\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_round_trip_stable(self, fast_config):
        a = load_config(fast_config)
        b = load_config(fast_config)
        assert a == b
        assert json.loads(json.dumps(a)) == a


class TestMetricFromSpec:
    def test_known_kinds(self):
        cfg = default_config()
        for kind in ("funk-ball", "funk-implicit", "hilbert", "k0", "k0-ball",
                     "randers-funk", "series", "sine-warp"):
            metric = metric_from_spec({"kind": kind}, cfg)
            assert metric.dim == 2

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            metric_from_spec({"kind": "bogus"}, default_config())


class TestVerifyCommand:
    def test_default_fast_config_passes(self, fast_config, tmp_path, capsys):
        code = main(["--config", fast_config, "--out", str(tmp_path / "o"),
                     "verify"])
        out = capsys.readouterr().out
        assert code == 0
        assert "overall: pass" in out
        report = json.loads((tmp_path / "o" / "report.json").read_text())
        assert report["overall"] == "pass"
        names = {c["name"] for c in report["checks"]}
        assert {"funk-curvature", "hilbert-curvature", "k0-curvature-generic",
                "randers-curvature", "r-flat-ball", "funk-pde-randers",
                "k0-inverse-pde", "series-closed-form",
                "straightness-funk-spray"} <= names
        for check in report["checks"]:
            assert check["claim"]
            assert check["passed"] is (
                check["max_residual"] <= check["tolerance"])

    def test_corrupted_anchor_exits_2(self, tmp_path, capsys):
        path = write(tmp_path / "bad.toml", "[anchor]\nk0 = [1.1, 0.0]\n")
        code = main(["--config", path, "--out", str(tmp_path / "o"),
                     "verify"])
        assert code == 2
        assert "configuration error" in capsys.readouterr().err

    def test_negative_control_exits_1(self, tmp_path, capsys):
        path = write(tmp_path / "neg.toml", FAST_CONFIG
                     + "\n[checks]\nnegative_control = true\n")
        code = main(["--config", path, "--out", str(tmp_path / "o"),
                     "verify"])
        assert code == 1
        report = json.loads((tmp_path / "o" / "report.json").read_text())
        neg = [c for c in report["checks"]
               if c["name"] == "rapcsak-negative-control"]
        assert len(neg) == 1
        assert not neg[0]["passed"]
        assert neg[0]["detail"]["fixture_failed_as_expected"]
        assert report["overall"] == "fail"

    def test_jobs_report_identical(self, fast_config, tmp_path):
        cfg = load_config(fast_config)
        serial = run_verify(cfg).to_json()
        cfg2 = load_config(fast_config)
        cfg2["jobs"] = 2
        parallel = run_verify(cfg2).to_json()
        assert serial == parallel


class TestCurvatureCommand:
    def test_csv_values_and_determinism(self, fast_config, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert main(["--config", fast_config, "--out", str(out1),
                     "curvature", "--metric", "funk-ball"]) == 0
        assert main(["--config", fast_config, "--out", str(out2),
                     "curvature", "--metric", "funk-ball"]) == 0
        text1 = (out1 / "curvature_funk-ball.csv").read_text()
        text2 = (out2 / "curvature_funk-ball.csv").read_text()
        assert text1 == text2  # byte-identical reruns
        rows = text1.strip().split("\n")[1:]
        assert len(rows) == 3 * 3 * 4
        ks = np.array([float(r.split(",")[-1]) for r in rows])
        assert np.abs(ks + 0.25).max() <= 1e-6

    @pytest.mark.parametrize("kind,target,tol", [
        ("k0-ball", 0.0, 1e-6),
        ("hilbert", -1.0, 1e-5),
    ])
    def test_other_metrics(self, fast_config, tmp_path, kind, target, tol):
        out = tmp_path / kind
        assert main(["--config", fast_config, "--out", str(out),
                     "curvature", "--metric", kind]) == 0
        rows = (out / f"curvature_{kind}.csv").read_text().strip().split("\n")
        ks = np.array([float(r.split(",")[-1]) for r in rows[1:]])
        assert np.abs(ks - target).max() <= tol


class TestGeodesicCommand:
    def test_writes_trajectory_and_summary(self, fast_config, tmp_path,
                                           capsys):
        out = tmp_path / "g"
        code = main(["--config", fast_config, "--out", str(out), "geodesic",
                     "--x0", "0.0,0.3", "--y0", "1.0,0.0",
                     "--t-end", "1.0", "--spray", "derived"])
        assert code == 0
        stdout = capsys.readouterr().out
        summary = json.loads(stdout[:stdout.rindex("}") + 1])
        assert summary["straightness_residual"] <= 1e-7
        lines = (out / "geodesic.csv").read_text().strip().split("\n")
        assert lines[0] == "t,x1,x2,y1,y2"
        assert len(lines) == summary["samples"] + 1

    def test_bad_vector_exits_2(self, fast_config, tmp_path, capsys):
        code = main(["--config", fast_config, "--out", str(tmp_path),
                     "geodesic", "--x0", "0.0", "--y0", "1,0"])
        assert code == 2


class TestSeriesCommand:
    def test_table(self, fast_config, tmp_path, capsys):
        out = tmp_path / "s"
        code = main(["--config", fast_config, "--out", str(out), "series",
                     "--orders", "4,8,12", "--x", "0.1,0.0", "--y", "1.0,0.0"])
        assert code == 0
        lines = (out / "series.csv").read_text().strip().split("\n")
        assert lines[0] == "M,partial_sum,tail,closed_form,abs_difference"
        rows = [line.split(",") for line in lines[1:]]
        closed = float(rows[0][3])
        assert closed == pytest.approx(1.0 / 0.81, rel=1e-12)
        diffs = [float(r[4]) for r in rows]
        assert diffs[0] > diffs[1] > diffs[2]
