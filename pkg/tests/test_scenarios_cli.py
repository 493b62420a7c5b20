"""Scenario registry, sampling, and the command-line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest

import unitfield
from unitfield.cli import main
from unitfield.errors import ScenarioError
from unitfield.scenarios import (
    build_custom_scenario,
    detect_foliation,
    sample_points,
)

EXPECTED_NAMES = [
    "flat2-parallel",
    "flat3-parallel",
    "sphere2",
    "classified",
    "classified-n2",
    "classified-n3",
]


def run_cli(*argv, env_extra=None):
    import os

    env = dict(os.environ)
    env.pop("UNITFIELD_TOL", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "unitfield.cli", *argv],
        capture_output=True,
        text=True,
        env=env,
    )


class TestRegistry:
    def test_names(self, scenarios):
        assert list(scenarios) == EXPECTED_NAMES

    def test_fields_are_unit_on_samples(self, scenarios):
        for sc in scenarios.values():
            for x in sample_points(sc.region, 5):
                assert sc.chart.norm(x, sc.field.value(x)) == pytest.approx(
                    1.0, abs=1e-9
                )

    def test_sampling_is_deterministic(self):
        region = ((0.0, 1.0), (2.0, 4.0))
        a = sample_points(region, 10)
        b = sample_points(region, 10)
        assert np.array_equal(a, b)

    def test_sampling_respects_margins(self):
        region = ((0.0, 1.0), (2.0, 4.0))
        pts = sample_points(region, 50)
        assert pts[:, 0].min() >= 0.05 and pts[:, 0].max() <= 0.95
        assert pts[:, 1].min() >= 2.1 and pts[:, 1].max() <= 3.9

    def test_custom_builder_validation(self):
        with pytest.raises(ScenarioError):
            build_custom_scenario(("x", "y"), ["1", "0"], ["1", "0"], [(0, 1), (0, 1)])
        with pytest.raises(ScenarioError):
            build_custom_scenario(
                ("x", "y"), ["1", "0", "1"], ["1"], [(0, 1), (0, 1)]
            )
        with pytest.raises(ScenarioError):
            build_custom_scenario(
                ("x", "y"), ["1", "0", "1"], ["1", "0"], [(1, 0), (0, 1)]
            )
        with pytest.raises(ScenarioError):
            build_custom_scenario(
                ("x", "y"), ["1", "0", "not an expr ("], ["1", "0"], [(0, 1), (0, 1)]
            )

    def test_foliation_probe(self):
        sc = build_custom_scenario(
            ("x", "y"),
            ["1", "0", "1"],
            ["cos(0.3*sin(x+y))", "sin(0.3*sin(x+y))"],
            [(0.0, 1.0), (0.0, 1.0)],
        )
        pts = sample_points(sc.region, 3)
        assert not detect_foliation(sc, pts)
        parallel = build_custom_scenario(
            ("x", "y"), ["1", "0", "1"], ["1", "0"], [(0.0, 1.0), (0.0, 1.0)]
        )
        assert detect_foliation(parallel, pts)


class TestReportCommand:
    def test_classified_report(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["report", "classified", "--points", "6", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["scenario"] == "classified"
        assert report["tool_version"] == unitfield.__version__
        assert report["route"] == "foliation"
        assert report["summary"]["totally_geodesic"] is True
        assert report["summary"]["minimal"] is True
        assert report["summary"]["count"] == 6
        assert len(report["points"]) == 6
        first = report["points"][0]
        assert first["condition_residuals"] == pytest.approx([0.0], abs=1e-9)
        assert first["lambdas"][1] == pytest.approx(first["coordinates"][0])

    def test_sphere_report_summary(self, capsys):
        code = main(["report", "sphere2", "--points", "10"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["summary"]["totally_geodesic"] is False
        assert report["summary"]["minimal"] is True
        assert report["summary"]["max_abs"] == pytest.approx(0.5, abs=1e-9)

    def test_validates_against_shipped_schema(self, capsys):
        jsonschema = pytest.importorskip("jsonschema")
        from importlib import resources

        schema = json.loads(
            resources.files("unitfield").joinpath("report_schema.json").read_text()
        )
        for name in ("flat2-parallel", "sphere2", "classified-n2"):
            code = main(["report", name, "--points", "3"])
            assert code == 0
            report = json.loads(capsys.readouterr().out)
            jsonschema.validate(report, schema)

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["report", "classified-n2", "--points", "4", "--out", str(a)]) == 0
        assert main(["report", "classified-n2", "--points", "4", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_custom_scenario(self, capsys):
        code = main(
            [
                "report",
                "custom",
                "--coords",
                "x,y",
                "--metric",
                "1;0;1",
                "--field",
                "1;0",
                "--region",
                "0,1;0,1",
                "--points",
                "3",
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["summary"]["max_abs"] == 0.0

    def test_unknown_scenario_exit_code(self):
        proc = run_cli("report", "does-not-exist")
        assert proc.returncode == 2
        err = json.loads(proc.stderr)
        assert err["error"] == "ScenarioError"

    def test_tolerance_flag_flips_classification(self, capsys):
        code = main(["report", "sphere2", "--points", "4", "--tol", "0.6"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["tolerance"] == 0.6
        assert report["summary"]["totally_geodesic"] is True


class TestVerifyCommand:
    def test_ode_suite_passes(self):
        proc = run_cli("verify", "--suite", "ode")
        assert proc.returncode == 0
        lines = proc.stdout.splitlines()
        assert lines[0].startswith("1..")
        assert all(l.startswith("ok") for l in lines[1:-1])
        assert "(residual=" in lines[1]

    def test_leaf_identity_alias(self):
        proc = run_cli("verify", "--suite", "lemma3")
        assert proc.returncode == 0
        assert "leaf-identities" in proc.stdout

    def test_failure_exit_code(self):
        proc = run_cli("verify", "--suite", "oracle", "--tol", "1e-30")
        assert proc.returncode == 1
        assert "not ok" in proc.stdout

    def test_env_tolerance_override(self):
        proc = run_cli(
            "verify", "--suite", "ode", env_extra={"UNITFIELD_TOL": "1e-30"}
        )
        assert proc.returncode == 1

    def test_invalid_env_tolerance(self):
        proc = run_cli("verify", "--suite", "ode", env_extra={"UNITFIELD_TOL": "abc"})
        assert proc.returncode == 2


class TestOdeCommand:
    def test_target_run(self, tmp_path):
        out = tmp_path / "traj.csv"
        code = main(["ode", "--k0", "2", "--target-k", "3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "u,k,implicit_residual"
        last = lines[-1].split(",")
        assert float(last[0]) == pytest.approx(0.117127, abs=1e-5)
        assert float(last[1]) == pytest.approx(3.0, abs=1e-9)
        assert float(last[2]) < 1e-8

    def test_fixed_point_column(self, capsys):
        code = main(["ode", "--k0", "0", "--u-span", "1"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        ks = {row.split(",")[1] for row in lines[1:]}
        assert ks == {"0.0"}

    def test_pole_exit_code(self):
        proc = run_cli("ode", "--k0", "1", "--u-span", "1")
        assert proc.returncode == 2
        assert "pole at k^2 = 1" in proc.stderr

    def test_branch_exit_code(self):
        proc = run_cli("ode", "--k0", "1.5", "--u-span", "5")
        assert proc.returncode == 2
        assert "left the branch" in proc.stderr

    def test_requires_exactly_one_driver(self):
        proc = run_cli("ode", "--k0", "2")
        assert proc.returncode == 2
        proc = run_cli("ode", "--k0", "2", "--u-span", "1", "--target-k", "3")
        assert proc.returncode == 2


class TestProfileCommand:
    def test_csv_rows_and_signs(self, tmp_path):
        out = tmp_path / "profile.csv"
        code = main(
            ["profile", "--t-min", "2", "--t-max", "5", "--samples", "4", "--csv", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 5
        first = lines[1].split(",")
        assert float(first[0]) == 2.0
        assert float(first[1]) == pytest.approx(0.4)
        assert float(first[2]) == pytest.approx(2.7)
        assert all(float(row.split(",")[3]) > 0 for row in lines[1:])

    def test_inner_branch_negative_curvature(self, capsys):
        code = main(["profile", "--t-min", "0.2", "--t-max", "0.8", "--samples", "5"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert all(float(row.split(",")[3]) < 0 for row in lines[1:])

    def test_obj_export(self, tmp_path):
        obj = tmp_path / "surface.obj"
        code = main(
            [
                "profile",
                "--t-min",
                "1.2",
                "--t-max",
                "5",
                "--samples",
                "6",
                "--csv",
                str(tmp_path / "p.csv"),
                "--obj",
                str(obj),
                "--v-samples",
                "8",
            ]
        )
        assert code == 0
        lines = obj.read_text().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 48
        assert sum(1 for l in lines if l.startswith("f ")) == 80
        curv = tmp_path / "surface.curvature.csv"
        assert curv.exists()
        assert curv.read_text().splitlines()[0] == "index,t,v,K"

    def test_cross_branch_exit_code(self):
        proc = run_cli("profile", "--t-min", "0.5", "--t-max", "2")
        assert proc.returncode == 2
        assert "branch" in proc.stderr
