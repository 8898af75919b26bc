import json
import subprocess
import sys
from pathlib import Path

import pytest

from fairedge.cli import main
from fairedge.scenario import read_bundle


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "fairedge", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
    )


def pipeline(workdir):
    """gen -> solve -> bounds with fixed seed; returns collected outputs."""
    outputs = {}
    r = run_cli(["gen", "--seed", "42", "--out", "out", "--ues", "2", "--ens", "2",
                 "--deterministic"], workdir)
    assert r.returncode == 0, r.stderr
    outputs["gen"] = r.stdout
    r = run_cli(["solve", "out/scenario.json", "--out", "out/bundle.json",
                 "--deterministic"], workdir)
    assert r.returncode == 0, r.stderr
    outputs["solve"] = r.stdout
    r = run_cli(["bounds", "out/scenario.json", "--deterministic"], workdir)
    assert r.returncode == 0, r.stderr
    outputs["bounds"] = r.stdout
    outputs["scenario"] = (workdir / "out" / "scenario.json").read_bytes()
    outputs["bundle"] = (workdir / "out" / "bundle.json").read_bytes()
    outputs["traces"] = sorted(
        (p.name, p.read_bytes()) for p in (workdir / "out" / "traces").iterdir()
    )
    return outputs


class TestPipelineReproducibility:
    def test_gen_solve_bounds_is_byte_identical(self, tmp_path):
        first = tmp_path / "run1"
        second = tmp_path / "run2"
        first.mkdir()
        second.mkdir()
        a = pipeline(first)
        b = pipeline(second)
        assert a == b

    def test_bundle_from_pipeline_validates(self, tmp_path):
        workdir = tmp_path / "run"
        workdir.mkdir()
        pipeline(workdir)
        bundle = read_bundle(workdir / "out" / "bundle.json")
        assert bundle.report.feasible
        assert bundle.created_at is None  # deterministic mode drops timestamps


class TestCommands:
    def test_solve_writes_parseable_stdout(self, tmp_path, capsys):
        assert main(["gen", "--seed", "3", "--out", str(tmp_path), "--ues", "1",
                     "--ens", "1", "--deterministic"]) == 0
        capsys.readouterr()
        assert main(["solve", str(tmp_path / "scenario.json"), "--deterministic"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema_version"] == 1
        assert payload["report"]["feasible"] is True

    def test_solve_without_deterministic_stamps_time(self, tmp_path, capsys):
        assert main(["gen", "--seed", "3", "--out", str(tmp_path), "--ues", "1",
                     "--ens", "1"]) == 0
        capsys.readouterr()
        assert main(["solve", str(tmp_path / "scenario.json")]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert "created_at" in payload

    def test_infeasible_scenario_exits_one_with_cause(self, tmp_path, capsys):
        assert main(["gen", "--seed", "5", "--out", str(tmp_path), "--ues", "1",
                     "--ens", "1", "--deterministic"]) == 0
        capsys.readouterr()
        doc = json.loads((tmp_path / "scenario.json").read_text())
        doc["ues"][0]["feature_size_bits"] = 1e13
        doc["ues"][0]["deadline_s"] = 0.001
        bad = tmp_path / "impossible.json"
        bad.write_text(json.dumps(doc))
        code = main(["solve", str(bad)])
        captured = capsys.readouterr()
        assert code == 1
        assert "infeasible" in captured.err
        assert json.loads(captured.out)["error"]["kind"] == "infeasible"

    def test_parse_error_exits_two(self, tmp_path, capsys):
        bad = tmp_path / "broken.json"
        bad.write_text("{")
        assert main(["solve", str(bad)]) == 2

    def test_missing_file_exits_two(self, tmp_path):
        assert main(["solve", str(tmp_path / "nope.json")]) == 2

    def test_bounds_reports_gap_fields(self, tmp_path, capsys):
        assert main(["gen", "--seed", "8", "--out", str(tmp_path), "--ues", "2",
                     "--ens", "2", "--deterministic"]) == 0
        capsys.readouterr()
        assert main(["bounds", str(tmp_path / "scenario.json")]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"command", "objective", "lower_bound", "upper_bound",
                                "relative_gap_pct"}
        assert payload["objective"] <= payload["upper_bound"] + 1e-9

    def test_verify_monotonicity_suite_passes(self, capsys):
        assert main(["verify", "--suite", "monotonicity", "--seed", "7"]) == 0
        captured = capsys.readouterr()
        assert "PASS monotonicity" in captured.err
        payload = json.loads(captured.out)
        assert payload["failures"] == 0

    def test_verify_all_suites_pass(self, capsys):
        assert main(["verify", "--seed", "11"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload["suites"]) == {"monotonicity", "thresholds", "dp", "plan", "sandwich"}
        assert payload["failures"] == 0

    def test_sweep_writes_csv(self, tmp_path, capsys):
        assert main(["gen", "--seed", "2", "--out", str(tmp_path), "--ues", "1",
                     "--ens", "1", "--deterministic"]) == 0
        capsys.readouterr()
        trace = tmp_path / "traces" / "ue_00.csv"
        out_csv = tmp_path / "sweep.csv"
        assert main(["sweep", str(trace), "--resolution", "9", "--out", str(out_csv)]) == 0
        payload = json.loads(capsys.readouterr().out)
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == "alpha_l,alpha_u,car,fpr,fnr,ofr,utility"
        assert payload["rows"] == len(lines) - 1 == 9 * 10 // 2

    def test_usage_error_exits_two(self):
        with pytest.raises(SystemExit) as err:
            main(["solve"])  # missing positional
        assert err.value.code == 2
