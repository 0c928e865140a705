import json
import subprocess
import sys

import pytest

from metricops import cli


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    report = json.loads((out / "report.json").read_text()) if (out / "report.json").exists() else None
    return code, report, out


def strip_wall_time(text):
    report = json.loads(text)
    report["provenance"].pop("wall_time_s")
    return report


@pytest.mark.parametrize("name", ["exp_ax", "projector_pair", "pt_oscillator", "sobolev"])
def test_fast_demos_pass(tmp_path, name):
    code, report, _ = run(tmp_path, "demo", name)
    assert code == 0 and report["status"] == "pass"
    for item in report["verdicts"].values():
        assert item["verdict"] == "pass" and "tol" in item


def test_projector_demo_reports_zero_one_clusters(tmp_path):
    _, report, _ = run(tmp_path, "demo", "projector_pair")
    clusters = report["results"]["spectrum_A_phi"]["clusters"]
    assert sorted((round(c["re"]), c["multiplicity"]) for c in clusters) == [(0, 400), (1, 1)]


def test_pseudo_writes_eigenvalue_table(tmp_path):
    code, report, out = run(tmp_path, "pseudo", "--alpha", "1", "--omega", "1")
    assert code == 0
    assert report["verdicts"]["real_spectrum"]["verdict"] == "pass"
    lines = (out / "eigenvalues.csv").read_text().splitlines()
    assert lines[0] == "index,re,im" and len(lines) == 401


def test_list_demos_sorted_and_stable(capsys):
    cli.main(["list-demos"])
    first = capsys.readouterr().out
    cli.main(["list-demos"])
    assert capsys.readouterr().out == first
    names = [line.split("\t")[0] for line in first.splitlines()]
    assert names == sorted(names)
    assert "x2" in names and "pt_oscillator" in names


def test_report_deterministic(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / str(k)
        assert cli.main(["demo", "projector_pair", "--out", str(out)]) == 0
        texts.append((out / "report.json").read_text())
    assert strip_wall_time(texts[0]) == strip_wall_time(texts[1])


def test_failing_verdict_exits_one(tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"command": "pseudo", "level_tol": 1e-12}))
    code, report, _ = run(tmp_path, "pseudo", "--scenario", str(scenario))
    assert code == 1 and report["status"] == "fail"
    assert report["verdicts"]["oscillator_levels"]["verdict"] == "fail"


@pytest.mark.parametrize("content", [
    "{not json",
    "[1, 2]",
    json.dumps({"command": "lattice", "tol": -1}),
    json.dumps({"command": "lattice", "metric": "no_such_recipe"}),
    json.dumps({"command": "scale", "vector": "x2"}),
])
def test_input_errors_exit_two(tmp_path, capsys, content):
    scenario = tmp_path / "s.json"
    scenario.write_text(content)
    command = "scale" if "scale" in content else "lattice"
    code, _, _ = run(tmp_path, command, "--scenario", str(scenario))
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_report_written_on_recipe_error(tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"command": "lattice", "metric": "no_such_recipe"}))
    code, report, _ = run(tmp_path, "lattice", "--scenario", str(scenario))
    assert code == 2 and report["status"] == "error" and "no_such_recipe" in report["error"]


def test_command_mismatch_and_unknown_demo(tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"command": "pseudo"}))
    assert cli.main(["lattice", "--scenario", str(scenario), "--out", str(tmp_path)]) == 2
    assert cli.main(["demo", "nope", "--out", str(tmp_path)]) == 2
    assert cli.main(["pseudo", "--tol", "0", "--out", str(tmp_path)]) == 2


def test_missing_scenario_file(tmp_path):
    assert cli.main(["lattice", "--scenario", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "metricops", "list-demos"], capture_output=True, text=True)
    assert proc.returncode == 0 and "x2" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "metricops", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
