import csv
import json
import math
import subprocess
import sys

import pytest

from cadlag_evolution.cli import main, run
from cadlag_evolution.config import parse_config

from conftest import FIXTURES


def fixture(name):
    return FIXTURES / f"{name}.json"


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def base_doc():
    return json.loads(fixture("duhamel_atom").read_text())


def test_solve_single_atom(tmp_path):
    assert run("solve", fixture("duhamel_atom"), tmp_path) == 0
    rows = read_csv(tmp_path / "trajectory.csv")
    (row,) = [r for r in rows if r["functional_id"] == "unit" and float(r["t"]) == 1.5]
    assert float(row["re"]) == pytest.approx(2 * math.exp(-1), rel=1e-15)
    assert float(row["im"]) == 0.0
    at_jump = [(r["side"], float(r["re"])) for r in rows if r["functional_id"] == "unit" and float(r["t"]) == 0.5]
    assert at_jump == [("left", 0.0), ("right", 2.0)]
    assert {r["side"] for r in rows} == {"left", "right", "interior"}


def test_solve_writes_fields(tmp_path):
    assert run("solve", fixture("duhamel_segments"), tmp_path) == 0
    summary = json.loads((tmp_path / "trajectory.json").read_text())
    assert summary["fields"] == [f"trajectory_field_{k:03d}.csv" for k in range(3)]
    lines = (tmp_path / "trajectory_field_000.csv").read_text().splitlines()
    assert lines[1] == "x1,re,im"
    assert len(lines) == 2 + 64


def test_steady_needs_positive_kappa(tmp_path, capsys):
    assert run("steady", fixture("steady_laplacian_origin"), tmp_path) == 3
    err = capsys.readouterr().err
    assert "precondition error" in err and "effective_kappa" in err


def test_verify_exit_codes(tmp_path):
    assert run("verify", fixture("duhamel_atom"), tmp_path / "ok") == 0
    assert run("verify", fixture("corrupted_segments"), tmp_path / "bad") == 4
    report = json.loads((tmp_path / "bad" / "verify.json").read_text())
    assert report["passed"] is False
    assert report["functionals"][0]["weak_residual"]["max_residual"] > 1e-4


def test_verify_report_contents(tmp_path):
    assert run("verify", fixture("steady_mixed"), tmp_path) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["hermitian_field"]["applicable"] is True
    assert [j["t"] for j in report["jumps"]] == [-1.0, 0.5]
    for entry in report["functionals"]:
        assert entry["weak_residual"]["max_residual"] <= 1e-7
        assert entry["increment_identity"]["max_error"] <= 1e-8


@pytest.mark.parametrize(
    "mutate,path",
    [
        (lambda d: d.pop("symbol"), "symbol"),
        (lambda d: d.update(dimension=4), "dimension"),
        (lambda d: d["source"]["terms"][0]["spatial"]["atoms"][0].update(xi=[0.5, 1.0]), "source.terms[0].spatial.atoms[0]"),
        (lambda d: d["functionals"][1].update(width=-1.0), "functionals[1]"),
        (lambda d: d["time_grid"].update(count=0), "time_grid"),
        (lambda d: d["oracle"].update(method="rk4"), "oracle.method"),
        (lambda d: d.update(mode="sideways"), "mode"),
    ],
)
def test_config_errors_name_the_path(tmp_path, capsys, mutate, path):
    doc = base_doc()
    mutate(doc)
    assert run("solve", write_config(tmp_path, doc), tmp_path / "out") == 2
    assert path in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert run("solve", bad, tmp_path / "out") == 2
    assert run("solve", tmp_path / "missing.json", tmp_path / "out") == 2


def test_cauchy_source_atom_at_zero_is_named(tmp_path, capsys):
    doc = base_doc()
    doc["mode"] = "cauchy"
    doc["initial"] = {"atoms": [{"xi": [0.5], "w": [1.0, 0.0]}]}
    doc["source"]["terms"][0]["temporal"]["atoms"][0]["t"] = 0.0
    assert run("solve", write_config(tmp_path, doc), tmp_path / "out") == 3
    assert "source" in capsys.readouterr().err


@pytest.mark.parametrize("command,name", [("solve", "cauchy_decay"), ("verify", "steady_mixed"), ("asymptotics", "steady_mixed")])
def test_repeated_runs_are_byte_identical(tmp_path, command, name):
    assert run(command, fixture(name), tmp_path / "a") == run(command, fixture(name), tmp_path / "b", threads=3)
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


@pytest.mark.parametrize("name", ["cauchy_decay", "steady_mixed", "heat_kernel", "asymptotics_two_mode"])
def test_config_round_trip(tmp_path, name):
    assert run("verify", fixture(name), tmp_path) in (0, 4)
    embedded = json.loads((tmp_path / "verify.json").read_text())["config"]
    again = parse_config(embedded).normalized()
    assert json.loads(json.dumps(again)) == embedded


def test_asymptotics_outputs(tmp_path):
    assert run("asymptotics", fixture("steady_homogeneous"), tmp_path) == 0
    summary = json.loads((tmp_path / "asymptotics.json").read_text())
    unit = next(f for f in summary["functionals"] if f["id"] == "unit")
    assert unit["c_phi"] == pytest.approx(1.5)
    assert unit["violations"] == 0
    assert unit["kappa_fitted"] == pytest.approx(2.0, abs=1e-6)
    assert unit["t_epsilon"] == pytest.approx(math.log(1.5 / 1e-6) / 2)
    rows = read_csv(tmp_path / "asymptotics_unit.csv")
    assert list(rows[0]) == ["t", "gap", "bound"]
    assert all(float(r["gap"]) <= float(r["bound"]) * (1 + 1e-9) for r in rows)


def test_oracle_compare(tmp_path):
    assert run("oracle-compare", fixture("duhamel_atom"), tmp_path / "cn") == 0
    rows = read_csv(tmp_path / "cn" / "oracle.csv")
    assert list(rows[0]) == ["xi1", "closed_re", "closed_im", "oracle_re", "oracle_im", "abs_err"]
    assert max(float(r["abs_err"]) for r in rows) <= 1e-6
    assert run("oracle-compare", fixture("duhamel_segments"), tmp_path / "simpson") == 0
    rows = read_csv(tmp_path / "simpson" / "oracle.csv")
    assert max(float(r["abs_err"]) for r in rows) <= 1e-10


def test_simpson_oracle_rejects_initial(tmp_path, capsys):
    doc = json.loads(fixture("cauchy_decay").read_text())
    doc["oracle"] = {"method": "simpson"}
    assert run("oracle-compare", write_config(tmp_path, doc), tmp_path / "out") == 3
    assert "initial" in capsys.readouterr().err


def test_mollifier_command(tmp_path):
    assert run("mollifier", fixture("zero_symbol_jump"), tmp_path) == 0
    right = read_csv(tmp_path / "mollifier_unit_right.csv")
    left = read_csv(tmp_path / "mollifier_unit_left.csv")
    assert len(right) == 20
    assert abs(float(right[-1]["re"]) - 2) <= 1e-6
    assert abs(float(left[-1]["re"])) <= 1e-6


def test_main_argument_handling(tmp_path):
    with pytest.raises(SystemExit):
        main(["explode", "--config", "x", "--out", "y"])
    assert main(["solve", "--config", str(fixture("duhamel_atom")), "--out", str(tmp_path), "--threads", "0"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cadlag_evolution", "verify", "--config", str(fixture("corrupted_segments")), "--out", str(tmp_path)],
        capture_output=True,
    )
    assert proc.returncode == 4
