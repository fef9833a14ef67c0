"""Command line interface: exit codes, file formats, JSON reports."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ellscope import cli

E_NUM = "2.718281828459045"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes_check(capsys):
    # elliptic state -> 0
    code, out, _ = run(["check", "--energy", "dev-hencky", "--stretches",
                        f"{E_NUM},1"], capsys)
    assert code == 0 and "Elliptic" in out
    # violated state -> 2
    code, out, _ = run(["check", "--energy", "dev-hencky", "--stretches",
                        "3.5,1"], capsys)
    assert code == 2 and "Violated" in out


def test_usage_errors_exit_1(capsys):
    # argparse-level usage errors are remapped from 2 to 1
    with pytest.raises(SystemExit) as ei:
        cli.main([])
    assert ei.value.code == 1
    with pytest.raises(SystemExit) as ei:
        cli.main(["verify", "atlantis"])
    assert ei.value.code == 1
    capsys.readouterr()
    # input errors surface as exit 1 with a prefixed message
    code, _, err = run(["check", "--energy", "dev-hencky", "--dim", "3",
                        "--stretches", "1,1.2"], capsys)
    assert code == 1 and err.startswith("ellscope: error:")
    code, _, err = run(["check", "--energy", "nosuch", "--stretches", "1,1"],
                       capsys)
    assert code == 1 and "nosuch" in err
    code, _, err = run(["check", "--energy", "dev-hencky", "--params", "mu",
                        "--stretches", "1,1"], capsys)
    assert code == 1 and "key=value" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["--version"])
    assert ei.value.code == 0
    assert "ellscope" in capsys.readouterr().out


def test_json_report_shape(capsys):
    code, out, _ = run(["check", "--energy", "exp-hencky-iso-2", "--params",
                        "mu=1,k=0.25", "--stretches", "7.38905609893065,1",
                        "--json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert set(rep) == {"command", "version", "inputs", "outputs", "elapsed_s"}
    assert rep["command"] == "check"
    # the analytic boundary state reports an exactly zero worst margin
    assert rep["outputs"]["worst_margin"] == 0.0
    assert rep["outputs"]["status"] == "Elliptic"


def test_check_oracle_flag(capsys):
    code, out, _ = run(["check", "--energy", "dev-hencky", "--dim", "2",
                        "--stretches", "1.1,0.9", "--oracle", "--json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["outputs"]["oracle"]["status"] == "Elliptic"
    assert rep["outputs"]["oracle"]["min_value"] > 0.0


def test_scan_csv_golden_and_deterministic(tmp_path, capsys):
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    argv = ["scan", "--energy", "dev-hencky", "--chart", "logt2d",
            "--range=-2:2", "--res", "41", "--json"]
    code, out, _ = run(argv + ["--out", str(p1)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["outputs"]["counts"] == {"E": 21, "V": 20, "I": 0}
    # certified sublevel of the squared deviatoric log magnitude
    assert math.isclose(rep["outputs"]["certified_dev_sq"], 1.1 ** 2 / 2,
                        rel_tol=1e-12)
    code, _, _ = run(argv + ["--out", str(p2)], capsys)
    assert code == 0
    data = p1.read_bytes()
    assert data == p2.read_bytes()
    assert data.splitlines()[0] == b"x,verdict,min_margin,worst_condition"
    # boundary rows carry exact 17-digit nodes and zero margins
    assert b"\n1,E,0,te_1\n" in data and b"\n-1,E,0,te_2\n" in data


def test_scan_svg_with_overlay(tmp_path, capsys):
    svg = tmp_path / "m.svg"
    code, _, _ = run(["scan", "--energy", "dev-hencky", "--chart", "ab",
                      "--res", "41", "--out", str(tmp_path / "m.csv"),
                      "--svg", str(svg), "--overlay", "ellipse"], capsys)
    assert code == 0
    text = svg.read_text()
    assert text.startswith("<svg ")
    assert "stroke-dasharray" in text          # dashed ellipse overlay
    assert "#d9d9d9" in text                   # undecided ring rects
    assert "#a6cbe3" in text and "#f2b08c" in text


def test_scan_option_validation(tmp_path, capsys):
    code, _, err = run(["scan", "--energy", "dev-hencky", "--chart", "ptheta",
                        "--res", "11", "--out", str(tmp_path / "x.csv"),
                        "--svg", str(tmp_path / "x.svg"),
                        "--overlay", "ellipse"], capsys)
    assert code == 1 and "ab chart" in err
    code, _, err = run(["scan", "--energy", "dev-hencky", "--chart", "logt2d",
                        "--res", "11", "--out", str(tmp_path / "y.csv"),
                        "--svg", str(tmp_path / "y.svg")], capsys)
    assert code == 1 and "2d chart" in err
    code, _, err = run(["scan", "--energy", "dev-hencky", "--chart", "ab",
                        "--range=-1:1", "--res", "11",
                        "--out", str(tmp_path / "z.csv")], capsys)
    assert code == 1 and "needs 2 ranges" in err
    code, _, err = run(["scan", "--energy", "dev-hencky", "--chart", "logt2d",
                        "--dim", "3", "--res", "11",
                        "--out", str(tmp_path / "w.csv")], capsys)
    assert code == 1 and "implies 2d" in err


def test_trace_round_trip_1d(tmp_path, capsys):
    scan_csv = tmp_path / "s.csv"
    bnd_csv = tmp_path / "b.csv"
    run(["scan", "--energy", "dev-hencky", "--chart", "logt2d",
         "--range=-2:2", "--res", "41", "--out", str(scan_csv)], capsys)
    code, out, _ = run(["trace", "--in", str(scan_csv), "--out", str(bnd_csv),
                        "--json"], capsys)
    assert code == 0
    assert json.loads(out)["outputs"]["polylines"] == 2
    lines = bnd_csv.read_text().splitlines()
    assert lines[0] == "polyline_id,vertex,x,closed"
    xs = sorted(float(line.split(",")[2]) for line in lines[1:])
    assert xs == [-1.0, 1.0]  # interpolated exactly onto the flip points


def test_trace_round_trip_2d(tmp_path, capsys):
    scan_csv = tmp_path / "s.csv"
    bnd_csv = tmp_path / "b.csv"
    svg = tmp_path / "b.svg"
    run(["scan", "--energy", "dev-hencky", "--chart", "ab",
         "--res", "31", "--out", str(scan_csv)], capsys)
    code, _, _ = run(["trace", "--in", str(scan_csv), "--out", str(bnd_csv),
                      "--svg", str(svg), "--overlay", "ellipse"], capsys)
    assert code == 0
    lines = bnd_csv.read_text().splitlines()
    assert lines[0] == "polyline_id,vertex,x,y,closed"
    rows = [line.split(",") for line in lines[1:]]
    assert {r[0] for r in rows} == {"0"} and {r[4] for r in rows} == {"1"}
    # every traced vertex stays near the certified boundary ring
    q = np.array([[float(r[2]), float(r[3])] for r in rows])
    qv = np.sqrt(q[:, 0] ** 2 + q[:, 0] * q[:, 1] + q[:, 1] ** 2)
    assert np.max(np.abs(qv - 1.0)) < 0.3
    assert "<svg " in svg.read_text()
    # a non-grid CSV is rejected
    bad = tmp_path / "bad.csv"
    bad.write_text("u,v\n0,1\n")
    code, _, err = run(["trace", "--in", str(bad), "--out", str(bnd_csv)], capsys)
    assert code == 1 and "verdict" in err


def test_verify_targets(capsys):
    code, out, _ = run(["verify", "prop2d", "--samples", "500"], capsys)
    assert code == 0 and "PASS" in out
    code, out, _ = run(["verify", "appendix", "--resolution", "150", "--json"],
                       capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["outputs"]["passed"] is True
    assert len(rep["outputs"]["checks"]) == 10
    code, out, _ = run(["verify", "exp-hencky", "--samples", "400"], capsys)
    assert code == 0 and "PASS" in out


def test_oracle_subcommand(capsys):
    code, out, _ = run(["oracle", "--energy", "dev-hencky", "--stretches",
                        "1,1,1", "--json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["outputs"]["status"] == "Elliptic"
    assert rep["outputs"]["min_value"] > 0.5
    assert len(rep["outputs"]["xi"]) == 3 and rep["outputs"]["probe_step"] > 0
    code, out, _ = run(["oracle", "--energy", "dev-hencky", "--dim", "2",
                        "--stretches", "3.5,1"], capsys)
    assert code == 2 and "Violated" in out and "xi" in out


def test_console_script_installed():
    # the ellscope entry point is importable the way the install wires it
    r = subprocess.run([sys.executable, "-c",
                        "from ellscope.cli import main; raise SystemExit(main("
                        "['check','--energy','dev-hencky','--stretches','1.5,1']))"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Elliptic" in r.stdout
