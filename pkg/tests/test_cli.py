import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from borelcalc import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_apply_derivative_json(capsys):
    code, out, _ = run(["apply", "--symbol", "poly:0,1", "--fn", "exp:2", "--t", "1", "--out", "-"], capsys)
    assert code == 0
    env = json.loads(out)
    assert set(env) == {"version", "config", "results", "diagnostics"}
    assert env["results"][0]["value_re"] == pytest.approx(2 * math.e**2, rel=1e-12)


def test_unsupported_h_exit_code(capsys):
    code, out, err = run(["zeta-solve", "--h", "0.5", "--source", "one"], capsys)
    assert code == 1 and out == ""
    assert "h ≤ 1 unsupported in zeta-solve" in json.loads(err)["error"]["message"]


def test_missing_symbol_is_usage_error(capsys):
    code, _, err = run(["apply", "--fn", "exp:2", "--t", "1"], capsys)
    assert code == 2
    assert "usage:" in err and "--symbol" in err


def test_bad_function_string_exit_2(capsys):
    code, _, err = run(["apply", "--symbol", "exp", "--fn", "tan:1", "--t", "0"], capsys)
    assert code == 2 and "tan:1" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["apply", "--format", "xml"])
    assert info.value.code == 2


def test_empty_grid_csv_header_only(capsys):
    code, out, _ = run(["apply", "--symbol", "poly:0,1", "--fn", "exp:1", "--t", "1:0:0.5",
                        "--format", "csv"], capsys)
    assert code == 0
    assert out == "t_re,t_im,value_re,value_im,error\n"


def test_csv_rows(capsys):
    code, out, _ = run(["apply", "--symbol", "exp", "--fn", "cos:1", "--t", "0:1:0.5", "--out", "csv"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3
    for row in rows:
        t = float(row["t_re"])
        assert float(row["value_re"]) == pytest.approx(math.cos(t + 1), abs=1e-12)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"symbol": "poly:0,1", "fn": "exp:3", "t": "0"}))
    _, out, _ = run(["apply", "--config", str(cfg)], capsys)
    assert json.loads(out)["results"][0]["value_re"] == pytest.approx(3.0)
    _, out, _ = run(["apply", "--config", str(cfg), "--fn", "exp:5"], capsys)
    assert json.loads(out)["results"][0]["value_re"] == pytest.approx(5.0)


def test_output_file_and_io_error(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, _, _ = run(["borel", "--fn", "polyexp:1,2@1", "--z", "3,2i", "--out", str(path)], capsys)
    assert code == 0 and path.read_text().startswith("z_re,")
    code, _, err = run(["borel", "--fn", "exp:1", "--z", "3", "--out", str(tmp_path / "no" / "x.json")],
                       capsys)
    assert code == 1 and "io" in err


def test_zeros_with_catalog_env(tmp_path, monkeypatch, capsys, catalog):
    path = tmp_path / "cat.json"
    catalog.save(path)
    monkeypatch.setenv(cli.CATALOG_ENV, str(path))
    code, out, _ = run(["zeros", "--symbol", "zeta-shifted:h=2", "--radius", "4"], capsys)
    assert code == 0
    env = json.loads(out)
    # six trivial pairs +-i sqrt(2n + 2) plus four from the first nontrivial zero
    assert env["diagnostics"]["count"] == 16
    assert env["config"]["catalog"] == str(path)


def test_solve_reports_residual(capsys):
    code, out, _ = run(["solve", "--symbol", "poly:0,0,-1,1", "--rhs", "exp:2", "--radius", "2",
                        "--grid", "0:2:0.5"], capsys)
    env = json.loads(out)
    assert code == 0
    assert env["diagnostics"]["dimension"] == 3
    assert env["diagnostics"]["residual"]["max"] <= 1e-7


def test_homog_coeffs_shape_error(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps([[1]]))
    code, _, err = run(["solve", "--symbol", "poly:0,0,-1,1", "--rhs", "exp:2", "--radius", "2",
                        "--homog-coeffs", str(path)], capsys)
    assert code == 1 and json.loads(err)["error"]["type"]


def test_recover_is_deterministic(capsys):
    argv = ["recover", "--source", "one", "--psi", "0.875pi", "--t", "0.5,1,2", "--r-schedule", "10,20"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_parse_helpers():
    assert np.allclose(cli.parse_grid("0:1:0.25").real, [0, 0.25, 0.5, 0.75, 1])
    assert list(cli.parse_grid("1,2i")) == [1, 2j]
    assert cli.parse_angle("0.875pi") == pytest.approx(0.875 * math.pi)
    assert cli.parse_angle("7pi/8") == pytest.approx(0.875 * math.pi)
    assert cli.parse_angle("pi") == pytest.approx(math.pi)
    with pytest.raises(cli.UsageError):
        cli.parse_angle("wide")
    assert cli.parse_angle("3/4pi") == pytest.approx(0.75 * math.pi)
    with pytest.raises(cli.UsageError):
        cli.parse_schedule("20,10")
    f = cli.parse_function("sin:2;poly:1,1")
    assert f(0.3) == pytest.approx(math.sin(0.6) + 1.3)


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "borelcalc", "apply", "--symbol", "poly:0,1",
                          "--fn", "exp:2", "--t", "1", "--out", "csv"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "t_re,t_im,value_re,value_im,error"
