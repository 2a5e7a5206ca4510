import csv
import io
import json
import math
import subprocess
import sys

import mpmath
import pytest

from lwtransform.cli import main, parse_config, run
from lwtransform.errors import UsageError


def test_parse_roundtrip_example():
    cfg = parse_config(["roundtrip", "--n", "2", "--grid", "0.5:2:64", "--tol", "1e-4"])
    assert cfg.command == "roundtrip" and cfg.n == 2
    assert cfg.grid == [(0.5, 2.0, 64)] and cfg.tol == 1e-4 and cfg.threads >= 1


@pytest.mark.parametrize("argv", [
    ["whittaker", "--t", "1", "--y", "1"],
    ["whittaker", "--n", "2", "--t", "1,2", "--y", "1"],
    ["roundtrip", "--n", "3", "--grid", "0.5:2:16"],
    ["roundtrip", "--n", "2", "--grid", "2:0.5:16"],
    ["gamma", "--s", "abc"],
    ["gamma", "--s", "1", "--tol", "-1"],
    ["gamma", "--s", "1", "--threads", "0"],
    ["nosuchcommand"],
    ["whittaker", "--n", "2", "--t", "1", "--y", "1", "--bogus", "3"],
])
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_config(argv)


def test_main_exit_code_usage(capsys):
    assert main(["whittaker", "--t", "1"]) == 2
    assert "--n" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 3, "t": [0.1, 0.2], "y": [1.0, 1.0], "tol": 1e-6}))
    cfg = parse_config(["whittaker", "--config", str(path), "--tol", "1e-9"])
    assert cfg.n == 3 and cfg.t == [0.1, 0.2] and cfg.tol == 1e-9
    path.write_text(json.dumps({"n": 2, "colour": "red"}))
    with pytest.raises(UsageError):
        parse_config(["gamma", "--s", "1", "--config", str(path)])


def _rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_gamma_command(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["gamma", "--s", "5", "--output", str(out)]) == 0
    row = _rows(out)[0]
    assert float(row["re_gamma"]) == pytest.approx(24.0, rel=1e-14)


def test_whittaker_grid_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["whittaker", "--n", "3", "--t", "0.3,0.1", "--grid", "0.5:2:3,0.5:2:3"]
    assert main(args + ["--threads", "1", "--output", str(a)]) == 0
    assert main(args + ["--threads", "4", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    assert len(rows) == 9
    assert list(rows[0]) == ["n", "t1", "t2", "y1", "y2", "W", "W_im", "est_error", "method", "seconds"]
    assert rows[0]["method"] == "MellinBarnesGL3"
    # 17 significant digits
    assert rows[0]["t1"] == "0.29999999999999999"


def test_whittaker_gl2_value(tmp_path):
    ref = 2 * float(mpmath.besselk(0, 2 * mpmath.pi))
    out = tmp_path / "w.json"
    assert main(["whittaker", "--n", "2", "--t", "0", "--y", "1", "--format", "json",
                 "--output", str(out)]) == 0
    row = json.loads(out.read_text())[0]
    assert row["W"] == pytest.approx(ref, rel=1e-12)


def test_forward_and_roundtrip_commands(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["forward", "--n", "2", "--t", "0", "--grid", "0.5:2:64", "--output", str(out)]) == 0
    assert float(_rows(out)[0]["re"]) > 0
    rt = tmp_path / "rt.json"
    code = main(["roundtrip", "--n", "2", "--grid", "0.5:2:64", "--T", "6", "--format", "json",
                 "--output", str(rt)])
    rep = json.loads(rt.read_text())
    assert code == 1 and not rep["passed"] and rep["timings"] == {}


def test_stade_and_residue_commands(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["stade", "--n", "2", "--t", "0", "--u", "0", "--output", str(out)]) == 0
    row = _rows(out)[0]
    assert row["status"] == "PASS" and float(row["rhs_re"]) == pytest.approx(math.pi / 2, rel=1e-14)
    res = tmp_path / "r.csv"
    main(["residue-check", "--t", "0.4,0.9", "--output", str(res)])
    assert len(_rows(res)) == 8


def test_mellin_command(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["mellin", "--output", str(out)]) == 0
    assert all(r["status"] == "PASS" for r in _rows(out))


def test_numerical_error_exit_code(tmp_path):
    cfg = parse_config(["whittaker", "--n", "2", "--t", "500", "--y", "1"])
    assert run(cfg) == 3


@pytest.mark.slow
def test_verify_all_module_entry(tmp_path):
    out = tmp_path / "v.json"
    proc = subprocess.run([sys.executable, "-m", "lwtransform", "verify-all", "--format", "json",
                           "--output", str(out)], capture_output=True, text=True)
    items = json.loads(out.read_text())
    names = {i["identity"] for i in items}
    assert {"StadeN2", "StadeN3", "ResidueR11", "MellinKernel", "MellinRoundtrip",
            "MellinPlancherel", "PlancherelEquality", "RoundtripGL2"} <= names
    assert proc.returncode == 0, proc.stderr
