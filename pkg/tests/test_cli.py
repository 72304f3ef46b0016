import json
import subprocess
import sys

import numpy as np
import pytest

from psdperm.cli import main
from psdperm.io import write_matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def vec_file(tmp_path):
    rng = np.random.default_rng(0)
    V = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    path = tmp_path / "v.json"
    write_matrix(path, V)
    return str(path)


def test_exact_identity(tmp_path, capsys):
    path = tmp_path / "i.json"
    write_matrix(path, np.eye(3))
    code, out = run(capsys, "exact", "--input", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["log_value"] == 0.0


def test_bounds_sandwich(vec_file, capsys):
    code, out = run(capsys, "bounds", "--input", vec_file, "--exact")
    res = json.loads(out)["result"]
    assert code == 0 and res["sandwich_ok"]


@pytest.mark.parametrize("cmd", [["sdp"], ["round", "--samples", "20"], ["wick", "--samples", "1000"],
                                 ["norm2q", "--q", "0", "--samples", "1000"]])
def test_subcommands_run(vec_file, capsys, cmd):
    code, out = run(capsys, cmd[0], "--input", vec_file, *cmd[1:])
    assert code == 0 and json.loads(out)["command"] == cmd[0]


def test_gadget_build_and_check(tmp_path, capsys):
    mpath = tmp_path / "e.json"
    code, out = run(capsys, "gadget", "build", "--k", "2", "--matrix-out", str(mpath))
    assert code == 0 and json.loads(mpath.read_text())["rows"] == 16
    code, _ = run(capsys, "gadget", "check", "--k", "8", "--delta", "0.05")
    assert code == 1


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "exact", "--input", str(bad))[0] == 2
    assert run(capsys, "exact", "--input", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "gadget", "build", "--k", "11")[0] == 4
    big = tmp_path / "big.json"
    write_matrix(big, np.eye(30))
    assert run(capsys, "exact", "--input", str(big))[0] == 4


def test_exact_accepts_general_square(tmp_path, capsys):
    path = tmp_path / "g.json"
    write_matrix(path, np.array([[1.0, 2.0], [3.0, 1.0]]))
    code, out = run(capsys, "exact", "--input", str(path))
    assert code == 0 and json.loads(out)["result"]["log_value"] == pytest.approx(np.log(7.0))
    wide = tmp_path / "w.json"
    write_matrix(wide, np.ones((2, 3)))
    assert run(capsys, "exact", "--input", str(wide))[0] == 2


def test_seed_from_environment(vec_file, capsys, monkeypatch):
    monkeypatch.setenv("PERM_SEED", "42")
    _, out = run(capsys, "wick", "--input", vec_file, "--samples", "100", "--seed", "1")
    cfg = json.loads(out)["config"]
    assert cfg["seed"] == 42 and cfg["seed_source"] == "env"


def test_csv_output(capsys):
    code, out = run(capsys, "verify", "gap", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("name,") and lines[1].startswith("gap_grid,")


def test_deterministic_reports(vec_file):
    cmd = [sys.executable, "-m", "psdperm.cli", "round", "--input", vec_file, "--samples", "50", "--seed", "5"]
    a = json.loads(subprocess.run(cmd, capture_output=True, text=True).stdout)
    b = json.loads(subprocess.run(cmd, capture_output=True, text=True).stdout)
    assert a["result"] == b["result"]
