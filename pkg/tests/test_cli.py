import io
import json
import subprocess
import sys

import pytest

from piforge.cli import main
from piforge.quiver import grassmann_quiver


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


@pytest.fixture
def files(tmp_path):
    (tmp_path / "grass.poly").write_text("x1.x2.x3 - x2.x1.x3 - x3.x1.x2 + x3.x2.x1\n")
    (tmp_path / "comm.poly").write_text("x1.x2 - x2.x1\n")
    (tmp_path / "g2.json").write_text(json.dumps(grassmann_quiver(3).to_json()))
    (tmp_path / "m.json").write_text(json.dumps({"n": 2, "field": "F2", "rows": [["0", "1"], ["1", "1"]]}))
    (tmp_path / "bool.poly").write_text("x1.x1 + x1\n")
    (tmp_path / "anticomm.poly").write_text("x1.x2 + x2.x1\n")
    return tmp_path


def test_parse_print_roundtrip(capsys, monkeypatch):
    text = "x3 + 2*x1.x2 + 2*x2.x1.x1"
    code, parsed, _ = run(["poly", "parse", "--field", "F3", "--expr", text], capsys)
    assert code == 0
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(parsed)))
    code, printed, _ = run(["poly", "print", "--field", "F3", "--poly", "-"], capsys)
    assert code == 0 and printed["result"]["text"] == text


def test_check_identity_grassmann(files, capsys):
    code, rep, _ = run(["check", "identity", "--poly", str(files / "grass.poly"), "--quiver",
                        str(files / "g2.json"), "--mode", "exhaustive"], capsys)
    assert code == 0 and rep["result"]["verdict"] == "identity"
    assert rep["config"]["seed"] == 0 and rep["exit_code"] == 0


def test_check_identity_witness(files, capsys):
    code, rep, _ = run(["check", "identity", "--poly", str(files / "comm.poly"), "--quiver",
                        str(files / "g2.json")], capsys)
    assert code == 0 and rep["result"]["verdict"] == "non-identity"
    assert rep["result"]["witness"]


def test_mat_charpoly(files, capsys):
    code, rep, _ = run(["mat", "charpoly", "--matrix", str(files / "m.json")], capsys)
    assert code == 0 and rep["result"]["coefficients"] == ["1", "1"]


def test_tideal_member(files, capsys):
    code, rep, _ = run(["tideal", "member", "--gens", str(files / "bool.poly"), "--target",
                        str(files / "anticomm.poly"), "--deg", "2"], capsys)
    assert code == 0 and rep["result"]["verdict"] == "member"
    assert rep["result"]["certificate"]


def test_exit_codes(files, capsys):
    # inconclusive: no certificate exists within degree 2
    code, rep, _ = run(["tideal", "member", "--gens", str(files / "comm.poly"), "--target",
                        str(files / "bool.poly"), "--deg", "2"], capsys)
    assert code == 2 and rep["result"]["verdict"] == "not-found"
    # error: missing input file
    code, rep, err = run(["mat", "charpoly", "--matrix", str(files / "missing.json")], capsys)
    assert code == 1 and rep["result"]["error"] and "piforge" in err
    # usage error
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64
    assert "usage" in capsys.readouterr().err


def test_reports_are_byte_identical(files, tmp_path, monkeypatch):
    args = ["check", "identity", "--poly", str(files / "comm.poly"), "--ring", "3", "--p", "2",
            "--mode", "randomized", "--budget", "2000", "--seed", "7"]
    blobs = []
    for n in ("1", "4", "8", "4"):
        monkeypatch.setenv("PIFORGE_THREADS", n)
        out = tmp_path / f"r{len(blobs)}.json"
        main(["--out", str(out)] + args)
        blobs.append(out.read_bytes())
    assert len(set(blobs)) == 1
    assert json.loads(blobs[0])["config"]["seed"] == 7


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "piforge", "quiver", "validate", "--quiver",
                           str(files / "g2.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "quiver"
