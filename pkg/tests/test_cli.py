import json
import subprocess
import sys

import pytest

from kzbperiod.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_curve_data(capsys):
    code, out = run(capsys, "curve-data", "--e4", "1", "--e6", "0", "--max-k", "4")
    assert code == 0
    d = json.loads(out.out)
    assert d["schema"] == 1 and "conventions" in d
    P = {e["k"]: e["value"] for e in d["P"]}
    assert P[4] == "x^2 - 6" and P[2] == "x" and P[3] == "-1/2*y"
    assert {e["n"]: e["value"] for e in d["p"]}[2] == "-1/2*x"
    assert d["curve"] == {"e4": "1/1", "e6": "0/1"}


@pytest.mark.parametrize(
    "argv",
    [
        ["curve-data", "--e4", "0", "--e6", "0"],
        ["period-map", "--basepoint", "1,1"],
        ["period-map", "--basepoint", "4,4", "--depth", "1"],
        ["flat-section", "--e4=1/20", "--e6=1/140", "--tangential"],
        ["period-map", "--basepoint", "four,4"],
        ["period-map"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 2
    assert out.err.startswith("error:")


def test_unknown_suite_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "unknown"])
    assert e.value.code == 2


def test_period_map_depth2(capsys):
    code, out = run(capsys, "period-map", "--basepoint", "4,4", "--depth", "2", "--order", "8")
    d = json.loads(out.out)
    assert code == 0 and d["diff"] == []
    assert [r["method"] for r in d["results"]] == ["closed", "oracle"]
    assert all(r["B"] == "0/1" for r in d["results"])


def test_period_map_tangential_closed(capsys):
    code, out = run(capsys, "period-map", "--tangential", "--depth", "3", "--order", "6", "--method", "closed")
    d = json.loads(out.out)
    assert code == 0 and "diff" not in d and d["chart"] == "tangential"
    s00 = d["results"][0]["sigma"][0]
    assert any(t["j"] > 0 for t in s00["value"]["terms"])


def test_flat_section(capsys, tmp_path):
    out_file = tmp_path / "fs.json"
    code, _ = run(capsys, "flat-section", "--basepoint", "4,-4", "--depth", "3", "--order", "6", "--out", str(out_file))
    d = json.loads(out_file.read_text())
    assert code == 0 and d["diff"] == []
    assert {(e["u"], e["v"]) for e in d["recursion"]["Gstar"]} >= {(1, 0), (0, 1)}


def test_verify_residue(capsys):
    code, out = run(capsys, "verify", "--suite", "residue")
    lines = [json.loads(line) for line in out.out.splitlines()]
    assert code == 0 and lines[-1]["ok"]
    assert all(c["detail"]["residue"] == "(-1)*s00" for c in lines[:-1])


def test_verify_adaverage(capsys):
    code, out = run(capsys, "verify", "--suite", "adaverage")
    summary = json.loads(out.out.splitlines()[-1])
    assert code == 0 and summary["total"] == sum(n + 1 for n in range(1, 9))


def test_deterministic_bytes(capsys):
    argv = ["period-map", "--e4=2/3", "--e6=-5/7", "--basepoint", "-4,2", "--depth", "3", "--order", "6"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a.out == b.out and a.out


def test_module_entry_point():
    p = subprocess.run(
        [sys.executable, "-m", "kzbperiod", "curve-data", "--max-k", "3"], capture_output=True, text=True, check=False
    )
    assert p.returncode == 0 and json.loads(p.stdout)["command"] == "curve-data"
    p = subprocess.run([sys.executable, "-m", "kzbperiod", "curve-data", "--e4", "0", "--e6", "0"], capture_output=True, text=True)
    assert p.returncode == 2
