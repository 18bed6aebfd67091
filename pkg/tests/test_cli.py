import json
import subprocess
import sys

import pytest

from ppol.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_example_m3(capsys):
    code, out, _ = _run(capsys, "gen", "--m", "3", "--set", "0,1,4,6")
    assert code == 0
    data = json.loads(out)
    assert data["slots"] == [0, 0, 2, 1, 0, 1, 0, 3, 3, 2, 2, 3, 1]
    assert data["difference_set"] == [0, 1, 4, 6]


def test_gen_csv(capsys):
    code, out, _ = _run(capsys, "gen", "--m", "3", "--set", "0,1,4,6", "--format", "csv")
    assert out == "0,0,2,1,0,1,0,3,3,2,2,3,1\n"


def test_verify_theorem2(capsys):
    code, out, _ = _run(capsys, "verify-theorem2", "--N", "4")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] and data["mttr_slots"] <= 31 and data["bound"] == 31


def test_verify_corollary1(capsys):
    code, out, _ = _run(capsys, "verify-corollary1", "--N", "4")
    assert code == 0 and json.loads(out)["passed"]


def test_verify_theorem1(capsys):
    code, out, _ = _run(capsys, "verify-theorem1", "--m", "5")
    assert code == 0 and json.loads(out)["min_dor"] == 4


def test_verify_pds_failure(capsys):
    code, out, err = _run(capsys, "verify-pds", "--p", "13", "--set", "0,1,2,4")
    assert code == 1
    assert json.loads(out)["duplicates"]["1"] == 2
    assert len(err.strip().splitlines()) == 1 and "duplicated" in err


def test_verify_pds_pass(capsys):
    code, out, _ = _run(capsys, "verify-pds", "--p", "13", "--set", "0,1,4,6")
    assert code == 0


def test_dor_csv(capsys):
    code, out, _ = _run(capsys, "dor", "--m", "3", "--set", "0,1,4,6", "--format", "csv")
    assert out.splitlines()[1] == "1,3,1"


def test_remap(capsys):
    code, out, _ = _run(capsys, "remap", "--N", "4", "--available", "0,2", "--seed", "3")
    data = json.loads(out)
    assert set(data["slots"]) <= {0, 2}
    assert data["plan"]["deterministic_map"] == {"1": 0, "3": 2}
    assert data["seed"] == 3


def test_remap_pessimistic(capsys):
    code, out, _ = _run(capsys, "remap", "--N", "4", "--available", "0,2", "--pessimistic")
    assert -1 in json.loads(out)["slots"]


def test_simulate_and_compare(capsys, tmp_path):
    scen = tmp_path / "s.json"
    scen.write_text(json.dumps({"N": 4, "n1": 2, "n2": 3, "g": 2, "trials": 500, "seed": 1}))
    code, out, _ = _run(capsys, "simulate", "--scenario", str(scen), "--baseline")
    data = json.loads(out)
    assert code == 0 and [r["algorithm"] for r in data["results"]] == ["ppol", "random"]
    code, out, _ = _run(capsys, "compare", "--scenario", str(scen))
    assert code == 0 and json.loads(out)["ettr_ratio"] > 0


def test_output_file(capsys, tmp_path):
    target = tmp_path / "seq.json"
    code, out, _ = _run(capsys, "gen", "--m", "2", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["p"] == 7


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 2),
        ([], 2),
        (["gen", "--m", "6"], 2),
        (["gen", "--m", "3", "--set", "0,1,2,4"], 2),
        (["gen"], 2),
        (["verify-theorem2", "--N", "12"], 2),
        (["simulate", "--N", "4", "--n1", "2", "--n2", "2", "--g", "3"], 2),
        (["simulate", "--scenario", "/nonexistent/scenario.json"], 3),
        (["gen", "--m", "3", "--output", "/nonexistent/dir/out.json"], 3),
    ],
)
def test_error_codes(capsys, argv, code):
    got, out, err = _run(capsys, *argv)
    assert got == code
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("ppol: error: ")


def test_byte_identical_reruns(capsys):
    argv = ["compare", "--N", "6", "--n1", "3", "--n2", "3", "--g", "2", "--trials", "300", "--seed", "9"]
    first = _run(capsys, *argv)[1]
    assert _run(capsys, *argv)[1] == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ppol", "gen", "--m", "3", "--set", "0,1,4,6", "--format", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "0,0,2,1,0,1,0,3,3,2,2,3,1\n"
