import json

import pytest

from jordanlogic.cli import main

QUBIT = '{"kind": "matrix", "ring": "C", "m": 2}'
MIXED = '{"kind": "sum", "parts": [{"kind": "matrix", "ring": "C", "m": 2}, {"kind": "matrix", "ring": "R", "m": 3}]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_pass(capsys):
    code, out, _ = run(capsys, "check", "--algebra", QUBIT, "--trials", "30", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "pass" and len(rep["reports"]) == 7


def test_check_fail(capsys):
    code, out, _ = run(capsys, "check", "--algebra", MIXED, "--suite", "irreducible", "--trials", "20")
    assert code == 1 and json.loads(out)["reports"][0]["witness"]["c1"]["rank"] == 2


def test_check_inconclusive(capsys):
    code, out, _ = run(capsys, "check", "--algebra", QUBIT, "--suite", "gbit", "--trials", "0")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["check", "--algebra", "{not json"],
        ["check", "--algebra", QUBIT, "--tol", "bogus=1"],
        ["spectral", '{"coords": [1, 2]}', "--algebra", QUBIT],
        ["lattice", "meet", '{"coords": [1, 0, 0, 0]}', "--algebra", QUBIT],
        ["reconstruct", "--algebra", '{"kind": "matrix", "ring": "R", "m": 3}'],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_3(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 3 and out == ""
    assert json.loads(err)["verdict"] in ("error", "inconclusive")


def test_byte_identical(capsys):
    argv = ["check", "--algebra", MIXED, "--trials", "20", "--seed", "3", "--no-timestamp"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_timestamp_present_by_default(capsys):
    _, out, _ = run(capsys, "check", "--algebra", QUBIT, "--suite", "gbit", "--trials", "5")
    assert "timestamp" in json.loads(out)


def test_spectral(capsys):
    el = json.dumps({"coords": [3.0, 1.0, 0.0, 0.0]})
    code, out, _ = run(capsys, "spectral", el, "--algebra", QUBIT)
    rep = json.loads(out)
    assert code == 0 and rep["reconstruction_error"] < 1e-12
    assert sorted(rep["decomposition"]["eigenvalues"]) == pytest.approx([1.0, 3.0])


def test_lattice_meet_of_overlapping_planes(capsys):
    alg = '{"kind": "matrix", "ring": "R", "m": 3}'
    # span(e1, e2) meet span(e2, e3) = span(e2)
    p = json.dumps({"coords": [1, 1, 0, 0, 0, 0]})
    q = json.dumps({"coords": [0, 1, 1, 0, 0, 0]})
    code, out, _ = run(capsys, "lattice", "meet", p, q, "--algebra", alg)
    assert code == 0
    assert json.loads(out)["result"]["coords"] == pytest.approx([0, 1, 0, 0, 0, 0], abs=1e-10)


def test_lattice_join_compat_dim(capsys):
    p = json.dumps({"coords": [1, 0, 0, 0]})
    q = json.dumps({"coords": [0, 1, 0, 0]})
    _, out, _ = run(capsys, "lattice", "join", p, q, "--algebra", QUBIT)
    assert json.loads(out)["result"]["coords"] == pytest.approx([1, 1, 0, 0], abs=1e-10)
    _, out, _ = run(capsys, "lattice", "compat", p, q, "--algebra", QUBIT)
    assert json.loads(out)["result"] is True
    plus = json.dumps({"coords": [0.5, 0.5, 2**-0.5, 0]})
    _, out, _ = run(capsys, "lattice", "compat", p, plus, "--algebra", QUBIT)
    assert json.loads(out)["result"] is False
    _, out, _ = run(capsys, "lattice", "dim", p, "--algebra", QUBIT)
    assert json.loads(out)["result"] == 1


def test_reconstruct_pass(capsys):
    code, out, _ = run(capsys, "reconstruct", "--algebra", '{"kind": "matrix", "ring": "R", "m": 2}',
                       "--samples", "2000")
    assert code == 0 and json.loads(out)["construction"]["jordan"]["verdict"] == "pass"


def test_out_and_pretty(capsys, tmp_path):
    path = tmp_path / "rep.json"
    code, out, _ = run(capsys, "check", "--algebra", QUBIT, "--suite", "gbit", "--trials", "5", "--out", str(path),
                       "--pretty", "--no-timestamp")
    assert code == 0 and "gbit" in out and not out.lstrip().startswith("{")
    assert json.loads(path.read_text())["verdict"] == "pass"


def test_algebra_from_file(capsys, tmp_path):
    path = tmp_path / "alg.json"
    path.write_text(QUBIT)
    code, _, _ = run(capsys, "check", "--algebra", str(path), "--suite", "gbit", "--trials", "5")
    assert code == 0
