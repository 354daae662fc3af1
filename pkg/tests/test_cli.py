import json
from pathlib import Path

import pytest

from newtonosc.cli import main

GOLDEN = Path(__file__).parent / "golden"
EX = "x2^2*x3^3*x4 + x1^2*x3*x4^3 + x1^2*x2^2*x3*x4"

CASES = {
    "analyze_example": ["analyze", EX, "--vars", "x1,x2,x3,x4"],
    "analyze_square": ["analyze", "x1^2"],
    "analyze_cubic": ["analyze", "x1^3+x2^3+x1*x2*x3"],
    "fan_two_terms": ["fan", "x1^2+x2^4"],
    "scan_n1_b4": ["scan", "--n", "1", "--bound", "4"],
}


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(capsys, name):
    code, doc, _ = run(capsys, CASES[name])
    assert code == 0
    want = json.loads((GOLDEN / f"{name}.json").read_text())
    assert doc == want


def test_analyze_example_fields(capsys):
    _, doc, _ = run(capsys, CASES["analyze_example"])
    assert doc["diagonal"]["rho"] == 2
    assert doc["stability"]["overall"]["verdict"] == "certified"
    tf = {(tuple(x["normal"]), x["offset"]) for x in doc["diagonal"]["tau0_facets"]}
    assert tf == {((0, 1, 0, 1), 3), ((1, 0, 1, 0), 3)}
    assert doc["projection_condition"]["any"] is False


def test_analyze_square_fields(capsys):
    _, doc, _ = run(capsys, CASES["analyze_square"])
    assert doc["diagonal"]["rho"] == 1 and doc["diagonal"]["s0"] == {"num": -1, "den": 2}


def test_analyze_cubic_star(capsys):
    _, doc, _ = run(capsys, CASES["analyze_cubic"])
    assert doc["diagonal"]["s0_integral"] is True
    assert doc["star"]["diagonal"]["s0"] == {"num": -3, "den": 2}
    assert "x3" in doc["stability"]["unstable_variables"]


def test_fan_fields(capsys):
    _, doc, _ = run(capsys, CASES["fan_two_terms"])
    nd = {tuple(d["ray"]): (d["N"], d["nu"]) for d in doc["numerical_data"]}
    assert nd == {(1, 0): (0, 1), (2, 1): (4, 3), (0, 1): (0, 1)}
    poles = {(p["pole"]["num"], p["pole"]["den"]): p["multiplicity_bound"] for p in doc["candidate_poles"]}
    assert poles[(-3, 4)] == 1


def test_fan_simple(capsys):
    code, doc, _ = run(capsys, ["fan", "x1^2+x2^5", "--simple"])
    assert code == 0 and doc["all_simple"] and doc["covers_orthant"]


def test_mu_all_square(capsys):
    code, doc, _ = run(capsys, ["mu", "x1^2", "--method", "all"])
    assert code == 0 and set(doc["results"]) == {"formula", "residue", "fit"}
    assert max(doc["relative_deltas"].values()) < 0.02


def test_mu_residue_noncompact(capsys):
    code, doc, _ = run(capsys, ["mu", "x1^2", "--vars", "x1,x2", "--method", "residue"])
    assert code == 3
    assert "not compact" in doc["unavailable"]["residue"]["message"]


def test_scan_out(capsys, tmp_path):
    code, doc, _ = run(capsys, ["scan", "--n", "2", "--bound", "3", "--out", str(tmp_path)])
    assert code == 0 and doc["violations"] == []
    assert (tmp_path / "scan_n2_b3.csv").exists() and (tmp_path / "scan_n2_b3.json").exists()


@pytest.mark.parametrize("argv", [["scan", "--n", "5", "--bound", "1"], ["analyze", "x^2 - x^2"],
                                  ["analyze", "x^-2"], ["nonsense"]])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, argv)
    assert code == 2


def test_model(capsys):
    code, doc, _ = run(capsys, ["model", "--eps", "1", "--eta", "1/2", "--t", "1000"])
    assert code == 0 and doc["relative_difference"] < 1e-5


def test_fit_csv(capsys, tmp_path):
    out = tmp_path / "samples.csv"
    code, doc, _ = run(capsys, ["fit", "x1^3", "--out", str(out)])
    assert code == 0 and out.read_text().startswith("t,re,im,err_estimate")
