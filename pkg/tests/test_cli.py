import json
from fractions import Fraction

import mpmath
import pytest

from helpers import CORPUS
from oracles import explicit_coefficients
from mahlermu.cli import EXIT_INADMISSIBLE, EXIT_PARSE, EXIT_PIPELINE, main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    data = json.loads(out)
    assert data["schema"] == 1
    return data


def test_expand(capsys):
    data = _json(capsys, "expand", CORPUS / "worked_1_1_1.json", "-n", 4)
    assert data["K"] == 0
    assert data["coefficients"] == ["1", "1", "-1", "1"]


def test_cf(capsys):
    data = _json(capsys, "cf", CORPUS / "worked_1_1_1.json", "--degree", 13)
    assert [d for d in data["degrees"] if d <= 13] == [0, 1, 3, 4, 9, 10, 12, 13]
    assert data["convergents"][1]["q"] == ["1", "1"]
    assert not data["terminated"]


def test_gaps(capsys):
    data = _json(capsys, "gaps", CORPUS / "worked_1_1_1.json", "--horizon", 13, "--steps", 4)
    assert data["gaps"][0] == {"u": 0, "v": 1, "big": True, "primitive": True, "r_g_sequence": [0] * 5}


def test_mu_worked(capsys):
    data = _json(capsys, "mu", CORPUS / "worked_1_1_1.json", "--b", 2)
    assert (data["kind"], data["mu"]) == ("exact", "3")


def test_mu_several_b(capsys):
    data = _json(capsys, "mu", CORPUS / "worked_1_2_1.json", "--b", 2, "--b", 3)
    assert [r["mu"] for r in data["results"]] == ["3", "3"]


def test_mu_enclosure(capsys):
    data = _json(capsys, "mu", CORPUS / "no_big_gap.json", "--b", 2)
    assert data["kind"] == "enclosure"
    assert data["mu"]["lo"] == "2"


def test_inadmissible_b(capsys):
    code, out, err = _run(capsys, "mu", CORPUS / "inadmissible.json", "--b", 2)
    assert code == EXIT_INADMISSIBLE
    payload = json.loads(out)
    assert payload["admissibility"]["failing_t"] == 2
    assert "inadmissible" in err


def test_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"d": 2, "A": ["1/0"], "B": ["1", "1"], "C": ["1"]}')
    code, _, err = _run(capsys, "expand", path)
    assert code == EXIT_PARSE and "error" in err
    code, _, _ = _run(capsys, "expand", tmp_path / "missing.json")
    assert code == EXIT_PARSE
    code, _, _ = _run(capsys, "mu", CORPUS / "worked_1_1_1.json", "--b", 1)
    assert code == EXIT_PARSE
    code, _, _ = _run(capsys, "expand", CORPUS / "worked_1_1_1.json", "--seed", "x")
    assert code == EXIT_PARSE


def test_missing_seed_names_position(capsys, tmp_path):
    path = tmp_path / "h.json"
    path.write_text('{"d": 3, "A": ["2", "1"], "B": ["1", "1"], "C": [], "homogeneous": true}')
    code, _, err = _run(capsys, "expand", path)
    assert code == EXIT_PIPELINE
    assert "0" in err
    data = _json(capsys, "expand", path, "--seed", "0=1", "-n", 3)
    assert data["coefficients"][0] == "1"


def test_rational_series_is_pipeline_error(capsys, tmp_path):
    path = tmp_path / "r.json"
    path.write_text('{"d": 2, "A": ["0", "1"], "B": ["1", "1"], "C": ["1"]}')
    code, _, err = _run(capsys, "mu", path, "--b", 2)
    assert code == EXIT_PIPELINE and "rational" in err


def test_eval(capsys):
    data = _json(capsys, "eval", CORPUS / "worked_1_1_1.json", "--b", 2, "--digits", 60)
    coeffs = explicit_coefficients([1], [1, 1], [1, 1], 3, 0, 240)
    expect = sum(Fraction(c) / 2 ** j for j, c in enumerate(coeffs))
    with mpmath.workdps(80):
        got = mpmath.mpf(data["value"])
        assert abs(got - mpmath.mpf(expect.numerator) / expect.denominator) < mpmath.mpf(10) ** -55
    assert data["digits"] == 60


@pytest.mark.parametrize("name, verdict", [
    ("worked_1_1_1", "conditions-met"),
    ("shifted_homogeneous", "certified-rational"),
    ("shared_phi2", "inconclusive"),
])
def test_check_rationality(capsys, name, verdict):
    data = _json(capsys, "check-rationality", CORPUS / f"{name}.json")
    assert data["rationality"]["verdict"] == verdict


def test_report_emits_files(capsys, tmp_path):
    out = tmp_path / "out"
    data = _json(capsys, "report", CORPUS / "worked_1_1_1.json", "--b", 2, "--digits", 1500, "--emit", out)
    entry = data["results"][0]
    assert entry["mu"]["mu"] == "3"
    assert entry["approximations"]
    for name in ("approximations_b2.csv", "gaps_b2.csv", "convergence_b2.png",
                 "gap_trail_b2.png", "degree_ratios_b2.png"):
        path = out / name
        assert path.exists() and path.stat().st_size > 0
    assert (out / "convergence_b2.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_output_is_deterministic(capsys):
    args = ("mu", CORPUS / "worked_2_1_m3.json", "--b", 3)
    first = _run(capsys, *args)[1]
    second = _run(capsys, *args)[1]
    assert first == second
