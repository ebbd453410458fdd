import json
import subprocess
import sys

import pytest

from shimlift.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reproduce_example(capsys):
    code, out, _ = run(capsys, "reproduce-example")
    data = json.loads(out)
    assert code == 0 and data["diff"] == []
    assert data["certificate"]["multiplier"] == {"E4": 3, "E6": 0}


def test_basis_then_lift(capsys, tmp_path):
    code, out, _ = run(capsys, "basis", "--m", "2", "--pole", "3", "--prec", "26")
    assert code == 0
    path = tmp_path / "g.json"
    path.write_text(out)
    code, out, _ = run(capsys, "lift", "--m", "2", "--N", "1", "--input", str(path),
                       "--prec", "5", "--poles", "3")
    data = json.loads(out)
    assert code == 0
    assert data["coefficients"] == {"1": "384", "2": "-479232", "3": "274558464",
                                    "4": "-118219210752", "5": "43867326009600"}
    assert [p["point"]["form"] for p in data["poles"]] == [[1, 1, 1]]


def test_lift_usage_errors(capsys, tmp_path):
    code, _, err = run(capsys, "lift", "--m", "2", "--input", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err
    short = tmp_path / "short.json"
    short.write_text(run(capsys, "basis", "--m", "2", "--pole", "3", "--prec", "10")[1])
    code, _, err = run(capsys, "lift", "--m", "2", "--input", str(short), "--prec", "5")
    assert code == 2 and "precision" in err


def test_bad_flags_exit_2(capsys):
    assert run(capsys, "lift")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "theta-verify", "--check", "pde", "--threads", "0")[0] == 2


def test_theta_pde_tolerance(capsys):
    code, out, _ = run(capsys, "theta-verify", "--check", "pde", "--r", "1", "--s", "1", "--t", "1")
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "theta-verify", "--check", "pde", "--r", "1", "--s", "1",
                       "--t", "1", "--h", "1")
    assert code == 1 and not json.loads(out)["pass"]


def test_theta_pole_report(capsys):
    code, out, _ = run(capsys, "theta-verify", "--check", "pole")
    assert code == 0
    code, out, _ = run(capsys, "theta-verify", "--check", "pole", "--lead", "stated")
    assert code == 1 and json.loads(out)["residual"] > 6


def test_cm_class(capsys):
    code, out, _ = run(capsys, "cm-class", "--tau0", "0,1,-5", "--tau", "0,1,-5", "--N", "1")
    data = json.loads(out)
    assert code == 0 and data["kind"] == "cm"
    assert data["form"]["ab"] == "-1" and data["form"]["cd"] == "-5"
    code, out, _ = run(capsys, "cm-class", "--tau0", "inf", "--tau", "1/3,1/2,-7", "--N", "2")
    assert code == 0 and json.loads(out)["form"]["cd"] == "-1/2"
    assert run(capsys, "cm-class", "--tau0", "1", "--tau", "0,1,3")[0] == 2


def test_relations_and_classical(capsys):
    code, out, _ = run(capsys, "relations", "--m", "2", "--nmax", "12")
    assert code == 0 and json.loads(out)["quotient_rank"] == 0
    code, out, _ = run(capsys, "classical", "cohen", "--prec", "6")
    terms = dict(json.loads(out)["series"]["terms"])
    assert terms[1] == "-10" and terms[4] == "-70" and terms[5] == "-48"


def test_text_format(capsys):
    code, out, _ = run(capsys, "--format", "text", "classical", "h2", "--n", "1")
    assert code == 0 and "values.1 = -1/12" in out


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "shimlift", "theta-verify", "--check", "modularity",
           "--threads", "3"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["pass"]
