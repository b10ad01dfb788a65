import hashlib
import json
from fractions import Fraction

import pytest

from horn.cli import main, parse_numbers


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_lr_counts(capsys):
    code, out, err = run(capsys, "lr", "--n", "4", "--lambda", "21,13,5", "--mu", "7,10,12", "--nu", "20,11,9")
    assert code == 0 and out.strip() == "367"
    assert json.loads(err.strip().splitlines()[-1])["subcommand"] == "lr"
    code, out, _ = run(capsys, "lr", "--n", "3", "--lambda", "1,1", "--mu", "1,1", "--nu", "1,1", "--json")
    assert code == 0 and json.loads(out) == 2


def test_exit_codes(capsys):
    code, _, err = run(capsys, "lr", "--n", "3", "--lambda", "1,1,1", "--mu", "1,1", "--nu", "1,1")
    assert code == 2
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["error"] == "UsageError" and "--lambda" in rec["message"]
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "lr", "--n", "3")[0] == 2
    # complex spectrum for the given invariants is a runtime failure, not a usage error
    code, _, err = run(capsys, "pdf-su", "--alpha", "1,0,-1", "--beta", "1,0,-1", "--gamma", "1,1,1")
    assert code == 1 and json.loads(err.strip().splitlines()[-1])["exit"] == 1


def test_exact_pdf_su(capsys):
    code, out, _ = run(capsys, "pdf-su", "--alpha", "1,0,-1", "--beta", "1,0,-1", "--gamma", "4/5,1/5,-1", "--json")
    rec = json.loads(out)
    assert code == 0 and Fraction(rec["J"]) == Fraction(3, 5) and Fraction(rec["pdf"]) > 0


def test_sample_is_reproducible_and_manifested(capsys, tmp_path, monkeypatch):
    outs = []
    for name, threads in (("a.csv", "1"), ("b.csv", "3")):
        monkeypatch.setenv("HORN_THREADS", threads)
        path = tmp_path / name
        code, _, _ = run(capsys, "sample", "--group", "su", "--n", "3", "--alpha=-1,0,1", "--beta", "1,0,-1",
                         "--samples", "3000", "--seed", "5", "--bins", "8", "--out", str(path))
        assert code == 0
        raw = path.read_bytes()
        assert b"\r" not in raw
        man = json.loads((tmp_path / (name + ".manifest.json")).read_text())
        assert man["seed"] == 5 and man["outputs"][str(path)] == hashlib.sha256(raw).hexdigest()
        assert {"python", "numpy", "scipy"} <= set(man["versions"])
        outs.append(raw)
    assert outs[0] == outs[1]


def test_bad_threads(capsys):
    assert run(capsys, "lr", "--n", "3", "--lambda", "1,1", "--mu", "1,1", "--nu", "1,1", "--threads", "0")[0] == 2


def test_parse_numbers():
    assert parse_numbers("1/2,-1/2") == (Fraction(1, 2), Fraction(-1, 2))
    assert all(isinstance(x, float) for x in parse_numbers("0.5,-0.5"))
    with pytest.raises(Exception):
        parse_numbers("a,b")


def test_other_subcommands(capsys, tmp_path):
    assert run(capsys, "hciz", "--alpha", "1,-1", "--x", "0,0")[0] == 0
    assert run(capsys, "pdf-so2", "--alpha12", "3", "--beta12", "1", "--gamma12", "2.5")[0] == 0
    code, out, _ = run(capsys, "pictograph", "--n", "3", "--lambda", "2,2", "--mu", "2,2", "--nu", "2,2")
    assert code == 0 and out.count("kind: BZ-triangle") == 3
    code, out, _ = run(capsys, "stretch", "--n", "3", "--lambda", "1,1", "--mu", "1,1", "--nu", "1,1", "--json")
    assert code == 0
    code, out, _ = run(capsys, "decompose", "--n", "3", "--lambda", "1,1", "--mu", "1,1", "--json")
    assert code == 0
    path = tmp_path / "so3.csv"
    assert run(capsys, "pdf-so3", "--grid", "3", "--out", str(path))[0] == 0
    assert path.read_bytes().startswith(b"gamma1,gamma2,pdf,flag\n")
