from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tdsharp.cli import main
from tdsharp.fields import GF
from tdsharp.instances import Instance, InstanceError, parse_instance
from tdsharp.linalg import matrix


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return path


SHARP = {"version": 1, "field": {"kind": "prime", "p": 5, "k": 1}, "A": [[0, 0], [1, 1]], "Astar": [[0, 1], [0, 1]]}
DIAG = {"version": 1, "field": {"kind": "prime", "p": 5, "k": 1}, "A": [[0, 0], [0, 1]], "Astar": [[0, 0], [0, 1]]}


def test_parse_rejects_non_square():
    doc = dict(SHARP, A=[[0, 0], [1]])
    with pytest.raises(InstanceError, match="A not square"):
        parse_instance(doc)


def test_parse_rejects_out_of_range():
    doc = {"version": 1, "field": {"kind": "prime", "p": 2, "k": 1}, "A": [[0, 2], [1, 1]], "Astar": [[0, 1], [0, 1]]}
    with pytest.raises(InstanceError, match="coefficient out of range for p=2: 2"):
        parse_instance(doc)


def test_parse_bad_json_reports_position():
    with pytest.raises(InstanceError, match="line 1 column"):
        parse_instance("{not json")


def test_parse_emit_identity(flagship):
    text = flagship.dumps()
    again = parse_instance(text)
    assert again == flagship and again.dumps() == text
    assert again.digest() == flagship.digest()
    inst = Instance(GF(5), matrix(GF(5), [[1]]), matrix(GF(5), [[2]]))
    assert parse_instance(inst.dumps()).dumps() == inst.dumps()


def test_exit_codes(tmp_path, capsys):
    assert main(["verify", str(write(tmp_path, "s.json", SHARP))]) == 0
    assert "d=1 shape=(1, 1) sharp=true" in capsys.readouterr().out
    assert main(["verify", str(write(tmp_path, "r.json", DIAG))]) == 2
    assert "failed: reducible" in capsys.readouterr().out
    assert main(["verify", str(write(tmp_path, "bad.json", "[1, 2"))]) == 1
    assert main(["verify", str(tmp_path / "missing.json")]) == 1
    assert main(["bogus"]) == 1


def test_verify_json_envelope(tmp_path, capsys):
    out = tmp_path / "out.json"
    assert main(["verify", str(write(tmp_path, "s.json", SHARP)), "--json", str(out)]) == 0
    env = json.loads(out.read_text())
    assert env["outcome"] == "accepted" and env["command"] == "verify"
    assert env["payload"]["ordering_counts"] == [2, 2] and len(env["digest"]) == 64


def test_generate_and_sharpen_flagship(tmp_path, capsys):
    inst = tmp_path / "flag.json"
    assert main(["generate", "twisted", "--p", "3", "--params", "0,1,0,1,1+i", "--out", str(inst)]) == 0
    out = tmp_path / "cert.json"
    assert main(["sharpen", str(inst), "--json", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["outcome"] == "accepted" and doc["payload"]["rho"] == 2
    assert doc["payload"]["sharpened"]["shape"] == [1, 1]
    assert "rebased n=2 shape=(1, 1) sharp=true" in capsys.readouterr().out


def test_generate_errors(tmp_path, capsys):
    assert main(["generate", "twisted", "--p", "3", "--params", "0,1,0,1,2"]) == 1
    assert "gamma not outside base field" in capsys.readouterr().err
    src = tmp_path / "k2.json"
    assert main(["generate", "split", "--p", "3", "--k", "2", "--d", "1", "--seed", "0", "--out", str(src)]) == 0
    assert main(["generate", "restrict", str(src)]) == 1
    assert "outside the base field" in capsys.readouterr().err


def test_generate_split_stdout_is_reproducible(capsys):
    main(["generate", "split", "--p", "7", "--d", "3", "--seed", "11"])
    a = capsys.readouterr().out
    main(["generate", "split", "--p", "7", "--d", "3", "--seed", "11"])
    assert capsys.readouterr().out == a and json.loads(a)["version"] == 1


def test_restrictable_split_round_trip(tmp_path, capsys):
    src, big = tmp_path / "seed.json", tmp_path / "big.json"
    assert main(["generate", "split", "--p", "5", "--k", "2", "--d", "2", "--seed", "3", "--restrictable",
                 "--out", str(src)]) == 0
    assert main(["generate", "restrict", str(src), "--out", str(big)]) == 0
    assert parse_instance(big).n == 6
    assert main(["verify", str(big)]) == 0
    assert "shape=(2, 2, 2) sharp=false" in capsys.readouterr().out


def test_oracle(tmp_path, capsys):
    flag = tmp_path / "f.json"
    main(["generate", "twisted", "--p", "3", "--params", "0,1,0,1,1+i", "--out", str(flag)])
    capsys.readouterr()
    assert main(["oracle", "subspaces", str(flag)]) == 0
    assert "no proper invariant subspace; agrees with Norton" in capsys.readouterr().out
    # GF(5) is outside the exhaustive bounds
    assert main(["oracle", "subspaces", str(write(tmp_path, "g5.json", SHARP))]) == 1
    small = {"version": 1, "field": {"kind": "prime", "p": 2, "k": 1}, "A": [[0, 1], [0, 0]], "Astar": [[0, 0], [1, 0]]}
    assert main(["oracle", "subspaces", str(write(tmp_path, "g2.json", small))]) == 0
    assert "no proper invariant subspace; agrees with Norton" in capsys.readouterr().out
    red = {"version": 1, "field": {"kind": "prime", "p": 2, "k": 1}, "A": [[1, 0], [0, 0]], "Astar": [[1, 1], [0, 0]]}
    assert main(["oracle", "subspaces", str(write(tmp_path, "r2.json", red))]) == 0
    assert "1 proper invariant subspace(s); agrees with Norton" in capsys.readouterr().out


def test_batch(tmp_path, capsys):
    d = tmp_path / "corpus"
    d.mkdir()
    write(d, "a.json", SHARP)
    write(d, "b.json", DIAG)
    out = tmp_path / "batch.json"
    assert main(["verify", str(d), "--batch", "--json", str(out)]) == 2
    docs = json.loads(out.read_text())
    assert [e["outcome"] for e in docs] == ["accepted", "rejected"]
    assert main(["verify", str(tmp_path / "nope"), "--batch"]) == 1


def test_python_dash_m(tmp_path):
    path = write(tmp_path, "s.json", SHARP)
    res = subprocess.run([sys.executable, "-m", "tdsharp", "verify", str(path)], capture_output=True, text=True)
    assert res.returncode == 0 and "sharp=true" in res.stdout


def test_inconclusive_exit_code(tmp_path, capsys, monkeypatch):
    flag = tmp_path / "f.json"
    main(["generate", "twisted", "--p", "3", "--params", "0,1,0,1,1+i", "--out", str(flag)])
    monkeypatch.setenv("TD_TRIAL_BUDGET", "0")
    assert main(["sharpen", str(flag)]) == 4
    assert ": inconclusive" in capsys.readouterr().out
