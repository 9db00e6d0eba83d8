import json

import pytest

from vanest_jets.cli import main

HEIS = {"schema": 1, "name": "heisenberg", "dim": 3,
        "brackets": [{"i": 1, "j": 2, "terms": [{"k": 3, "coeff": "1"}]}]}
BROKEN = {"schema": 1, "name": "broken", "dim": 3, "brackets": [
    {"i": 1, "j": 2, "terms": [{"k": 1, "coeff": "1"}]},
    {"i": 2, "j": 3, "terms": [{"k": 2, "coeff": "1"}]},
    {"i": 3, "j": 1, "terms": [{"k": 3, "coeff": "1"}, {"k": 1, "coeff": "1"}]}]}


def _file(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_jacobi_passes_from_file(tmp_path, capsys):
    code, out, _ = run(capsys, "check", "jacobi", "--algebra", _file(tmp_path, "h.json", HEIS))
    assert code == 0 and out.strip().endswith("PASS")


def test_broken_table_fails_with_witness(tmp_path, capsys):
    code, out, _ = run(capsys, "check", "jacobi", "--algebra", _file(tmp_path, "b.json", BROKEN))
    assert code == 1
    assert "(1, 2, 3)" in out and "d_CE^2(e1) != 0" in out


def test_cohomology(capsys):
    assert run(capsys, "compute", "cohomology", "--algebra", "sl2")[1].strip() == "1 0 0 1"
    assert run(capsys, "compute", "cohomology", "--algebra", "heisenberg")[1].strip() == "1 2 2 1"


def test_ve_of_cochains(tmp_path, capsys):
    as_doc = {"schema": 1, "algebra": "pair:1", "level": 1, "form_degree": 0, "expr": "u0_1*u1_1"}
    code, out, _ = run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "as.json", as_doc))
    assert code == 0 and out.strip() == "-x1 dx1"
    const = {"schema": 1, "algebra": "sl2", "level": 0, "form_degree": 0, "expr": "5"}
    assert run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "c.json", const))[1].strip() == "5"
    ab = {"schema": 1, "algebra": "abelian2", "level": 2, "form_degree": 0, "expr": "g1_1*g2_2"}
    for route in ("zigzag", "dproduct", "explicit"):
        doc = dict(ab, route=route)
        assert run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "a.json", doc))[1].strip() == "e1^e2"


def test_bad_inputs_exit_2(tmp_path, capsys):
    bad = {"schema": 1, "algebra": "sl2", "level": 0, "expr": "5", "colour": "red"}
    assert run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "bad.json", bad))[0] == 2
    assert run(capsys, "check", "jacobi", "--algebra", "so3x")[0] == 2
    wrong = {"schema": 1, "algebra": "sl2", "level": 1, "form_degree": 0, "expr": "dg1_1"}
    assert run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "w.json", wrong))[0] == 2
    low = {"schema": 1, "algebra": "sl2", "level": 2, "form_degree": 0, "expr": "g1_1*g2_2", "order": 1}
    assert run(capsys, "compute", "ve", "--cochain", _file(tmp_path, "low.json", low))[0] == 2
    assert run(capsys, "compute", "weil-op", "--algebra", "heisenberg", "--element", "eb3")[0] == 2


def test_weil_ops_and_reverse(capsys):
    args = ("compute", "weil-op", "--algebra", "heisenberg", "--element", "eb3")
    assert run(capsys, *args, "--op", "U")[1].strip() == "eb3 - e1^e2"
    assert run(capsys, *args, "--op", "iCE:2")[1].strip() == "e1"
    assert run(capsys, *args, "--op", "dK")[1].strip() == "0"
    code, out, _ = run(capsys, "compute", "reverse", "--algebra", "heisenberg", "--element", "e3")
    assert code == 0 and out.strip() == "g1_3"


def test_json_output(capsys):
    code, out, _ = run(capsys, "check", "cartan", "--algebra", "heisenberg", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["ok"]
    assert all(c["pass"] for c in doc["checks"])


@pytest.mark.parametrize("target", ["routes", "hpl", "homotopy", "multiplicativity"])
def test_check_targets_are_deterministic(capsys, target):
    argv = ["check", target, "--algebra", "abelian2", "--seed", "4", "--count", "4", "--pmax", "2"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0, first[1]
    assert first == second
