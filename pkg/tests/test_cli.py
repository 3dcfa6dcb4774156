import json
import subprocess
import sys
from pathlib import Path

import pytest

from drgfeas.arrays import parse_array
from drgfeas.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_feasible(capsys):
    code, out, _ = run(capsys, "check", "12,6,2;1,4,9")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "feasible" and rep["multiplicities"] == [1, 6, 14, 14]


def test_check_infeasible_with_witness(capsys):
    code, out, _ = run(capsys, "check", "10,5,4;1,5,8")
    assert code == 1
    rep = json.loads(out)
    integ = next(c for c in rep["checks"] if c["name"] == "integrality")
    assert integ["witness"] == "p^3_22 = -8/5"


def test_check_parse_errors(capsys):
    code, _, err = run(capsys, "check", "12,6;1,4,9")
    assert code == 2 and "error" in err
    code, _, err = run(capsys, "check", "12,6,x;1,4,9")
    assert code == 2 and "5" in err  # position of the bad token


def test_check_filter_flags(capsys):
    # Taylor-like array failing only the multiplicity condition and lemma12
    code, out, _ = run(capsys, "check", "6,3,1;1,3,6", "--disable", "lemma12")
    assert code == 1
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert "lemma12" not in names
    code, out, _ = run(capsys, "check", "5,2,1;1,2,5", "--core-only")
    assert code == 0 and len(json.loads(out)["checks"]) == 4
    code, _, err = run(capsys, "check", "5,2,1;1,2,5", "--disable", "nonsense")
    assert code == 2 and "nonsense" in err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "5,2,1;1,2,5", "--frobnicate"])
    assert exc.value.code == 2


def test_reproduce_s1(capsys):
    code, out, _ = run(capsys, "reproduce", "s1")
    summary = json.loads(out)
    assert code == 0 and summary["survivors"] == [] and summary["match"]


def test_reproduce_s2_small_range(capsys, tmp_path):
    path = tmp_path / "s2.jsonl"
    code, out, _ = run(capsys, "reproduce", "s2", "--kmax", "30", "--out", str(path))
    summary = json.loads(out)
    assert code == 0 and summary["survivors"] == ["12,6,2;1,4,9", "21,10,3;1,6,15"]
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    assert [x["array"] for x in lines] == summary["survivors"]
    assert path.with_suffix(".summary.json").exists()


def test_reproduce_mismatch_exit_code(capsys):
    # with the monotonicity filter off, non-monotone arrays such as 10,4,5;1,2,2 survive
    code, out, _ = run(capsys, "reproduce", "s2", "--kmax", "30", "--core-only")
    summary = json.loads(out)
    assert code == 1 and not summary["match"]
    assert "10,4,5;1,2,2" in summary["survivors"]


def test_reproduce_conjecture_a(capsys):
    code, out, _ = run(capsys, "reproduce", "conjecture-a", "--kmax", "40")
    res = json.loads(out)
    assert code == 0 and res["violations"] == [] and res["checked_count"] > 0


def test_reproduce_theorem6(capsys):
    code, out, _ = run(capsys, "reproduce", "theorem6", "--epsilon", "1/2", "--kmax", "80")
    res = json.loads(out)
    assert code == 0 and res["vacuous"] and res["kappa"] == "12879"


def test_graph_certify(capsys, tmp_path):
    path = tmp_path / "j73.edges"
    code, out, _ = run(capsys, "graph", "johnson", "7", "3", "--certify", "--out", str(path))
    res = json.loads(out)
    assert code == 0 and res["certification"]["array"] == "12,6,2;1,4,9"
    assert res["spectrum"]["multiplicities"] == [1, 6, 14, 14]
    code, out, _ = run(capsys, "certify", "--input", str(path))
    assert code == 0 and json.loads(out)["certification"]["array"] == "12,6,2;1,4,9"


def test_graph_errors(capsys):
    assert run(capsys, "graph", "johnson", "7")[0] == 2
    assert run(capsys, "graph", "nope")[0] == 2


def test_certify_petersen_file(capsys):
    code, out, _ = run(capsys, "certify", "--input", str(DATA / "petersen.edges"))
    assert code == 0 and json.loads(out)["certification"]["array"] == "3,2;1,1"


def test_certify_bad_inputs(capsys, tmp_path):
    assert run(capsys, "certify", "--input", str(tmp_path / "missing.edges"))[0] == 2
    bad = tmp_path / "bad.edges"
    bad.write_text("0 1\n1 x\n")
    code, _, err = run(capsys, "certify", "--input", str(bad))
    assert code == 2 and "line 2" in err
    path4 = tmp_path / "p4.edges"
    path4.write_text("0 1\n1 2\n2 3\n")
    code, out, _ = run(capsys, "certify", "--input", str(path4))
    assert code == 1 and json.loads(out)["certification"]["status"] == "not-drg"


def test_enumerate_streams_jsonl(capsys):
    code, out, _ = run(capsys, "enumerate", "--D", "3", "--kmax", "6")
    assert code == 0
    arrays = [json.loads(line)["array"] for line in out.splitlines()]
    assert "5,2,1;1,2,5" in arrays
    # every printed array re-parses and re-checks to the same object
    for text in arrays:
        assert str(parse_array(text)) == text
        assert run(capsys, "check", text)[0] == 0


def test_enumerate_with_constraint_and_out(capsys, tmp_path):
    path = tmp_path / "e.jsonl"
    code, out, _ = run(
        capsys, "enumerate", "--D", "3", "--kmax", "30", "--constraint", "a1 >= k/2 - 1", "--constraint", "c2 >= 2",
        "--constraint", "6*c2 > k", "--constraint", "a3 != 0", "--out", str(path),
    )
    assert code == 0
    assert json.loads(out)["survivors"] == ["12,6,2;1,4,9", "21,10,3;1,6,15"]
    assert run(capsys, "enumerate", "--D", "3", "--kmax", "5", "--constraint", "k >")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "drgfeas.cli", "check", "5,2,1;1,2,5"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "feasible"
