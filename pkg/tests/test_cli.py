import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from pcalab.cli import main

SCHEMA = json.loads(resources.files("pcalab").joinpath("schemas/output.schema.json").read_text())


def run_cli(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def doc_of(capsys, *argv, status=0):
    code, out, err = run_cli(capsys, *argv)
    assert code == status, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert out.count("\n") == 1  # exactly one JSON document
    return doc


def test_eval_k_law(capsys):
    doc = doc_of(capsys, "eval", "(app (app (const k) (const a)) (const b))",
                 "--let", "a=5", "--let", "b=(app (const k) (const i))", "--fuel", "1000")
    assert doc["result"] == {"outcome": "defined", "value": 5}


def test_eval_reports_divergence_and_exhaustion(capsys):
    doc = doc_of(capsys, "eval", "(app (const h) (const k))")
    assert doc["result"]["outcome"] == "divergent"
    omega = "(app (lam x (app (var x) (var x))) (lam x (app (var x) (var x))))"
    doc = doc_of(capsys, "eval", omega, "--fuel", "2000")
    assert doc["result"] == {"outcome": "exhausted", "spent": 2000}


def test_fuel_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("PCALAB_FUEL", "77")
    doc = doc_of(capsys, "eval", "(const k)")
    assert doc["fuel"] == 77
    monkeypatch.setenv("PCALAB_FUEL", "lots")
    status, out, err = run_cli(capsys, "eval", "(const k)")
    assert status == 2 and out == "" and "PCALAB_FUEL" in err


def test_usage_errors_write_nothing_to_stdout(capsys):
    for argv in (["eval", "(app (const k) (const nope))"], ["eval", "(app"],
                 ["eval", "(const k)", "--model", "k9"], ["k1", "run"],
                 ["refute", "halting", "--candidate", "nobody"]):
        status, out, err = run_cli(capsys, *argv)
        assert status == 2 and out == "", argv
        assert err.startswith("pcalab: error")
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    assert capsys.readouterr().out == ""


def test_file_references(capsys, tmp_path):
    term = tmp_path / "t.sexp"
    term.write_text("(app (const i) (const 9))")
    doc = doc_of(capsys, "eval", f"@{term}")
    assert doc["result"]["value"] == 9
    table = tmp_path / "one.tbl"
    table.write_text("k=0 s=0\n0\n")
    doc = doc_of(capsys, "eval", "(app (const k) (const s))", "--model", f"table:{table}")
    assert doc["result"]["value"] == 0


def test_eval_in_k2(capsys):
    doc = doc_of(capsys, "eval", "(app (const alpha-hat) (const zeros))", "--model", "k2")
    assert doc["result"]["outcome"] == "defined"


def test_eval_with_oracle_model(capsys, tmp_path):
    spec = tmp_path / "f.json"
    spec.write_text(json.dumps({"table": {"3": 4}, "default": 0}))
    doc = doc_of(capsys, "eval", "(app (const i) (const k))", "--model", f"oracle:{spec}")
    assert doc["result"] == {"outcome": "divergent", "reason": "invalid-reply"}


def test_compile(capsys):
    doc = doc_of(capsys, "compile", "(lam x (lam y (app (var y) (var x))))", "--model", "k1")
    assert doc["combinators"] == "s(k(si))(s(kk)i)"
    assert doc["k1"]["outcome"] == "defined"


def test_k1_run(capsys):
    doc = doc_of(capsys, "k1", "run", "--program", "(succ (succ input))", "--input", "4")
    assert doc["result"]["value"] == 6 and doc["fuel_spent"] == 6


def test_k2_apply(capsys):
    doc = doc_of(capsys, "k2", "apply", "alpha-hat", '{"head": [0, 1]}', "--coords", "4")
    assert doc["result"]["outcome"] == "divergent" and doc["result"]["queried"] == 2


def test_oracle_run(capsys):
    doc = doc_of(capsys, "oracle", "run", "--oracle", '{"table": {"5": 9}}',
                 "--plan", '{"rounds": [{"ask": "input"}, {"return": {"answer": 0}}]}',
                 "--input", "5")
    assert doc["result"]["value"] == 9 and doc["replay_problems"] == []


@pytest.mark.parametrize("kind", ["halting", "separator", "extension", "continuous"])
def test_refute_families(capsys, kind):
    doc = doc_of(capsys, "refute", kind)
    assert all(w["replayed"] for w in doc["witnesses"])
    assert len(doc["witnesses"]) == 5


def test_refute_precomplete(capsys):
    doc = doc_of(capsys, "refute", "precomplete")
    assert doc["witness"]["kind"] == "precomplete-1-1"
    doc = doc_of(capsys, "refute", "precomplete", "--kernel", "same-pc-function", status=1)
    assert doc["result"]["outcome"] == "precondition"


def test_invalid_candidate_exits_one(capsys):
    doc = doc_of(capsys, "refute", "separator", "--term", "(const h)", status=1)
    assert doc["witness"]["kind"] == "invalid-candidate"


def test_refute_trace_file(capsys, tmp_path):
    out = tmp_path / "w.jsonl"
    doc_of(capsys, "refute", "halting", "--candidate", "const-true", "--trace", str(out))
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert [x["label"] for x in lines] == ["f ⟨g,g⟩", "g g"]


def test_friedberg_verbs(capsys, tmp_path):
    trace, snap = tmp_path / "t.jsonl", tmp_path / "s.json"
    doc = doc_of(capsys, "friedberg", "run", "--stages", "300", "--trace", str(trace),
                 "--snapshot", str(snap))
    assert doc["invariants_ok"]
    assert len(trace.read_text().splitlines()) == 300
    doc = doc_of(capsys, "friedberg", "check", str(snap))
    assert doc["result"]["ok"]
    broken = json.loads(snap.read_text())
    broken["used"].append(broken["used"][0])
    snap.write_text(json.dumps(broken))
    doc = doc_of(capsys, "friedberg", "check", str(snap), "--shallow", status=1)
    assert not doc["result"]["ok"]


def test_friedberg_find_k_and_refute_s(capsys):
    doc = doc_of(capsys, "friedberg", "find-k", "--stages", "1500", "--samples", "10")
    assert doc["result"]["verified"]
    doc = doc_of(capsys, "friedberg", "refute-s", "--code", "7", "--budget", "1500")
    assert doc["witness"]["kind"] == "s-candidate"
    doc = doc_of(capsys, "friedberg", "find-k", "--stages", "5", status=1)


def test_search_finite_pca(capsys):
    assert doc_of(capsys, "search-finite-pca", "--size", "1")["result"]["structures"] == ["k=0 s=0\n0\n"]
    assert doc_of(capsys, "search-finite-pca", "--size", "2")["result"]["structures"] == []
    assert run_cli(capsys, "search-finite-pca", "--size", "4")[0] == 2


def test_identical_config_gives_identical_bytes(capsys):
    argv = ["refute", "extension", "--fuel", "50000"]
    first = run_cli(capsys, *argv)[1]
    second = run_cli(capsys, *argv)[1]
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pcalab", "k1", "run", "--code", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["outcome"] == "divergent"
