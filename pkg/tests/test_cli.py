import json

import pytest

from helpers import CLI_RUNS, run_process
from protocomplex.adversary import synchronous_broadcast_model
from protocomplex.cli import main
from protocomplex.cset import find_isomorphism
from protocomplex.inputs import load_input
from protocomplex.protocol import ProtocolFunctor
from protocomplex.serialize import cset_from_json

def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_glued_sync(capsys):
    code, out, _ = run(CLI_RUNS["build"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["facets"] == 19


def test_build_dot(capsys):
    code, out, _ = run(CLI_RUNS["build-dot"], capsys)
    assert code == 0 and out.count("shape=triangle") == 13


def test_iterate_sizes(capsys):
    code, out, _ = run(CLI_RUNS["iterate"], capsys)
    doc = json.loads(out)
    assert doc["facets"] == [1, 3, 9] and doc["provenance"] == ["q", "F^1(q)"]
    assert doc["agreement_with_canonical"][0] == "1"


def test_iterate_outdir(tmp_path, capsys):
    code, out, _ = run(CLI_RUNS["iterate"] + ["--outdir", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["projections.json", "round_0.json", "round_1.json", "round_2.json"]
    rows = json.loads((tmp_path / "projections.json").read_text())["rows"]
    assert {r[0] for r in rows} == {1, 2}


def test_check_formula(capsys):
    code, out, _ = run(CLI_RUNS["check"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["false"] == 0


def test_check_false_formula_exit(capsys):
    code, out, _ = run(["check", "--input", "binary:a,b", "--formula", "in0@a", "--round", "0"], capsys)
    assert code == 4
    assert any(r["verdict"] == "false" and r["trace"] for r in json.loads(out)["results"])


def test_check_axioms(capsys):
    code, out, _ = run(CLI_RUNS["check-axioms"], capsys)
    doc = json.loads(out)
    assert code == 0 and all(v["false"] == 0 for v in doc["axioms"].values())


def test_check_facets_mode(capsys):
    argv = ["check", "--input", "binary:a,b", "--worlds", "facets", "--formula", "alive(a,b)", "--round", "1"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and json.loads(out)["summary"]["true"] > 0


def test_solve_exit_codes(capsys):
    code, out, _ = run(CLI_RUNS["solve"], capsys)
    assert code == 5 and json.loads(out)["solvable"] is False
    code, out, _ = run(CLI_RUNS["solve-trivial"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verified"] and "task_json" in doc


def test_solve_task_file(tmp_path, capsys):
    code, out, _ = run(CLI_RUNS["solve-trivial"], capsys)
    path = tmp_path / "task.json"
    path.write_text(json.dumps(json.loads(out)["task_json"]))
    code, out, _ = run(["solve", "--task", str(path), "--rounds", "0"], capsys)
    assert code == 0


def test_betti(capsys):
    code, out, _ = run(CLI_RUNS["betti"], capsys)
    assert code == 0 and json.loads(out)["betti"] == [1, 0, 0]


def test_stats(capsys):
    code, out, _ = run(CLI_RUNS["stats"], capsys)
    rounds = json.loads(out)["rounds"]
    assert [r["simplices"] for r in rounds] == [8, 23, 50]


def test_averaging_values(capsys):
    code, out, _ = run(CLI_RUNS["averaging"], capsys)
    values = json.loads(out)["round_complexes"][1]["values"]
    assert {v for vals in values.values() for v in vals.values()} == {"0", "1/2", "1"}


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--formula", "K[a"],
        ["check"],
        ["build", "--adversary", "nope"],
        ["build", "--input", "nonsense"],
        ["iterate", "--rounds", "-1"],
        ["iterate", "--protocol", "averaging", "--input", "simplex:a,b"],
        ["iterate", "--protocol", "averaging", "--values", "a=0,b=1", "--alpha", "x", "--input", "simplex:a,b"],
        ["solve", "--task", "missing.json"],
        ["check", "--formula", "p", "--round", "3", "--horizon", "1"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_budget(capsys, monkeypatch):
    code, _, err = run(["iterate", "--rounds", "3", "--budget", "1000"], capsys)
    assert code == 3 and "budget" in err
    monkeypatch.setenv("PROTOCOMPLEX_BUDGET", "10")
    code, _, _ = run(["build"], capsys)
    assert code == 3
    monkeypatch.setenv("PROTOCOMPLEX_BUDGET", "ten")
    code, _, _ = run(["build"], capsys)
    assert code == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(CLI_RUNS["betti"] + ["-o", str(target)], capsys)
    assert code == 0 and out == "" and json.loads(target.read_text())["betti"] == [1, 0, 0]


def test_adversary_file(tmp_path, capsys):
    path = tmp_path / "adv.json"
    path.write_text(json.dumps({"kind": "sync_broadcast", "params": {"detectable": True}}))
    code, out, _ = run(["stats", "--adversary", str(path), "--rounds", "1"], capsys)
    assert code == 0


@pytest.mark.parametrize("name", ["build", "iterate", "check", "solve", "betti", "stats"])
def test_deterministic_across_processes(name):
    a = run_process(CLI_RUNS[name], 1)
    b = run_process(CLI_RUNS[name], 12345)
    assert a == b and a[1]


def test_stats_glued_sync(capsys):
    argv = ["stats", "--input", "glued2:a,b,c@b,c", "--adversary", "sync_broadcast", "--rounds", "1"]
    code, out, _ = run(argv, capsys)
    assert code == 0 and json.loads(out)["rounds"][1]["facets"] == 19


def test_ne_instance_everywhere(capsys):
    argv = ["check", "--input", "simplex:a,b", "--formula", "alive(a)|alive(b)", "--round", "1"]
    code, out, _ = run(argv, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["false"] == 0 and doc["summary"]["unknown"] == 0


def test_emitted_json_reparses(capsys):
    code, out, _ = run(CLI_RUNS["build"], capsys)
    y, _ = cset_from_json(json.loads(out)["complex"])
    x = load_input("glued2:a,b,c@b,c").cset
    direct = ProtocolFunctor(synchronous_broadcast_model(x.agents)).extend(x).complex
    assert find_isomorphism(y, direct, preserve_payload=True) is not None
