import json

import pytest

from gvn.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_kildall_text(capsys):
    code, out, _ = run(capsys, "analyze", "fig1.gvn", "--algo", "kildall", "--point", "p3")
    assert code == 0
    assert "[x+y, x+2, 1+y, 1+2]" in out


def test_analyze_json_schema(capsys):
    code, out, _ = run(capsys, "analyze", "fig1.gvn", "--algo", "sed-modified", "--point", "p3", "--json")
    (rep,) = json.loads(out)
    assert set(rep) == {"point", "algo", "classes", "nodes", "instrumentation"}
    assert set(rep["instrumentation"]) == {"intersect_calls", "bound_e_squared", "recursion_depth_max"}
    assert ["x+y", "x+2", "1+y", "1+2"] in rep["classes"]
    assert {"vars": [], "type": "+", "children": [3, 4]} in rep["nodes"]


def test_analyze_empty_program(tmp_path, capsys):
    f = tmp_path / "empty.gvn"
    f.write_text("")
    code, out, _ = run(capsys, "analyze", str(f), "--json")
    assert code == 0 and [r["point"] for r in json.loads(out)] == ["__entry"]


def test_available(capsys):
    code, out, _ = run(capsys, "available", "fig1.gvn", "--algo", "sed-modified", "--point", "p3",
                       "--expr", "x+y", "--json")
    ans = json.loads(out)
    assert code == 0 and ans["available"] and "1+2" in ans["witness"]
    _, out, _ = run(capsys, "available", "fig1.gvn", "--algo", "sed-original", "--point", "p3",
                    "--expr", "x+y", "--json")
    assert json.loads(out)["available"] is False


def test_diff(capsys):
    code, out, _ = run(capsys, "diff", "fig1.gvn", "--algos", "sed-original,sed-modified", "--point", "p3",
                       "--json", "--expect-equal")
    (rep,) = json.loads(out)
    assert code == 1
    assert rep["pairs_only_in_A"] == []
    assert {("x+y", "1+2"), ("x+y", "1+y"), ("x+y", "x+2")} <= {tuple(p) for p in rep["pairs_only_in_B"]}
    code, out, _ = run(capsys, "diff", "fig1.gvn", "--algos", "kildall,kildall", "--point", "p3",
                       "--expect-equal")
    assert code == 0


def test_dot(capsys):
    code, out, _ = run(capsys, "dot", "fig1.gvn", "--algo", "sed-modified", "--point", "p3")
    assert code == 0 and out.startswith("digraph")
    assert '"⟨ \\| +⟩"' in out and '"⟨x \\| 1⟩"' in out
    code, _, err = run(capsys, "dot", "fig1.gvn", "--algo", "kildall", "--point", "p3")
    assert code == 2 and "not a DAG-producing analysis" in err


def test_fuzz(capsys):
    code, out, _ = run(capsys, "fuzz", "--seed", "1", "--count", "5", "--stmts", "6", "--max-term-size", "2",
                       "--json")
    s = json.loads(out)
    assert code == 0 and s["violations"] == 0 and s["count"] == 5


@pytest.mark.parametrize("argv,msg", [
    (["analyze", "fig1.gvn", "--point", "nowhere"], "unknown program point"),
    (["available", "fig1.gvn", "--point", "p3", "--expr", "x+"], "error:"),
    (["analyze", "missing.gvn"], "error:"),
    (["fuzz", "--count", "0"], "--count"),
])
def test_errors_exit_2(capsys, argv, msg):
    code, _, err = run(capsys, *argv)
    assert code == 2 and msg in err
