import io as _io
import json
from pathlib import Path

import pytest

from iofair.cli import main, render_text

HERE = Path(__file__).parent
EXTRA = str(HERE / "data" / "extra.dsl")


def run(*argv):
    out = _io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


GOLDEN = [
    ("preorder_fair_sec6", ["preorder", "fair", "SEC6_A", "SEC6_B"], 0),
    ("check_must_pr_fig1_b", ["check", "must-pr", "--system", "FIG1_B", "--test", "FIG1_T",
                              "--regime", "lts"], 1),
    ("preorder_may_extra", ["preorder", "may", "tests/data/extra.dsl:WITH_C",
                            "tests/data/extra.dsl:WITHOUT_C"], 1),
    ("preorder_quiescent_sec6", ["preorder", "quiescent", "SEC6_A", "SEC6_B"], 0),
]


@pytest.mark.parametrize("name,argv,code", GOLDEN, ids=[g[0] for g in GOLDEN])
def test_golden(name, argv, code, monkeypatch):
    monkeypatch.chdir(HERE.parent)
    c1, text = run(*argv)
    c2, js = run(*argv, "--json")
    assert c1 == c2 == code
    assert text == (HERE / "golden" / (name + ".txt")).read_text()
    assert json.loads(js) == json.loads((HERE / "golden" / (name + ".json")).read_text())
    # plain output is a rendering of the JSON report
    assert render_text(json.loads(js)) == text


def test_fig1_must_progress_exit_codes():
    assert run("check", "must-pr", "--system", "FIG1_A", "--test", "FIG1_T", "--regime", "lts")[0] == 0
    code, out = run("check", "must-pr", "--system", "FIG1_B", "--test", "FIG1_T", "--json")
    assert code == 2
    rep = json.loads(out)
    assert rep["error"] == "inadmissible test" and rep["admissibility"]["regime"] == "complementary"


def test_witness_none():
    assert run("witness", "may", "FIG1_A", "FIG1_B") == (0, "none\n")


def test_witness_file_reverifies(tmp_path):
    code, text = run("witness", "may", EXTRA + ":WITH_C", EXTRA + ":WITHOUT_C")
    assert code == 1 and text.startswith("automaton T_may")
    test_file = tmp_path / "t.dsl"
    test_file.write_text(text)
    args = ["check", "may", "--test", str(test_file), "--regime", "strongly-compatible"]
    assert run(*args, "--system", EXTRA + ":WITH_C")[0] == 0
    assert run(*args, "--system", EXTRA + ":WITHOUT_C")[0] == 1


def test_fair_must_witness_reverifies(tmp_path):
    code, out = run("witness", "fair-must", EXTRA + ":WITHOUT_C", EXTRA + ":WITH_C", "--json")
    rep = json.loads(out)
    assert code == 1 and rep["verification"]["ok"]
    f = tmp_path / "t.dsl"
    f.write_text(rep["test"])
    assert run("check", "must-f", "--system", EXTRA + ":WITHOUT_C", "--test", str(f))[0] == 0
    assert run("check", "must-f", "--system", EXTRA + ":WITH_C", "--test", str(f))[0] == 1
    assert run("check", "must-f-ab", "--system", EXTRA + ":WITH_C", "--test", str(f))[0] == 1


def test_validate(tmp_path):
    assert run("validate", EXTRA)[0] == 0
    bad = tmp_path / "bad.dsl"
    bad.write_text("automaton X\n  inputs i\n  states s\n  start s\nend\n")
    code, out = run("validate", str(bad), "--json")
    assert code == 1 and "MissingInputEnabling" in out
    broken = tmp_path / "broken.dsl"
    broken.write_text("automaton X\n  trans s\nend\n")
    assert run("validate", str(broken))[0] == 2


def test_compose(tmp_path):
    out = tmp_path / "p.dsl"
    assert run("compose", "SEC6_TEST", "SEC6_B", "-o", str(out))[0] == 0
    text = out.read_text()
    assert "trans t0.s tau t0.s" in text
    assert run("validate", str(out))[0] == 0
    assert run("compose", "FIG1_T", "FIG1_A")[0] == 2
    code, text = run("compose", "FIG1_T", "FIG1_A", "--kind", "lts")
    assert code == 0 and "trans t1.p3 w t2.p3" in text


def test_preorder_options(monkeypatch):
    monkeypatch.setenv("IOFAIR_LASSO_BOUND", "3")
    code, out = run("preorder", "must-f", "SEC6_A", "SEC6_B", "--mode", "exact", "--json")
    assert code == 0 and json.loads(out)["completeness"] == "exact"
    assert run("preorder", "fair", "SEC6_A", "SEC6_B", "--lasso-bound", "2")[0] == 0
    assert run("preorder", "trace", "FIG1_A", "SEC6_A")[0] == 1


def test_harness_command():
    code, out = run("harness", "sec6", "--trials", "1", "--json")
    assert code == 0 and json.loads(out)["ok"]


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["check", "may", "--system", "FIG1_A"], ["preorder", "fair", "NOPE", "FIG1_A"],
    ["preorder", "fair", "tests/data/extra.dsl", "FIG1_A"],
])
def test_usage_errors(argv, capsys, monkeypatch):
    monkeypatch.chdir(HERE.parent)
    assert run(*argv)[0] == 2
