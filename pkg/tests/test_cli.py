import subprocess
import sys

import pytest

from conftest import DATA, solver_command
from asp_mustache.cli import main
from asp_mustache.emitters import parse_embedded
from asp_mustache.relaxed_json import parse_relaxed


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def no_solver_env(monkeypatch):
    monkeypatch.delenv("ASP_MUSTACHE_SOLVER", raising=False)


def test_render_example5(capsys):
    code, out, err = cli(capsys, "render", DATA / "clique_costs.lp", DATA / "example5.tpl")
    assert (code, out, err) == (0, "Here is a 3-clique of the given graph: (1) a; (2) b; (3) c.", "")


def test_render_to_file(capsys, tmp_path):
    target = tmp_path / "out.txt"
    code, out, _ = cli(capsys, "render", DATA / "clique_costs.lp", DATA / "example6.tpl", "-o", target)
    assert code == 0 and out == ""
    assert target.read_text() == "The cost is 4 = 1 + 2 + 1."


def test_render_multi_stage(capsys):
    code, out, _ = cli(capsys, "render", DATA / "clique_costs.lp", DATA / "example9.tpl", "--multi-stage")
    assert code == 0 and "{{" not in out
    nodes = parse_relaxed("{" + out + "}")["nodes"]
    assert [n["group"] for n in nodes] == ["in", "in", "in", "out"]


def test_render_missing_file(capsys):
    code, out, err = cli(capsys, "render", "missing.lp", DATA / "example5.tpl")
    assert code == 2 and out == "" and "missing.lp" in err


def test_render_template_error_is_positioned(capsys, tmp_path):
    bad = tmp_path / "bad.tpl"
    bad.write_text("line\n{{= X : p(X }}")
    code, out, err = cli(capsys, "render", DATA / "graph.lp", bad)
    assert code == 1 and out == "" and "bad.tpl:2:1:" in err


def test_facts_file_must_hold_facts(capsys, tmp_path):
    rules = tmp_path / "rules.lp"
    rules.write_text("p(1). q(X) :- p(X).")
    code, _, err = cli(capsys, "render", rules, DATA / "example5.tpl")
    assert code == 1 and "not a fact" in err


def test_render_needing_solver(capsys, no_solver_env):
    code, out, err = cli(capsys, "render", DATA / "graph.lp", DATA / "example4_full.tpl")
    assert code == 3 and out == ""


def test_json(capsys, tmp_path):
    src = tmp_path / "c.json"
    src.write_text("{ data: [1,2,], /*c*/ }")
    assert cli(capsys, "json", "--relaxed", src) == (0, '{"data":[1,2]}\n', "")
    code, _, err = cli(capsys, "json", src)
    assert code == 1 and err
    src.write_text("{a: 1, a: 2}")
    code, out, err = cli(capsys, "json", "--relaxed", src)
    assert code == 1 and out == "" and "duplicate" in err


def test_solve_stratified(capsys, tmp_path):
    prog = tmp_path / "closure.lp"
    prog.write_text("r(X,Y) :- e(X,Y). r(X,Z) :- r(X,Y), e(Y,Z). e(1,2). e(2,3). #show r/2.")
    assert cli(capsys, "solve", prog) == (0, "r(1,2).\nr(1,3).\nr(2,3).\n", "")


def test_solve_unsat(capsys, tmp_path):
    prog = tmp_path / "unsat.lp"
    prog.write_text("a. :- a.")
    assert cli(capsys, "solve", prog) == (10, "", "")


def test_solve_needs_solver(capsys, no_solver_env):
    code, out, err = cli(capsys, "solve", DATA / "clique.lp", DATA / "graph.lp")
    assert code == 3 and out == "" and "--solver" in err


def test_solve_with_solver(capsys):
    command = solver_command()
    if command is None:
        pytest.skip("no clingo available")
    code, out, _ = cli(capsys, "solve", DATA / "clique.lp", DATA / "graph.lp", "--solver", command)
    assert (code, out) == (0, "(1,a).\n(2,b).\n(3,c).\n")
    code, out, _ = cli(capsys, "solve", DATA / "clique_r2_r3.lp", DATA / "graph.lp", "-n", "0", "--solver", command)
    # without the symmetric closure only {a,b,c} has all its edges in order
    assert code == 0 and "§" not in out
    assert "in(a).\nin(b).\nin(c)." in out and "in(d)" not in out


def test_run_running_example(capsys, tmp_path):
    out_dir = tmp_path / "side"
    code, out, err = cli(capsys, "run", DATA / "running_example.json", DATA / "clique_costs.lp", "--out-dir", out_dir)
    assert code == 0 and err == ""
    names = sorted(p.name for p in out_dir.iterdir())
    assert len([n for n in names if n.endswith(".json")]) == 3
    assert len([n for n in names if n.endswith(".html")]) == 3
    table = parse_embedded((out_dir / "004-tabulator-0-0.html").read_text())
    assert [row["in"] for row in table["data"]] == [True, True, True, False]
    assert "in(a)." in out


def test_run_identity_echoes_input(capsys, tmp_path):
    recipe = tmp_path / "id.json"
    recipe.write_text("{ encode: true, decode: true }")
    text = tmp_path / "in.txt"
    text.write_text("any text\nat all")
    assert cli(capsys, "run", recipe, text) == (0, "any text\nat all", "")


def test_run_needs_solver(capsys, no_solver_env):
    code, out, err = cli(capsys, "run", DATA / "clique_one_step.json", DATA / "graph.lp")
    assert code == 3 and out == "" and "solver" in err


def test_run_bad_recipe(capsys, tmp_path):
    recipe = tmp_path / "bad.json"
    recipe.write_text("{ ingredients: [ { operation: bake } ] }")
    code, _, err = cli(capsys, "run", recipe, DATA / "graph.lp")
    assert code == 1 and "bake" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["render", "a", "b", "--max-stages", "0"])
    assert info.value.code == 2


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "10  unsatisfiable" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "asp_mustache", "render", DATA / "clique_costs.lp", DATA / "example6.tpl"],
        capture_output=True,
        text=True,
    )
    assert (proc.returncode, proc.stdout) == (0, "The cost is 4 = 1 + 2 + 1.")
