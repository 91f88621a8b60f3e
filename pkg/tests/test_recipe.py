import random

import pytest

from conftest import DATA, facts, read
from asp_mustache.emitters import parse_embedded
from asp_mustache.interpretation import Interpretation, dump_blocks
from asp_mustache.recipe import (
    Recipe,
    RecipeError,
    b64decode,
    b64encode,
    decode_text,
    load_recipe,
    make_ingredient,
    parse_recipe,
    run,
)
from asp_mustache.solver import SolverNotConfigured
from asp_mustache.syntax import BASE64


def recipe(*steps, encode=False, decode=False):
    return Recipe(encode, decode, tuple(make_ingredient(op, params, i) for i, (op, params) in enumerate(steps)))


def test_base64_fixture():
    assert b64encode("hello") == "aGVsbG8="
    assert b64encode("x") == "eA=="
    assert b64encode("") == ""
    assert b64decode("aGVsbG8=") == "hello"
    with pytest.raises(ValueError):
        b64decode("not base64!")


def test_encode_flag_wraps_input():
    result = run(recipe(encode=True), "hello")
    assert result.interpretations == [Interpretation.parse(f'{BASE64}("aGVsbG8=").')]


def test_identity_recipe():
    result = run(recipe(), "p(1).")
    assert result.interpretations == [Interpretation.parse("p(1).")]
    assert result.output() == "p(1)."


def test_input_blocks():
    result = run(recipe(), "p(1).\n§\np(2).\nq.\n§\n")
    assert len(result.interpretations) == 3
    # atoms come out in the term order: constants before compounds
    assert result.output() == "p(1).\n§\nq.\np(2).\n§\n"


def test_decode_substitutes_payloads():
    assert decode_text(f'msg({BASE64}("aGVsbG8=")).') == "msg(hello)."
    assert decode_text(f'{BASE64}("aGVsbG8=").\nq.') == "hello\nq."
    # decoded text is not decoded again
    inner = f'{BASE64}("{b64encode("x")}")'
    assert decode_text(f'{BASE64}("{b64encode(inner)}").') == inner


def test_encode_decode_identity():
    rng = random.Random(3)
    alphabet = "ab §\n\"\\{}é😀\t.()"
    for _ in range(100):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        assert run(recipe(encode=True, decode=True), text).output() == text


def test_op_encode():
    result = run(recipe(("encode", {"predicate": "payload", "content": "x"})), "§\n")
    assert result.interpretations == [Interpretation.parse('payload("eA==").')] * 2
    result = run(recipe(("encode", {"predicate": "payload"})), "")
    assert result.interpretations == [Interpretation.parse('payload("").')]


def test_search_models_in_process():
    r = recipe(("search_models", {"program": "reach(X,Y) :- e(X,Y). reach(X,Z) :- reach(X,Y), e(Y,Z).", "n": 1}))
    (out,) = run(r, "e(1,2). e(2,3).").interpretations
    assert len(out.with_predicate("reach")) == 3


def test_search_models_unsat_drops_the_interpretation():
    r = recipe(("search_models", {"program": ":- p(1).", "n": 1}))
    assert run(r, "p(1).\n§\np(2).").interpretations == [Interpretation.parse("p(2).")]


def test_search_models_without_solver():
    r = recipe(("search_models", {"program": "{p}.", "n": 1}))
    with pytest.raises(SolverNotConfigured):
        run(r, "")


def test_search_models_with_solver(solver):
    r = recipe(("search_models", {"program": "{p; q}. #show p/0.", "n": 0}))
    out = run(r, "", solver).interpretations
    assert sorted(i.dump() for i in out) == ["", "", "p.", "p."]


def test_optimize(solver):
    program = read("clique_r1.lp") + read("clique_r2_r3.lp") + ":~ in(X), cost(X,C). [C@0, X]\n#show (C,) : C = #sum{W, X : in(X), cost(X,W)}."
    graph = read("graph.lp") + " cost(a,1). cost(b,2). cost(c,1). cost(d,1)."
    (out,) = run(recipe(("optimize", {"program": program, "n": 1})), graph, solver).interpretations
    assert out.dump() == "(4,)."


def test_loading_validates_parameters(tmp_path):
    with pytest.raises(RecipeError, match="unknown operation"):
        parse_recipe("{ ingredients: [ { operation: bake } ] }")
    with pytest.raises(RecipeError, match="missing parameter 'program'"):
        parse_recipe("{ ingredients: [ { operation: search_models } ] }")
    with pytest.raises(RecipeError, match="non-negative"):
        parse_recipe('{ ingredients: [ { operation: search_models, program: "p.", n: -1 } ] }')
    with pytest.raises(RecipeError, match="ingredient 1: program"):
        parse_recipe('{ ingredients: [ { operation: encode, predicate: p }, { operation: optimize, program: "p(" } ] }')
    with pytest.raises(RecipeError, match="predicate name"):
        parse_recipe('{ ingredients: [ { operation: chartjs, predicate: "Chart" } ] }')
    with pytest.raises(RecipeError, match="unknown parameter"):
        parse_recipe('{ ingredients: [ { operation: chartjs, predicate: c, extra: 1 } ] }')
    with pytest.raises(RecipeError, match="cannot read"):
        parse_recipe('{ ingredients: [ { operation: encode, predicate: p, content: "file:missing.txt" } ] }', tmp_path)


def test_example3_recipes_agree(solver):
    one = run(load_recipe(DATA / "clique_one_step.json"), read("graph.lp"), solver)
    three = run(load_recipe(DATA / "clique_three_steps.json"), read("graph.lp"), solver)
    assert one.interpretations == three.interpretations
    assert dump_blocks(one.interpretations) == "(1,a).\n(2,b).\n(3,c)."


def test_framework_side_outputs():
    result = run(load_recipe(DATA / "running_example.json"), read("clique_costs.lp"))
    names = [s.name for s in result.side_outputs]
    assert names == [
        "003-vis-network-0-0.json",
        "003-vis-network-0-0.html",
        "004-tabulator-0-0.json",
        "004-tabulator-0-0.html",
        "005-chartjs-0-0.json",
        "005-chartjs-0-0.html",
    ]
    chart = parse_embedded(result.side_outputs[5].text)
    assert [d["data"] for d in chart["data"]["datasets"]] == [[2, 2, 3, 1], [2, 2, 2, 1], [1, 2, 1, 1]]


def test_framework_passes_interpretations_through():
    base = read("clique_costs.lp")
    with_templates = recipe(
        ("encode", {"predicate": "chart", "content": read("chartjs.tpl")}),
    )
    before = run(with_templates, base).interpretations
    after = run(recipe(("encode", {"predicate": "chart", "content": read("chartjs.tpl")}),
                       ("chartjs", {"predicate": "chart"})), base).interpretations
    assert before == after


def test_framework_without_atoms_does_nothing():
    result = run(recipe(("chartjs", {"predicate": "chart"})), "p(1).")
    assert result.side_outputs == [] and result.interpretations == [Interpretation.parse("p(1).")]


def test_framework_errors_name_interpretation_and_atom():
    r = recipe(("encode", {"predicate": "chart", "content": "{ type: bar, data: {{= X : p(X) }} }"}),
               ("chartjs", {"predicate": "chart"}))
    with pytest.raises(RecipeError) as info:
        run(r, "q.\n§\np(1).")
    message = str(info.value)
    assert "ingredient 1" in message and "interpretation 0" in message and "chart(" in message


def test_framework_bad_payload():
    r = recipe(("chartjs", {"predicate": "chart"}))
    with pytest.raises(RecipeError, match="Base64"):
        run(r, 'chart("%%%").')


def test_side_outputs_are_deterministic():
    r = load_recipe(DATA / "running_example.json")
    a = run(r, read("clique_costs.lp")).side_outputs
    b = run(r, read("clique_costs.lp")).side_outputs
    assert a == b


def test_chained_projection_feeds_next_step():
    r = recipe(
        ("search_models", {"program": "#show (X, Y) : e(X, Y).", "n": 1}),
        ("search_models", {"program": "#show (Y,) : (X, Y).", "n": 1}),
    )
    (out,) = run(r, "e(1,2). e(3,4). f.").interpretations
    assert out.dump() == "(2,).\n(4,)."


def test_example4_interpretation_from_facts():
    assert len(facts("clique_costs.lp")) > 0
