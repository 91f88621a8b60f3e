import pytest

from conftest import facts, read
from asp_mustache.evaluator import NotStratified
from asp_mustache.interpretation import Interpretation
from asp_mustache.template import (
    NoConvergence,
    PersistQuery,
    Query,
    RenderDirectives,
    Reset,
    TemplateError,
    Text,
    expand,
    expand_stages,
    lower_fstring,
    lower_strings,
    query_program,
    render_projection,
    tokenize,
)
from asp_mustache.terms import Constant, Function, Number, String, make_tuple

GRAPH = Interpretation.parse("node(a). node(b). edge(a,b). size(3).")


def test_tokenize_kinds():
    segs = tokenize("a {{= X : p(X) }} b {{+ sort(2) }}{{* #show q. }}{{-}}{{ #show r. }}")
    kinds = [type(s) for s in segs]
    assert kinds == [Text, Query, Text, PersistQuery, PersistQuery, Reset, Query]
    assert segs[1].shortcut and segs[3].shortcut and not segs[4].shortcut
    assert "".join(s.source for s in segs).startswith("a {{= X")


def test_tokenize_nested_and_string_regions():
    template = 'x {{= {{f"${X} }} {{"}} : p(X) }} y'
    segs = tokenize(template)
    assert [type(s) for s in segs] == [Text, Query, Text]
    assert "".join(s.source for s in segs) == template


def test_tokenize_skips_asp_strings():
    segs = tokenize('{{ #show ("}}",) : p. }}')
    assert len(segs) == 1 and segs[0].program_text == ' #show ("}}",) : p. '


def test_tokenize_single_braces_inside_queries():
    segs = tokenize("{{= X : X = #count{Y : p(Y)} }}")
    assert len(segs) == 1


def test_triple_brace_keeps_first_brace_as_text():
    segs = tokenize("{{{= X : p(X) }}}")
    assert segs[0] == Text("{", 0)
    assert isinstance(segs[1], Query)
    assert segs[2].text == "}"


def test_unbalanced_opening_is_an_error():
    with pytest.raises(TemplateError) as info:
        tokenize("line\n  {{= X : p(X) ")
    assert (info.value.line, info.value.column) == (2, 3)


def test_stray_closing_braces_are_text():
    assert expand("a }} b", GRAPH) == "a }} b"


def test_lower_strings():
    assert lower_strings('show({{"say "hi"\n"}})') == 'show("say \\"hi\\"\\n")'
    assert lower_fstring("${X}-${C:%d}$$%") == '@string_format("%s-%d$%%", X, C)'
    assert lower_strings('{{f"id: ${X+1}"}}') == '@string_format("id: %s", X+1)'


def test_query_program_shortcut():
    assert query_program(Query(" X : p(X) ", True)).strip() == "#show X : p(X)."


def test_render_defaults_and_directives():
    objs = [make_tuple(Number(2), Constant("b")), make_tuple(Number(1), Constant("a"))]
    assert render_projection(objs, RenderDirectives()) == "1, a\n2, b"
    d = RenderDirectives(separator="; ", term_separator="-", prefix="<", suffix=">", sort_keys=[-1])
    assert render_projection(objs, d) == "<2-b>; <1-a>"


def test_show_renders_first_argument_only():
    objs = [Function("show", (String("x"), Number(2))), Function("show", (String("y"), Number(1)))]
    assert render_projection(objs, RenderDirectives(sort_keys=[2])) == "y\nx"


def test_sort_key_beyond_arity_is_tolerated():
    objs = [make_tuple(Constant("b")), make_tuple(Constant("a"))]
    assert render_projection(objs, RenderDirectives(sort_keys=[2])) == "a\nb"


def test_directives_from_atoms():
    d = RenderDirectives.from_atoms(
        [Function("separator", (String(",\n"),)), Function("sort", (Number(2),))],
        [Function("separator", (String("; "),))],
    )
    assert d.separator == "; " and d.sort_keys == [2]
    with pytest.raises(TemplateError, match="contradictory"):
        RenderDirectives.from_atoms([Function("prefix", (String("a"),)), Function("prefix", (String("b"),))])
    with pytest.raises(TemplateError, match="sort"):
        RenderDirectives.from_atoms([Function("sort", (Constant("x"),))])


def test_persistent_array_and_reset():
    template = '{{+ separator(" ") }}{{= X : node(X) }}|{{-}}{{= X : node(X) }}'
    assert expand(template, GRAPH) == "a b|a\nb"


def test_persistent_objects_are_prepended():
    template = '{{* #show (0, start). }}{{= (1, X) : node(X) }}'
    assert expand(template, GRAPH) == "0, start\n1, a\n1, b"


def test_empty_query_renders_nothing():
    assert expand("[{{= X : missing(X) }}]", GRAPH) == "[]"


def test_errors_are_positioned():
    with pytest.raises(TemplateError) as info:
        expand("ok\nx {{= X : p(X }}", GRAPH)
    assert info.value.line == 2


def test_query_without_answer_set_is_an_error():
    with pytest.raises(TemplateError, match="no answer set"):
        expand("{{ :- node(a). #show (1,). }}", GRAPH)


def test_choice_in_query_needs_solver():
    with pytest.raises(TemplateError) as info:
        expand(read("example4_full.tpl"), facts("graph.lp"))
    assert isinstance(info.value.__cause__, NotStratified)


def test_choice_in_query_with_solver(solver):
    assert expand(read("example4_full.tpl"), facts("graph.lp"), solver=solver) == (
        "Here is a 3-clique of the given graph:\n1, a\n2, b\n3, c"
    )


def test_multi_stage_counts_stages():
    template = '{{= {{f"{{= Y : node(Y), Y != ${X} }}"}} : node(X), X = a }}'
    stages = expand_stages(template, GRAPH, multi_stage=True)
    assert stages == ["{{= Y : node(Y), Y != a }}", "b"]


def test_single_stage_leaves_nested_expressions():
    template = '{{= {{f"{{= 1 : node(${X}) }}"}} : node(X), X = a }}'
    assert expand(template, GRAPH) == "{{= 1 : node(a) }}"


def test_no_convergence():
    # each stage re-creates an expression
    template = '{{= "{{= \\"{{= 1 : node(a) }}\\" : node(a) }}" : node(a) }}'
    with pytest.raises(NoConvergence):
        expand(template, GRAPH, multi_stage=True, max_stages=2)


def test_fixpoint_stops_when_output_repeats():
    # an expression that expands to itself cannot make progress
    template = '{{= "{{= X : X = 1, 1 > 2 }}x" : node(a) }}'
    assert expand_stages(template, GRAPH, multi_stage=True)[-1] == "x"


def test_real_values_render_bare():
    assert expand('{{= R : R = real("2.50") }}', GRAPH) == "2.50"
