import pytest

from asp_mustache.syntax import (
    SHOW_TUPLE,
    Aggregate,
    AspSyntaxError,
    Atom,
    ChoiceRule,
    SafetyError,
    ShowDirective,
    ShowSignature,
    WeakConstraint,
    parse_facts,
    parse_program,
    print_program,
)
from asp_mustache.terms import Constant, Function, Number, make_tuple

CLIQUE = """
edge(X,Y) :- edge(Y,X).
{in(N) : node(N)} = K :- size(K).
:- in(X), in(Y), X < Y, not edge(X,Y).
#show (Index+1, N) : in(N), size(K), Index = #count{N': in(N'), N > N'}.
"""


def test_clique_program_statements():
    p = parse_program(CLIQUE)
    rule, choice, constraint, show = p.statements
    assert rule.kind == "normal"
    assert isinstance(choice, ChoiceRule) and choice.right == ("=", p.statements[1].right[1])
    assert constraint.kind == "constraint"
    assert isinstance(show, ShowDirective)
    assert isinstance(show.body[2].body, Aggregate)
    assert p.has_show


def test_tuple_fact_becomes_show_atom():
    (fact,) = parse_program("(1, a).").statements
    assert fact.head == Atom(SHOW_TUPLE, (Number(1), Constant("a")))


def test_bare_shown_term_is_a_one_tuple():
    (show,) = parse_program("#show K : size(K).").statements
    assert show.term == make_tuple(show.term.args[0])
    (show,) = parse_program('#show show(1, a) : p.').statements
    assert show.term == Function("show", (Number(1), Constant("a")))


def test_show_forms():
    a, b = parse_program("#show. #show p/2.").statements
    assert a == ShowDirective(None)
    assert b == ShowSignature("p", 2)


def test_weak_constraint():
    (w,) = parse_program(":~ in(X), cost(X,C). [C@1, X]").statements
    assert isinstance(w, WeakConstraint)
    assert w.weight.name == "C" and w.level == Number(1) and len(w.terms) == 1


def test_comments_are_ignored():
    p = parse_program("% comment\np(1). % trailing\n")
    assert len(p.statements) == 1


@pytest.mark.parametrize(
    "text, message",
    [
        ("p(1..3).", "interval"),
        ("p(1;2).", "pool"),
        ("-p(1).", "classical"),
        ("p :- -q.", "classical"),
        ("p ; q.", "disjunct"),
        ("p :- not not q.", "double"),
        ("p :- q(X), not X < 2.", "negated comparison"),
        ("p :- q(X,.", ""),
        ("#const n = 3.", "directive"),
    ],
)
def test_rejects_unsupported_syntax(text, message):
    with pytest.raises(AspSyntaxError) as info:
        parse_program(text)
    assert message in str(info.value).lower()


def test_syntax_errors_carry_positions():
    with pytest.raises(AspSyntaxError) as info:
        parse_program("p(1).\nq(X) :- r(X) s.")
    assert info.value.line == 2
    assert info.value.column > 1


@pytest.mark.parametrize(
    "text",
    [
        "p(X) :- q(Y).",
        "p :- not q(X).",
        "p(X) :- X = Y + 1.",
        ":- X < 3.",
        "#show X : p.",
        "p(X) :- #count{Y : q(Y)} = 2.",
    ],
)
def test_unsafe_variables_are_rejected(text):
    with pytest.raises(SafetyError):
        parse_program(text)


@pytest.mark.parametrize(
    "text",
    [
        "p(X) :- q(X), not r(X).",
        "p(Y) :- q(X), Y = X + 1.",
        "p(N) :- N = #count{X : q(X)}.",
        "p(X, N) :- q(X), N = #sum{V, Y : r(X, Y, V)}.",
        "c(N, V) :- node(N), V = #count{M : edge(N, M)}.",
    ],
)
def test_safe_rules_are_accepted(text):
    parse_program(text)


def test_print_parse_round_trip():
    text = print_program(parse_program(CLIQUE + ':~ in(X), cost(X,C). [C@0, X]\n#show p/1.\np("a\\"b").'))
    assert print_program(parse_program(text)) == text


def test_parse_facts():
    atoms = parse_facts('node(a). cost(a, 1). label("x"). (1,a).')
    assert [a.predicate for a in atoms] == ["node", "cost", "label", SHOW_TUPLE]
    with pytest.raises(AspSyntaxError, match="not a fact"):
        parse_facts("p(X) :- q(X).")
    with pytest.raises(AspSyntaxError, match="ground"):
        parse_facts("p(1+2).")
