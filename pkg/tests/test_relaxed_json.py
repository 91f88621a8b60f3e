import json
from decimal import Decimal

import pytest

from conftest import read
from asp_mustache.relaxed_json import RelaxedJSONError, loads_strict, parse_relaxed, to_strict


@pytest.mark.parametrize(
    "text, expected",
    [
        ("{ data: [1,2,], /*c*/ }", {"data": [1, 2]}),
        ('{ from: "a", to: "b" }', {"from": "a", "to": "b"}),
        ("{ group: out }", {"group": "out"}),
        ("{ 'single': 'quoted' }", {"single": "quoted"}),
        ("[1 2\n3]", [1, 2, 3]),
        ("[{a: 1} {a: 2}]", [{"a": 1}, {"a": 2}]),
        ("// lead\n[true, false, null] // tail", [True, False, None]),
        ("{ path: x.org/a-b.c }", {"path": "x.org/a-b.c"}),
        ("[-1, 2.50, 1e3, 1.5E-2]", [-1, Decimal("2.50"), Decimal("1e3"), Decimal("0.015")]),
        ("[01, 1., +1, .5]", ["01", "1.", "+1", ".5"]),
        ('"\\u00e9\\ud83d\\ude00\\n"', "é😀\n"),
    ],
)
def test_parse(text, expected):
    assert parse_relaxed(text) == expected


def test_numbers_keep_their_text():
    value = parse_relaxed("[2.50, 1e3, 0.1]")
    assert [str(v) for v in value] == ["2.50", "1E+3", "0.1"]
    assert to_strict(value) == "[2.50,1E+3,0.1]"


def test_key_order_is_preserved():
    assert list(parse_relaxed("{b: 1, a: 2, c: 3}")) == ["b", "a", "c"]


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("{a: 1, a: 2}", "duplicate key"),
        ("[1,,2]", "','"),
        ("[,1]", "','"),
        ("{a 1}", "':'"),
        ("[1, 2", "']'"),
        ('"abc', "unterminated"),
        ("/* open", "unterminated comment"),
        ("[1] 2", "after value"),
        ("", "end of input"),
        ('"\\x"', "escape"),
    ],
)
def test_errors(text, fragment):
    with pytest.raises(RelaxedJSONError) as info:
        parse_relaxed(text)
    assert fragment in str(info.value)


def test_error_position():
    with pytest.raises(RelaxedJSONError) as info:
        parse_relaxed("{\n  a: 1,\n  a: 2\n}")
    assert (info.value.line, info.value.column) == (3, 3)


def test_deep_nesting_is_an_error_not_a_crash():
    with pytest.raises(RelaxedJSONError, match="deep"):
        parse_relaxed("[" * 5000)


def test_bytes_input():
    assert parse_relaxed(b"{a: 1}") == {"a": 1}
    with pytest.raises(RelaxedJSONError):
        parse_relaxed(b"\xff")


def test_to_strict():
    assert to_strict(None) == "null"
    assert to_strict(Decimal("2.5")) == "2.5"
    assert to_strict({"a": [1, "x\"y", True]}) == '{"a":[1,"x\\"y",true]}'
    assert to_strict("é\u0001") == '"é\\u0001"'
    with pytest.raises(ValueError):
        to_strict(Decimal("NaN"))


def test_tabulator_config_round_trips():
    text = read("tabulator.tpl").replace("{{", "").replace("}}", "")
    # the raw template is not a config, but a rendered one is; use a rendered sample
    sample = """{ data: [ { node: "a", cost: 50, in: true, }, ],
      columns: [ { title: "Node", field: "node" } ],
      download: [ { color: "success", format: "csv", options: { delimiter: "\\t" } } ] }"""
    value = parse_relaxed(sample)
    strict = to_strict(value)
    assert parse_relaxed(strict) == value
    assert loads_strict(strict) == value
    assert json.loads(strict)["download"][0]["options"]["delimiter"] == "\t"
    assert text  # template file is present


def test_strict_loader_rejects_non_json_constants():
    assert parse_relaxed("[NaN]") == ["NaN"]
    with pytest.raises(RelaxedJSONError, match="NaN"):
        loads_strict("[NaN]")
