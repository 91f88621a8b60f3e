"""Relaxed JSON: what templates may emit, and the strict JSON it becomes.

Run with ``python3 demos/03_relaxed_json.py``.
"""

from asp_mustache import RelaxedJSONError, parse_relaxed, to_strict

# %% Unquoted keys, bare words, single quotes, comments, trailing commas,
# and commas that may be left out between elements.
text = """
{ // a vis-network style config
  nodes: [ { id: a, label: 'a (1)', group: in }
           { id: b, label: "b (2)", group: in, } ],
  /* numbers keep their exact value */
  scale: 1.10, count: 2,
}
"""
value = parse_relaxed(text)
print(value)
print(to_strict(value))

# %% Errors carry a line and column.
for bad in ["{ a: 1, a: 2 }", "[1,,2]", "{ a: [1, 2 }"]:
    try:
        parse_relaxed(bad)
    except RelaxedJSONError as err:
        print(f"{bad!r}: {err}")
