"""A recipe that finds a clique and turns it into a table and a chart.

Run with ``python3 demos/04_recipes_and_pages.py [out_dir]``.  With clingo
installed the clique is searched for; otherwise it is given as facts.
The HTML pages load their libraries from pinned CDN URLs.
"""

import importlib.util
import sys
import tempfile
from pathlib import Path

from asp_mustache import ClingoClient, parse_recipe, run, to_strict

GRAPH = """
node(a). node(b). node(c). node(d).
edge(a,b). edge(a,c). edge(b,c). edge(c,d).
size(3). cost(a,1). cost(b,2). cost(c,1). cost(d,1).
"""

TABLE = """{ data: [{{= {{f"{ node: "${N}", cost: ${C},
               in: {{= "true" : in(${N}) }}{{= "false" : not in(${N}) }} }"}} : cost(N,C) }}],
  columns: [ { title: "Node", field: "node" }, { title: "Cost", field: "cost" },
             { title: "In clique", field: "in", formatter: "tickCross" } ],
  download: [ { color: "success", format: "csv" } ] }"""

# sort(2) orders show(V,N) values by node instead of by value
CHART = """{{+ sort(2) }}{ type: bar,
  data: { labels: [{{= {{f"${N}"}} : node(N) }}],
          datasets: [ { label: "Edges", data: [{{= show(V,N) : node(N), V = #count{M : edge(N,M)} }}] },
                      { label: "Cost", data: [{{= show(C,N) : cost(N,C) }}] } ] } }"""

# %% Recipes are relaxed JSON.  Templates are stored as Base64 atoms by
# `encode` and picked up by the framework operations.
solver = None
if importlib.util.find_spec("clingo") is not None:
    solver = ClingoClient(f"{sys.executable} -m clingo")
    search = """{ operation: search_models, n: 1, program: "
        edge(X,Y) :- edge(Y,X).
        {in(N) : node(N)} = K :- size(K).
        :- in(X), in(Y), X < Y, not edge(X,Y).
        #show node/1. #show edge/2. #show in/1. #show cost/2. #show size/1." },"""
    facts = GRAPH
else:
    search = ""
    facts = GRAPH + "in(a). in(b). in(c)."

recipe = parse_recipe(f"""{{ ingredients: [
  {search}
  {{ operation: encode, predicate: table, content: {to_strict(TABLE)} }},
  {{ operation: encode, predicate: chart, content: {to_strict(CHART)} }},
  {{ operation: tabulator, predicate: table, multi_stage: true }},
  {{ operation: chartjs, predicate: chart }},
] }}""")

result = run(recipe, facts, solver)

# %% The interpretations flow on; pages and configs are side outputs.
out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="asp-mustache-"))
out_dir.mkdir(parents=True, exist_ok=True)
for side in result.side_outputs:
    (out_dir / side.name).write_bytes(side.data)
    print(out_dir / side.name)
print(next(s for s in result.side_outputs if s.name.endswith("chartjs-0-0.json")).text)
