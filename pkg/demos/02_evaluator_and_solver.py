"""The built-in evaluator for stratified programs, and clingo for the rest.

Run with ``python3 demos/02_evaluator_and_solver.py``.  The last part needs
clingo (``pip install clingo``) and is skipped without it.
"""

import importlib.util
import sys

from asp_mustache import (
    ClingoClient,
    Interpretation,
    NotStratified,
    evaluate,
    parse_program,
    project,
    render_term,
)
from asp_mustache.evaluator import stratify

# %% A stratified program has exactly one answer set, computed bottom-up.
program = parse_program("""
reach(X,Y) :- edge(X,Y).
reach(X,Z) :- reach(X,Y), edge(Y,Z).
unreachable(X,Y) :- node(X), node(Y), X != Y, not reach(X,Y).
fanout(X,N) :- node(X), N = #count{Y : reach(X,Y)}.
#show fanout/2.
#show (X, Y) : unreachable(X,Y), X < Y.
""")
facts = Interpretation.parse("node(a). node(b). node(c). node(d). edge(a,b). edge(b,c). edge(d,c).")

for number, stratum in enumerate(stratify(program)):
    print(f"stratum {number}: {len(stratum)} rule(s)")

answer = evaluate(program, facts)
print(len(answer), "atoms in the answer set")

# %% Projection keeps what #show selects, in the standard term order.
for obj in project(answer, program).shown:
    print(render_term(obj))

# %% Semi-naive and naive evaluation agree; the former avoids re-deriving facts.
assert evaluate(program, facts, strategy="naive") == answer

# %% Choice rules are outside the stratified fragment.
clique = parse_program("""
edge(X,Y) :- edge(Y,X).
{in(N) : node(N)} = K :- size(K).
:- in(X), in(Y), X < Y, not edge(X,Y).
#show (Index+1, N) : in(N), size(K), Index = #count{N': in(N'), N > N'}.
""")
graph = Interpretation.parse("node(a). node(b). node(c). node(d). edge(a,b). edge(a,c). edge(b,c). edge(c,d). size(3).")
try:
    evaluate(clique, graph)
except NotStratified as err:
    print("in-process:", err)

# %% Such programs go to clingo, run as a subprocess with JSON output.
if importlib.util.find_spec("clingo") is None:
    print("clingo not installed; skipping the solver part")
else:
    solver = ClingoClient(f"{sys.executable} -m clingo")
    for model in solver.search(clique, graph, n=0):
        print("clique:", model.dump().replace("\n", " "))
