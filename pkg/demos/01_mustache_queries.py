"""Rendering text from an interpretation with Mustache queries.

Run with ``python3 demos/01_mustache_queries.py``.
"""

from asp_mustache import Interpretation, expand, expand_stages

# %% The running example: a small graph, one of its 3-cliques, and node costs.
graph = Interpretation.parse("""
node(a). node(b). node(c). node(d).
edge(a,b). edge(a,c). edge(b,c). edge(c,d).
size(3). in(a). in(b). in(c).
cost(a,1). cost(b,2). cost(c,1). cost(d,1).
""")

# %% A query is a small program whose #show directives decide what gets printed.
# Rules inside the query only live for that query.
template = """Here is a {{ #show (K,) : size(K). }}-clique of the given graph:
{{
  edge(X,Y) :- edge(Y,X).
  :- in(X), in(Y), X < Y, not edge(X,Y).
  #show (Index+1, N) : in(N), size(K), Index = #count{N': in(N'), N > N'}.
}}"""
print(expand(template, graph))
print()

# %% Render directives are ordinary atoms: sort/1, separator/1, term_separator/1,
# prefix/1 and suffix/1.  The shortcut {{= H : B }} stands for {{ #show H : B. }}.
sentence = (
    "Here is a {{= K : size(K) }}-clique of the given graph: "
    '{{ #show (I+1, N) : in(N), I = #count{M : in(M), M < N}. '
    '#show sort(1). #show separator("; "). #show term_separator(") "). #show prefix("("). }}.'
)
print(expand(sentence, graph))

# %% show/n prints its first argument only; the others keep duplicates apart.
print(expand(
    'The cost is {{= S : S = #sum{C, X : in(X), cost(X,C)} }} = '
    '{{ #show show(C, X) : in(X), cost(X,C). #show sort(2). #show separator(" + "). }}.',
    graph,
))

# %% Persistent directives ({{+ ... }}) apply to every later query until {{-}}.
print(expand('{{+ separator(", ") }}[{{= X : node(X) }}] [{{= C : cost(_,C) }}]{{-}} [{{= X : in(X) }}]', graph))

# %% f-strings build text from variables.  A query that prints another query
# needs multi-stage expansion, which repeats until no expression is left.
nested = '{{+ separator(", ") }}{{= {{f"${X}={{= "in" : in(${X}) }}{{= "out" : not in(${X}) }}"}} : node(X) }}'
for number, stage in enumerate(expand_stages(nested, graph, multi_stage=True), 1):
    print(f"stage {number}: {stage}")
