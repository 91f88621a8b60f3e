"""Bottom-up evaluation of stratified programs with aggregates.

Grounding is driven by evaluation: rule bodies are joined against the
relations derived so far, one stratum at a time, with a semi-naive fixpoint
inside each stratum.  Programs needing search (choice rules, weak
constraints, negation through recursion) are rejected so that callers can
hand them to an external solver.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, DivisionByZero, InvalidOperation
from typing import Iterable, Iterator, Optional

import networkx as nx

from .builtins import EvalError, call_builtin
from .interpretation import Interpretation
from .syntax import (
    DIRECTIVE_PREDICATES,
    Aggregate,
    Atom,
    ChoiceRule,
    Comparison,
    Literal,
    Program,
    Rule,
    ShowDirective,
    ShowSignature,
    WeakConstraint,
    binding_step,
    outside_variables,
    aggregate_ready,
    literal_variables,
    print_statement,
)
from .terms import (
    BinOp,
    Constant,
    ExternalCall,
    Function,
    Number,
    Real,
    String,
    Term,
    UnaryOp,
    Variable,
    compare_terms,
    render_term,
    sorted_terms,
    term_key,
    variables,
)

__all__ = [
    "EvalError",
    "NotStratified",
    "NeedsSolver",
    "Inconsistent",
    "ProjectedAnswer",
    "evaluate",
    "evaluate_aggregate",
    "project",
    "projected_atoms",
    "stratify",
]


class NotStratified(EvalError):
    """The program has no layering that makes bottom-up evaluation sound."""


class NeedsSolver(NotStratified):
    """The program uses constructs that require answer-set search."""


class Inconsistent(EvalError):
    """A constraint is violated: the program has no answer set."""

    def __init__(self, instance: str):
        self.instance = instance
        super().__init__(f"no answer set: constraint violated: {instance}")


Signature = tuple  # (predicate, arity)


# ------------------------------------------------------------- arithmetic

def _numeric(t: Term, op: str):
    if isinstance(t, Number):
        return t.value
    if isinstance(t, Real):
        return t.value
    raise EvalError(f"arithmetic {op!r} on non-number {render_term(t)}")


def _wrap(value) -> Term:
    if isinstance(value, Decimal):
        return Real.from_decimal(value)
    return Number(value)


def _arith(op: str, a: Term, b: Term) -> Term:
    x, y = _numeric(a, op), _numeric(b, op)
    if isinstance(x, Decimal) or isinstance(y, Decimal):
        x, y = Decimal(x), Decimal(y)
        real = True
    else:
        real = False
    try:
        if op == "+":
            r = x + y
        elif op == "-":
            r = x - y
        elif op == "*":
            r = x * y
        elif op == "**":
            if not real and y < 0:
                raise EvalError("negative integer exponent")
            r = x ** y
        elif op == "/":
            if y == 0:
                raise EvalError(f"division by zero: {render_term(a)} / {render_term(b)}")
            if real:
                r = x / y
            else:
                # truncating division, as in C
                r = abs(x) // abs(y) * (1 if (x >= 0) == (y >= 0) else -1)
        elif op == "\\":
            if y == 0:
                raise EvalError(f"division by zero: {render_term(a)} \\ {render_term(b)}")
            if real:
                r = x % y
            else:
                q = abs(x) // abs(y) * (1 if (x >= 0) == (y >= 0) else -1)
                r = x - q * y
        else:
            raise EvalError(f"unknown operator {op}")
    except (DivisionByZero, InvalidOperation) as e:
        raise EvalError(f"arithmetic error in {op}: {e}") from None
    return _wrap(r)


def eval_term(t: Term, binding: dict) -> Term:
    """Instantiate ``t`` under ``binding`` and evaluate arithmetic and builtins."""
    if isinstance(t, (Number, Real, Constant, String)):
        return t
    if isinstance(t, Variable):
        try:
            return binding[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name}") from None
    if isinstance(t, Function):
        if not t.args:
            return t
        return Function(t.name, tuple(eval_term(a, binding) for a in t.args))
    if isinstance(t, BinOp):
        return _arith(t.op, eval_term(t.left, binding), eval_term(t.right, binding))
    if isinstance(t, UnaryOp):
        v = eval_term(t.arg, binding)
        n = _numeric(v, t.op)
        return _wrap(-n if t.op == "-" else abs(n))
    if isinstance(t, ExternalCall):
        return call_builtin(t.name, [eval_term(a, binding) for a in t.args])
    raise TypeError(t)


def match(pattern: Term, value: Term, binding: dict) -> Optional[dict]:
    """Unify a pattern with a ground value; returns the extended binding or None."""
    if isinstance(pattern, Variable):
        if pattern.anonymous:
            return binding
        bound = binding.get(pattern.name)
        if bound is None:
            out = dict(binding)
            out[pattern.name] = value
            return out
        return binding if bound == value else None
    if isinstance(pattern, Function):
        if not isinstance(value, Function) or value.name != pattern.name or len(value.args) != len(pattern.args):
            return None
        for p, v in zip(pattern.args, value.args):
            binding = match(p, v, binding)
            if binding is None:
                return None
        return binding
    if isinstance(pattern, (BinOp, UnaryOp, ExternalCall)):
        return binding if eval_term(pattern, binding) == value else None
    return binding if pattern == value else None


def _holds(op: str, a: Term, b: Term) -> bool:
    c = compare_terms(a, b)
    return {
        "=": c == 0,
        "!=": c != 0,
        "<": c < 0,
        "<=": c <= 0,
        ">": c > 0,
        ">=": c >= 0,
    }[op]


# -------------------------------------------------------------- relations

class Relation:
    """Set of argument tuples with lazily built hash indexes on bound positions."""

    def __init__(self, tuples: Iterable[tuple] = ()):
        self.tuples: set = set(tuples)
        self._indexes: dict = {}

    def add(self, row: tuple) -> bool:
        if row in self.tuples:
            return False
        self.tuples.add(row)
        for positions, index in self._indexes.items():
            index[tuple(row[i] for i in positions)].append(row)
        return True

    def lookup(self, positions: tuple, key: tuple):
        if not positions:
            return self.tuples
        index = self._indexes.get(positions)
        if index is None:
            index = defaultdict(list)
            for row in self.tuples:
                index[tuple(row[i] for i in positions)].append(row)
            self._indexes[positions] = index
        return index.get(key, ())

    def __len__(self):
        return len(self.tuples)


class Database:
    def __init__(self):
        self.relations: dict[Signature, Relation] = defaultdict(Relation)

    def add(self, atom: Atom) -> bool:
        return self.relations[atom.signature].add(atom.args)

    def get(self, sig: Signature) -> Relation:
        return self.relations.get(sig) or Relation()

    def atoms(self) -> Iterator[Atom]:
        for (pred, _), rel in self.relations.items():
            for row in rel.tuples:
                yield Atom(pred, row)


# ------------------------------------------------------------------ plans

@dataclass
class Step:
    kind: str          # atom | neg | cmp | assign | agg
    literal: Literal
    delta: bool = False
    subplans: list = field(default_factory=list)   # per aggregate element
    assign: Optional[str] = None                    # variable bound by an aggregate guard


def plan_body(body: tuple, bound: set, delta_index: Optional[int] = None, head_vars=frozenset()) -> list[Step]:
    """Order body literals so that every literal is evaluable when reached.

    ``head_vars`` are variables used outside the body; together with the
    other literals they decide which aggregate variables are global.
    """
    extra = set(head_vars) | set(bound)
    bound = set(bound)
    pending = list(enumerate(body))
    steps = []
    if delta_index is not None:
        lit = body[delta_index]
        steps.append(Step("atom", lit, delta=True))
        bound |= literal_variables(lit)
        pending = [(i, l) for i, l in pending if i != delta_index]
    while pending:
        chosen = None
        # filters first, then assignments, then joins
        for rank in range(3):
            for pos, (i, lit) in enumerate(pending):
                step = _ready(lit, bound, rank, outside_variables(body, i, extra))
                if step is not None:
                    chosen = pos, step
                    break
            if chosen:
                break
        if chosen is None:
            missing = set().union(*(literal_variables(l) for _, l in pending)) - bound
            raise EvalError(f"cannot order body literals; unbound: {', '.join(sorted(missing))}")
        pos, step = chosen
        i, _ = pending.pop(pos)
        if step.kind == "agg":
            step.subplans = [plan_body(e.condition, bound) for e in step.literal.body.elements]
        new = binding_step(step.literal, bound, outside_variables(body, i, extra))
        if new:
            bound |= new
        steps.append(step)
    return steps


def _ready(lit: Literal, bound: set, rank: int, outside: set) -> Optional[Step]:
    b = lit.body
    lv = literal_variables(lit)
    if isinstance(b, Atom):
        if lit.negated:
            return Step("neg", lit) if rank == 0 and lv <= bound else None
        return Step("atom", lit) if rank == 2 else None
    if isinstance(b, Comparison):
        if rank == 0 and lv <= bound:
            return Step("cmp", lit)
        if rank == 1 and binding_step(lit, bound):
            return Step("assign", lit)
        return None
    if rank == 0 and aggregate_ready(b, bound, None, outside):
        return Step("agg", lit)
    if rank == 1 and not lit.negated:
        new = binding_step(lit, bound, outside)
        if new:
            return Step("agg", lit, assign=next(iter(new)))
    return None


class _Context:
    def __init__(self, db: Database, delta: Optional[Database] = None):
        self.db = db
        self.delta = delta


def _scan(atom: Atom, binding: dict, rel: Relation) -> Iterator[dict]:
    positions, key = [], []
    for i, a in enumerate(atom.args):
        if isinstance(a, Variable):
            if not a.anonymous and a.name in binding:
                positions.append(i)
                key.append(binding[a.name])
        elif not variables(a) or variables(a) <= binding.keys():
            if not isinstance(a, Function) or not _has_anon(a):
                positions.append(i)
                key.append(eval_term(a, binding))
    for row in list(rel.lookup(tuple(positions), tuple(key))):
        b = binding
        for p, v in zip(atom.args, row):
            b = match(p, v, b)
            if b is None:
                break
        if b is not None:
            yield b


def _has_anon(t: Term) -> bool:
    if isinstance(t, Variable):
        return t.anonymous
    if isinstance(t, Function):
        return any(_has_anon(a) for a in t.args)
    return False


def run_plan(steps: list, binding: dict, ctx: _Context, i: int = 0) -> Iterator[dict]:
    if i == len(steps):
        yield binding
        return
    step = steps[i]
    lit = step.literal
    b = lit.body
    if step.kind == "atom":
        rel = (ctx.delta if step.delta else ctx.db).get(b.signature)
        for nb in _scan(b, binding, rel):
            yield from run_plan(steps, nb, ctx, i + 1)
    elif step.kind == "neg":
        if not any(True for _ in _scan(b, binding, ctx.db.get(b.signature))):
            yield from run_plan(steps, binding, ctx, i + 1)
    elif step.kind == "cmp":
        if _holds(b.op, eval_term(b.left, binding), eval_term(b.right, binding)):
            yield from run_plan(steps, binding, ctx, i + 1)
    elif step.kind == "assign":
        if isinstance(b.left, Variable) and b.left.name not in binding:
            target, source = b.left, b.right
        else:
            target, source = b.right, b.left
        nb = dict(binding)
        nb[target.name] = eval_term(source, binding)
        yield from run_plan(steps, nb, ctx, i + 1)
    else:
        nb = _aggregate_literal(step, binding, ctx)
        if nb is not None:
            yield from run_plan(steps, nb, ctx, i + 1)


def _aggregate_literal(step: Step, binding: dict, ctx: _Context) -> Optional[dict]:
    agg: Aggregate = step.literal.body
    value = evaluate_aggregate(agg.function, agg.elements, binding, ctx, step.subplans)
    ok = value is not None
    out = binding
    if ok:
        for op, t in agg.guards():
            if step.assign is not None and isinstance(t, Variable) and t.name == step.assign:
                out = dict(out)
                out[t.name] = value
            elif not _holds(op, value, eval_term(t, out)):
                ok = False
                break
    if step.literal.negated:
        return binding if not ok else None
    return out if ok else None


def evaluate_aggregate(function: str, elements, binding: dict, ctx, subplans=None) -> Optional[Term]:
    """Value of ``#function{elements}`` under ``binding``.

    Element tuples are collected as a set, so tuples differing only in their
    distinguishing terms count separately.  ``#min``/``#max`` of an empty set
    is None (no value).
    """
    if not isinstance(ctx, _Context):
        ctx = _Context(_as_database(ctx))
    if subplans is None:
        subplans = [plan_body(e.condition, set(binding)) for e in elements]
    collected = set()
    for e, plan in zip(elements, subplans):
        for b in run_plan(plan, binding, ctx):
            collected.add(tuple(eval_term(t, b) for t in e.terms))
    if function == "#count":
        return Number(len(collected))
    weights = [row[0] for row in collected if row]
    if function == "#sum":
        total, real = 0, False
        for w in weights:
            if isinstance(w, Real):
                real = True
                total = Decimal(total) + w.value
            elif isinstance(w, Number):
                total = total + w.value
            else:
                raise EvalError(f"#sum over non-number {render_term(w)}")
        return Real.from_decimal(Decimal(total)) if real else Number(total)
    if not weights:
        return None
    ordered = sorted_terms(weights)
    return ordered[0] if function == "#min" else ordered[-1]


def _as_database(facts) -> Database:
    if isinstance(facts, Database):
        return facts
    db = Database()
    for a in facts:
        db.add(a)
    return db


# --------------------------------------------------------- stratification

def _rule_edges(rule: Rule):
    head = rule.head.signature
    for lit in rule.body:
        b = lit.body
        if isinstance(b, Atom):
            yield b.signature, head, lit.negated
        elif isinstance(b, Aggregate):
            for e in b.elements:
                for inner in e.condition:
                    if isinstance(inner.body, Atom):
                        yield inner.body.signature, head, True


def _check_supported(program: Program) -> None:
    for stmt in program.statements:
        if isinstance(stmt, ChoiceRule):
            raise NeedsSolver(f"choice rules need an external solver: {print_statement(stmt)}")
        if isinstance(stmt, WeakConstraint):
            raise NeedsSolver(f"weak constraints need an external solver: {print_statement(stmt)}")


def stratify(program: Program) -> list[list[Rule]]:
    """Group the defining rules into strata, lowest first.

    Raises NotStratified if a predicate depends on itself through negation
    or an aggregate.
    """
    _check_supported(program)
    rules = [r for r in program.rules if r.head is not None]
    g = nx.DiGraph()
    for r in rules:
        g.add_node(r.head.signature)
        for src, dst, neg in _rule_edges(r):
            if g.has_edge(src, dst):
                g[src][dst]["negative"] |= neg
            else:
                g.add_edge(src, dst, negative=neg)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    for src, dst, data in g.edges(data=True):
        if data["negative"] and members[src] == members[dst]:
            path = nx.shortest_path(g, dst, src) if src != dst else [src]
            cycle = " -> ".join(f"{p}/{n}" for p, n in [src] + path)
            raise NotStratified(f"negative dependency in a cycle: {cycle}")
    by_component = defaultdict(list)
    for r in rules:
        by_component[members[r.head.signature]].append(r)
    return [by_component[c] for c in nx.topological_sort(cond) if by_component[c]]


# ------------------------------------------------------------- evaluation

def _head_vars(rule: Rule) -> set:
    return set().union(*(variables(a) for a in rule.head.args)) if rule.head.args else set()


def _head_atom(rule: Rule, binding: dict) -> Atom:
    return Atom(rule.head.predicate, tuple(eval_term(a, binding) for a in rule.head.args))


def _positive_positions(rule: Rule, sigs: set) -> list[int]:
    return [
        i for i, lit in enumerate(rule.body)
        if isinstance(lit.body, Atom) and not lit.negated and lit.body.signature in sigs
    ]


def evaluate(program: Program, facts: Iterable[Atom] = (), strategy: str = "semi-naive") -> Interpretation:
    """The unique answer set of ``program`` plus ``facts``.

    Raises NotStratified (or NeedsSolver), Inconsistent, or EvalError.
    """
    if strategy not in ("semi-naive", "naive"):
        raise ValueError(f"unknown strategy {strategy!r}")
    db = _as_database(list(facts))
    for stratum in stratify(program):
        sigs = {r.head.signature for r in stratum}
        if strategy == "naive":
            _naive(stratum, db)
        else:
            _semi_naive(stratum, sigs, db)
    ctx = _Context(db)
    for rule in program.rules:
        if rule.head is None:
            for b in run_plan(plan_body(rule.body, set()), {}, ctx):
                raise Inconsistent(_instance(rule, b))
    return Interpretation(db.atoms())


def _naive(stratum: list[Rule], db: Database) -> None:
    plans = [(r, plan_body(r.body, set(), head_vars=_head_vars(r))) for r in stratum]
    changed = True
    while changed:
        ctx = _Context(db)
        derived = [_head_atom(r, b) for r, plan in plans for b in run_plan(plan, {}, ctx)]
        changed = False
        for a in derived:
            changed |= db.add(a)


def _semi_naive(stratum: list[Rule], sigs: set, db: Database) -> None:
    ctx = _Context(db)
    derived = [
        _head_atom(r, b)
        for r in stratum
        for b in run_plan(plan_body(r.body, set(), head_vars=_head_vars(r)), {}, ctx)
    ]
    delta = Database()
    for a in derived:
        if db.add(a):
            delta.add(a)
    recursive = [
        (r, [plan_body(r.body, set(), j, _head_vars(r)) for j in _positive_positions(r, sigs)])
        for r in stratum
    ]
    recursive = [(r, plans) for r, plans in recursive if plans]
    while any(len(rel) for rel in delta.relations.values()):
        ctx = _Context(db, delta)
        derived = []
        for r, plans in recursive:
            for plan in plans:
                derived.extend(_head_atom(r, b) for b in run_plan(plan, {}, ctx))
        delta = Database()
        for a in derived:
            if db.add(a):
                delta.add(a)


def _instance(stmt, binding: dict) -> str:
    def subst(t):
        if isinstance(t, Variable) and t.name in binding:
            return binding[t.name]
        if isinstance(t, Function):
            return Function(t.name, tuple(subst(a) for a in t.args))
        return t

    def lit_text(lit):
        b = lit.body
        if isinstance(b, Atom):
            s = str(Atom(b.predicate, tuple(subst(a) for a in b.args)))
        elif isinstance(b, Comparison):
            s = f"{render_term(subst(b.left))} {b.op} {render_term(subst(b.right))}"
        else:
            return print_statement(Rule(None, (lit,)))[3:-1]
        return f"not {s}" if lit.negated else s

    return ":- " + ", ".join(lit_text(l) for l in stmt.body) + "."


# ------------------------------------------------------------- projection

@dataclass(frozen=True)
class ProjectedAnswer:
    """Shown objects split into renderables and render directives.

    ``directives`` pairs each reserved atom with the index of the first show
    directive that produced it, and is ordered by that index.
    """

    renderables: tuple = ()
    directives: tuple = ()

    @property
    def shown(self) -> tuple:
        return tuple(sorted_terms(self.renderables + tuple(t for _, t in self.directives)))

    def __bool__(self):
        return bool(self.renderables or self.directives)


def is_directive(t: Term) -> bool:
    return isinstance(t, Function) and t.name in DIRECTIVE_PREDICATES and len(t.args) == 1


def shown_objects(answer: Iterable[Atom], program: Program) -> list[tuple[int, Term]]:
    """(directive index, object) for every shown object, first occurrence wins."""
    db = _as_database(answer)
    ctx = _Context(db)
    seen: dict = {}
    index = 0
    for stmt in program.statements:
        if isinstance(stmt, ShowDirective) and stmt.term is not None:
            for b in run_plan(plan_body(stmt.body, set(), head_vars=variables(stmt.term)), {}, ctx):
                seen.setdefault(eval_term(stmt.term, b), index)
            index += 1
        elif isinstance(stmt, ShowSignature):
            for row in db.get((stmt.predicate, stmt.arity)).tuples:
                seen.setdefault(Atom(stmt.predicate, row).to_term(), index)
            index += 1
    return sorted(((i, t) for t, i in seen.items()), key=lambda p: (p[0], term_key(p[1])))


def project(answer: Iterable[Atom], program: Program) -> ProjectedAnswer:
    """Apply the show directives of ``program`` to an answer set."""
    objects = shown_objects(answer, program)
    renderables = sorted_terms(t for _, t in objects if not is_directive(t))
    directives = tuple((i, t) for i, t in objects if is_directive(t))
    return ProjectedAnswer(tuple(renderables), directives)


def projected_atoms(answer: Interpretation, program: Program) -> Interpretation:
    """An answer set as it leaves a search step: projected if the program shows anything."""
    if not program.has_show:
        return answer
    return Interpretation(Atom.from_term(t) for _, t in shown_objects(answer, program))
