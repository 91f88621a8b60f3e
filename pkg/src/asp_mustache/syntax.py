"""Parser and printer for the ASP fragment used in Mustache queries and recipes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

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
    render_term,
    subterms,
    variables,
)

SHOW_TUPLE = "__show__"
BASE64 = "__base64__"
DIRECTIVE_PREDICATES = ("sort", "separator", "term_separator", "prefix", "suffix")
COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")
AGGREGATE_FUNCTIONS = ("#count", "#sum", "#min", "#max")


class AspSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        where = f"{line}:{column}: " if line else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class SafetyError(AspSyntaxError):
    def __init__(self, variable: str, statement: "Statement"):
        self.variable = variable
        self.statement = statement
        super().__init__(f"unsafe variable {variable} in: {print_statement(statement)}")


# -------------------------------------------------------------------- AST

@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))

    def to_term(self) -> Term:
        if self.predicate == SHOW_TUPLE:
            return Function("", self.args)
        return Function(self.predicate, self.args) if self.args else Constant(self.predicate)

    @classmethod
    def from_term(cls, t: Term) -> "Atom":
        if isinstance(t, Constant):
            return cls(t.name)
        if isinstance(t, Function):
            return cls(t.name or SHOW_TUPLE, t.args)
        return cls(SHOW_TUPLE, (t,))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}(" + ",".join(render_term(a) for a in self.args) + ")"


def is_reserved(atom: Atom) -> bool:
    """Reserved predicates are recognized from name and arity alone."""
    if atom.predicate == "show":
        return atom.arity >= 1
    if atom.predicate in DIRECTIVE_PREDICATES or atom.predicate == BASE64:
        return atom.arity == 1
    return False


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class AggregateElement:
    terms: tuple
    condition: tuple = ()


@dataclass(frozen=True)
class Aggregate:
    """``left_term left_op #fun{elements} right_op right_term``; guards optional."""

    function: str
    elements: tuple
    left: Optional[tuple] = None   # (term, op)
    right: Optional[tuple] = None  # (op, term)

    def guards(self):
        """Guards normalized to ``#agg op term``."""
        flip = {"<": ">", ">": "<", "<=": ">=", ">=": "<=", "=": "=", "!=": "!="}
        out = []
        if self.left is not None:
            out.append((flip[self.left[1]], self.left[0]))
        if self.right is not None:
            out.append(self.right)
        return out


@dataclass(frozen=True)
class Literal:
    body: Union[Atom, Comparison, Aggregate]
    negated: bool = False


@dataclass(frozen=True)
class Rule:
    head: Optional[Atom]
    body: tuple = ()

    @property
    def kind(self) -> str:
        if self.head is None:
            return "constraint"
        return "normal" if self.body else "fact"


@dataclass(frozen=True)
class ShowDirective:
    """``#show term : body.``; ``term`` is None for the bare ``#show.``"""

    term: Optional[Term]
    body: tuple = ()


@dataclass(frozen=True)
class ShowSignature:
    predicate: str
    arity: int


@dataclass(frozen=True)
class ChoiceElement:
    atom: Atom
    condition: tuple = ()


@dataclass(frozen=True)
class ChoiceRule:
    elements: tuple
    left: Optional[tuple] = None
    right: Optional[tuple] = None
    body: tuple = ()


@dataclass(frozen=True)
class WeakConstraint:
    body: tuple
    weight: Term
    level: Optional[Term] = None
    terms: tuple = ()


Statement = Union[Rule, ShowDirective, ShowSignature, ChoiceRule, WeakConstraint]


@dataclass(frozen=True)
class Program:
    statements: tuple = ()

    @property
    def rules(self) -> list[Rule]:
        return [s for s in self.statements if isinstance(s, Rule)]

    @property
    def show_directives(self) -> list[ShowDirective]:
        return [s for s in self.statements if isinstance(s, ShowDirective) and s.term is not None]

    @property
    def has_show(self) -> bool:
        return any(isinstance(s, (ShowDirective, ShowSignature)) for s in self.statements)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.statements + other.statements)

    def __str__(self) -> str:
        return print_program(self)


# ------------------------------------------------------------------ lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<bcomment>%\*.*?\*%)
  | (?P<comment>%[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<num>\d+)
  | (?P<ext>@_*[a-z][A-Za-z0-9_']*)
  | (?P<directive>\#[a-z]+)
  | (?P<var>_*[A-Z][A-Za-z0-9_']*|_(?![A-Za-z0-9_']))
  | (?P<id>_*[a-z][A-Za-z0-9_']*)
  | (?P<punct>:-|:~|\.\.|\*\*|<=|>=|!=|<>|==|[.,;:()\[\]{}=<>+\-*/\\|@])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text.startswith('"', pos):
                raise AspSyntaxError("unterminated string", line, pos - line_start + 1)
            raise AspSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, value = m.lastgroup, m.group()
        if kind not in ("ws", "comment", "bcomment"):
            if kind == "punct":
                kind = {"<>": "!=", "==": "="}.get(value, value)
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_UNESCAPE = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _UNESCAPE.get(m.group(1), "\\" + m.group(1)), body)


# ----------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, *kinds: str) -> Token:
        if not self.at(*kinds):
            self.fail(f"unexpected {self.describe(self.tok)}", kinds)
        return self.advance()

    def fail(self, message: str, expected=(), tok: Optional[Token] = None):
        tok = tok or self.tok
        raise AspSyntaxError(message, tok.line, tok.column, expected)

    @staticmethod
    def describe(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    # program
    def program(self) -> Program:
        statements = []
        while not self.at("eof"):
            statements.append(self.statement())
        return Program(tuple(statements))

    def statement(self) -> Statement:
        tok = self.tok
        if tok.kind == "directive":
            if tok.text != "#show":
                self.fail(f"unsupported directive {tok.text}", ("#show",))
            return self.show()
        if tok.kind == ":-":
            self.advance()
            body = self.body()
            self.expect(".")
            return Rule(None, body)
        if tok.kind == ":~":
            return self.weak_constraint()
        if self.starts_choice():
            return self.choice_rule()
        head = self.head_atom()
        if self.at(";", "|"):
            self.fail("disjunctive heads are not supported")
        body = ()
        if self.at(":-"):
            self.advance()
            body = self.body()
        self.expect(".")
        return Rule(head, body)

    def show(self) -> Statement:
        self.advance()
        if self.at("."):
            self.advance()
            return ShowDirective(None)
        if self.at("id") and self.peek().kind == "/" and self.peek(2).kind == "num" and self.peek(3).kind == ".":
            name = self.advance().text
            self.advance()
            arity = int(self.advance().text)
            self.advance()
            return ShowSignature(name, arity)
        term = self.term()
        body = ()
        if self.at(":"):
            self.advance()
            body = self.body()
        self.expect(".")
        return ShowDirective(normalize_shown(term), body)

    def weak_constraint(self) -> WeakConstraint:
        self.advance()
        body = self.body()
        self.expect(".")
        self.expect("[")
        weight = self.term()
        level = None
        if self.at("@"):
            self.advance()
            level = self.term()
        terms = []
        while self.at(","):
            self.advance()
            terms.append(self.term())
        self.expect("]")
        return WeakConstraint(body, weight, level, tuple(terms))

    def starts_choice(self) -> bool:
        if self.at("{"):
            return True
        if self.at("num", "var"):
            nxt = self.peek()
            return nxt.kind == "{" or (nxt.kind in COMPARISON_OPS and self.peek(2).kind == "{")
        return False

    def choice_rule(self) -> ChoiceRule:
        left = None
        if not self.at("{"):
            bound = self.term()
            op = "<="
            if self.at(*COMPARISON_OPS):
                op = self.advance().kind
            left = (bound, op)
        self.expect("{")
        elements = []
        while not self.at("}"):
            atom = self.head_atom()
            cond = ()
            if self.at(":"):
                self.advance()
                cond = self.conjunction(stop=(";", "}"))
            elements.append(ChoiceElement(atom, cond))
            if not self.at("}"):
                self.expect(";")
        self.advance()
        right = None
        if self.at(*COMPARISON_OPS):
            op = self.advance().kind
            right = (op, self.term())
        elif self.at("num", "var"):
            right = ("<=", self.term())
        body = ()
        if self.at(":-"):
            self.advance()
            body = self.body()
        self.expect(".")
        return ChoiceRule(tuple(elements), left, right, body)

    def head_atom(self) -> Atom:
        if self.at("-"):
            self.fail("classical negation is not supported")
        tok = self.tok
        t = self.term()
        if isinstance(t, (Constant, Function)):
            return Atom.from_term(t)
        self.fail("expected an atom", ("identifier", "("), tok)

    def body(self) -> tuple:
        return self.conjunction(stop=(".",))

    def conjunction(self, stop) -> tuple:
        lits = [self.literal()]
        while self.at(","):
            self.advance()
            lits.append(self.literal())
        if self.at(";") and ";" not in stop:
            self.fail("pooling with ';' is not supported")
        return tuple(lits)

    def literal(self) -> Literal:
        negated = False
        if self.at("id") and self.tok.text == "not":
            self.advance()
            negated = True
            if self.at("id") and self.tok.text == "not":
                self.fail("double negation is not supported")
        if self.at("directive"):
            return Literal(self.aggregate(None), negated)
        tok = self.tok
        if self.at("-") and self.peek().kind == "id":
            self.fail("classical negation is not supported")
        left = self.term()
        if self.at(*COMPARISON_OPS):
            op = self.advance().kind
            if self.at("directive"):
                return Literal(self.aggregate((left, op)), negated)
            if negated:
                self.fail("negated comparisons are not supported", tok=tok)
            return Literal(Comparison(op, left, self.term()))
        # a tuple literal refers to projected tuples of an earlier step
        if isinstance(left, (Constant, Function)):
            return Literal(Atom.from_term(left), negated)
        self.fail("expected a literal", ("atom", "comparison", "aggregate"), tok)

    def aggregate(self, left) -> Aggregate:
        tok = self.advance()
        if tok.text not in AGGREGATE_FUNCTIONS:
            self.fail(f"unsupported aggregate {tok.text}", AGGREGATE_FUNCTIONS, tok)
        self.expect("{")
        elements = []
        while not self.at("}"):
            terms = [self.term()]
            while self.at(","):
                self.advance()
                terms.append(self.term())
            cond = ()
            if self.at(":"):
                self.advance()
                cond = self.conjunction(stop=(";", "}"))
            elements.append(AggregateElement(tuple(terms), cond))
            if not self.at("}"):
                self.expect(";")
        self.advance()
        right = None
        if self.at(*COMPARISON_OPS):
            op = self.advance().kind
            right = (op, self.term())
        return Aggregate(tok.text, tuple(elements), left, right)

    # terms
    def term(self) -> Term:
        left = self.product()
        while self.at("+", "-"):
            op = self.advance().kind
            left = BinOp(op, left, self.product())
        if self.at(".."):
            self.fail("interval terms are not supported")
        return left

    def product(self) -> Term:
        left = self.power()
        while self.at("*", "/", "\\"):
            op = self.advance().kind
            left = BinOp(op, left, self.power())
        return left

    def power(self) -> Term:
        base = self.unary()
        if self.at("**"):
            self.advance()
            return BinOp("**", base, self.power())
        return base

    def unary(self) -> Term:
        if self.at("-"):
            self.advance()
            arg = self.unary()
            if isinstance(arg, Number):
                return Number(-arg.value)
            return UnaryOp("-", arg)
        return self.primary()

    def primary(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Number(int(tok.text))
        if tok.kind == "str":
            self.advance()
            return String(unescape(tok.text[1:-1]))
        if tok.kind == "var":
            self.advance()
            return Variable(tok.text)
        if tok.kind == "ext":
            self.advance()
            return ExternalCall(tok.text[1:], self.arguments())
        if tok.kind == "id":
            self.advance()
            if not self.at("("):
                return Constant(tok.text)
            if tok.text == "real" and self.peek().kind == "str" and self.peek(2).kind == ")":
                self.advance()
                s = self.advance()
                self.advance()
                try:
                    return Real(unescape(s.text[1:-1]))
                except ValueError:
                    self.fail(f"real() expects a decimal numeral, got {s.text}", tok=s)
            return Function(tok.text, self.arguments())
        if tok.kind == "(":
            args, trailing = self.parenthesized()
            if len(args) == 1 and not trailing:
                return args[0]
            return Function("", tuple(args))
        if tok.kind == "|":
            self.advance()
            arg = self.term()
            self.expect("|")
            return UnaryOp("|", arg)
        self.fail(f"unexpected {self.describe(tok)}", ("term",))

    def arguments(self) -> tuple:
        args, _ = self.parenthesized()
        return tuple(args)

    def parenthesized(self):
        self.expect("(")
        args, trailing = [], False
        while not self.at(")"):
            args.append(self.term())
            trailing = False
            if self.at(";"):
                self.fail("pooling with ';' is not supported")
            if not self.at(")"):
                self.expect(",")
                trailing = True
        self.advance()
        return args, trailing


def normalize_shown(t: Term) -> Term:
    """Bare shown terms stand for one-element tuples: ``#show 3.`` shows ``(3,)``."""
    if isinstance(t, Function):
        return t
    return Function("", (t,))


# ----------------------------------------------------------------- safety

def _bindable(t: Term) -> set[str]:
    if isinstance(t, Variable):
        return set() if t.anonymous else {t.name}
    if isinstance(t, Function):
        out = set()
        for a in t.args:
            out |= _bindable(a)
        return out
    return set()


def literal_variables(lit: Literal) -> set[str]:
    b = lit.body
    if isinstance(b, Atom):
        return set().union(*(variables(a) for a in b.args)) if b.args else set()
    if isinstance(b, Comparison):
        return variables(b.left) | variables(b.right)
    out = set()
    for op, t in b.guards():
        out |= variables(t)
    for e in b.elements:
        out |= element_variables(e)
    return out


def element_variables(e) -> set[str]:
    out = set()
    for t in e.terms:
        out |= variables(t)
    for lit in e.condition:
        out |= literal_variables(lit)
    return out


def outside_variables(body: tuple, i: int, extra=frozenset()) -> set[str]:
    """Variables of the rule occurring outside literal ``i`` (aggregate globals)."""
    out = set(extra)
    for j, lit in enumerate(body):
        if j != i:
            out |= literal_variables(lit)
    return out


def binding_step(lit: Literal, bound: set[str], outside=frozenset()) -> Optional[set[str]]:
    """Variables newly bound by ``lit`` given ``bound``, or None if it binds nothing yet."""
    b = lit.body
    if lit.negated:
        return None
    if isinstance(b, Atom):
        return set().union(*(_bindable(a) for a in b.args)) - bound if b.args else set()
    if isinstance(b, Comparison):
        if b.op != "=":
            return None
        for target, source in ((b.left, b.right), (b.right, b.left)):
            if isinstance(target, Variable) and not target.anonymous and target.name not in bound:
                if variables(source) <= bound:
                    return {target.name}
        return None
    for op, t in b.guards():
        if op == "=" and isinstance(t, Variable) and t.name not in bound and aggregate_ready(b, bound, t.name, outside):
            return {t.name}
    return None


def local_bound(condition: tuple, outer: set[str]) -> set[str]:
    return bound_variables(condition, outer)


def aggregate_ready(agg: Aggregate, bound: set[str], exclude: str = None, outside=frozenset()) -> bool:
    """True when the aggregate can be computed: its global variables are bound."""
    for e in agg.elements:
        ev = element_variables(e)
        if not (ev & set(outside)) - {exclude} <= bound:
            return False
        if not ev <= local_bound(e.condition, bound):
            return False
    for op, t in agg.guards():
        if not isinstance(t, Variable) or t.name != exclude:
            if not variables(t) <= bound:
                return False
    return True


def bound_variables(body: tuple, outer=frozenset(), extra=frozenset()) -> set[str]:
    bound = set(outer)
    changed = True
    while changed:
        changed = False
        for i, lit in enumerate(body):
            new = binding_step(lit, bound, outside_variables(body, i, set(extra) | set(outer)))
            if new:
                bound |= new
                changed = True
    return bound


def unsafe_variables(body: tuple, required: set[str], outer=frozenset()) -> list[str]:
    bound = bound_variables(body, outer, required)
    needed = set(required)
    for lit in body:
        b = lit.body
        if isinstance(b, Aggregate):
            for e in b.elements:
                needed |= element_variables(e) - local_bound(e.condition, bound)
            for op, t in b.guards():
                needed |= variables(t)
        else:
            needed |= literal_variables(lit)
    return sorted(needed - bound)


def check_safety(stmt: Statement) -> None:
    if isinstance(stmt, Rule):
        required = set()
        if stmt.head is not None:
            for a in stmt.head.args:
                required |= variables(a)
        bad = unsafe_variables(stmt.body, required)
    elif isinstance(stmt, ShowDirective):
        bad = unsafe_variables(stmt.body, variables(stmt.term) if stmt.term is not None else set())
    elif isinstance(stmt, ChoiceRule):
        bad = unsafe_variables(stmt.body, set())
        outer = bound_variables(stmt.body)
        for e in stmt.elements:
            head_vars = set().union(*(variables(a) for a in e.atom.args)) if e.atom.args else set()
            bad += unsafe_variables(e.condition, head_vars, outer)
        for guard in (stmt.left, stmt.right):
            if guard is not None:
                term = guard[0] if guard is stmt.left else guard[1]
                bad += sorted(variables(term) - outer)
    elif isinstance(stmt, WeakConstraint):
        required = variables(stmt.weight)
        if stmt.level is not None:
            required |= variables(stmt.level)
        for t in stmt.terms:
            required |= variables(t)
        bad = unsafe_variables(stmt.body, required)
    else:
        return
    if bad:
        raise SafetyError(bad[0], stmt)


def parse_program(text: str, check: bool = True) -> Program:
    """Parse a program; ``%`` starts a line comment.  Raises AspSyntaxError."""
    program = _Parser(text).program()
    if check:
        for stmt in program.statements:
            check_safety(stmt)
    return program


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("eof")
    return t


def parse_facts(text: str) -> list[Atom]:
    """Parse a fact file into ground atoms; anything but ground facts is an error."""
    program = parse_program(text)
    atoms = []
    for stmt in program.statements:
        if not (isinstance(stmt, Rule) and stmt.kind == "fact"):
            raise AspSyntaxError(f"not a fact: {print_statement(stmt)}")
        if any(isinstance(s, (Variable, BinOp, UnaryOp, ExternalCall)) for a in stmt.head.args for s in subterms(a)):
            raise AspSyntaxError(f"fact is not ground: {print_statement(stmt)}")
        atoms.append(stmt.head)
    return atoms


# ---------------------------------------------------------------- printer

def print_literal(lit: Literal) -> str:
    b = lit.body
    if isinstance(b, Atom):
        s = str(b)
    elif isinstance(b, Comparison):
        s = f"{render_term(b.left)} {b.op} {render_term(b.right)}"
    else:
        s = print_aggregate(b)
    return f"not {s}" if lit.negated else s


def print_conjunction(lits) -> str:
    return ", ".join(print_literal(lit) for lit in lits)


def print_aggregate(agg: Aggregate) -> str:
    elems = []
    for e in agg.elements:
        s = ", ".join(render_term(t) for t in e.terms)
        if e.condition:
            s += " : " + print_conjunction(e.condition)
        elems.append(s)
    s = agg.function + "{" + "; ".join(elems) + "}"
    if agg.left is not None:
        s = f"{render_term(agg.left[0])} {agg.left[1]} {s}"
    if agg.right is not None:
        s = f"{s} {agg.right[0]} {render_term(agg.right[1])}"
    return s


def print_statement(stmt: Statement) -> str:
    if isinstance(stmt, Rule):
        head = str(stmt.head) if stmt.head is not None else ""
        if not stmt.body:
            return f"{head}."
        return f"{head} :- {print_conjunction(stmt.body)}." if head else f":- {print_conjunction(stmt.body)}."
    if isinstance(stmt, ShowDirective):
        if stmt.term is None:
            return "#show."
        s = f"#show {render_term(stmt.term)}"
        return s + (f" : {print_conjunction(stmt.body)}." if stmt.body else ".")
    if isinstance(stmt, ShowSignature):
        return f"#show {stmt.predicate}/{stmt.arity}."
    if isinstance(stmt, ChoiceRule):
        elems = []
        for e in stmt.elements:
            s = str(e.atom)
            if e.condition:
                s += " : " + print_conjunction(e.condition)
            elems.append(s)
        s = "{ " + "; ".join(elems) + " }"
        if stmt.left is not None:
            s = f"{render_term(stmt.left[0])} {stmt.left[1]} {s}"
        if stmt.right is not None:
            s = f"{s} {stmt.right[0]} {render_term(stmt.right[1])}"
        return s + (f" :- {print_conjunction(stmt.body)}." if stmt.body else ".")
    if isinstance(stmt, WeakConstraint):
        w = render_term(stmt.weight)
        if stmt.level is not None:
            w += f"@{render_term(stmt.level)}"
        parts = [w] + [render_term(t) for t in stmt.terms]
        return f":~ {print_conjunction(stmt.body)}. [{', '.join(parts)}]"
    raise TypeError(stmt)


def print_program(program: Program) -> str:
    return "\n".join(print_statement(s) for s in program.statements)
