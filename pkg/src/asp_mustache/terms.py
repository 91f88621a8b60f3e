"""ASP terms, their total order, and canonical rendering."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from functools import cmp_to_key
from typing import Iterator, Union

REAL_NUMERAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


@dataclass(frozen=True)
class Number:
    value: int


@dataclass(frozen=True)
class Real:
    """A floating value written ``real("NUMBER")``; keeps the numeral text."""

    text: str
    value: Decimal = field(init=False, repr=False, compare=True)

    def __post_init__(self):
        if not REAL_NUMERAL.match(self.text):
            raise ValueError(f"not a decimal numeral: {self.text!r}")
        object.__setattr__(self, "value", Decimal(self.text))

    @classmethod
    def from_decimal(cls, d: Decimal) -> "Real":
        return cls(str(d))

    def __eq__(self, other):
        return isinstance(other, Real) and self.value == other.value

    def __hash__(self):
        return hash(("real", self.value))


@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class String:
    value: str


@dataclass(frozen=True)
class Function:
    """Compound term; an empty ``name`` makes it a tuple."""

    name: str
    args: tuple = ()

    @property
    def is_tuple(self) -> bool:
        return self.name == ""


@dataclass(frozen=True)
class Variable:
    name: str

    @property
    def anonymous(self) -> bool:
        return self.name == "_"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-" or "|" (absolute value)
    arg: "Term"


@dataclass(frozen=True)
class ExternalCall:
    """``@name(args)``: an interpreted string function."""

    name: str
    args: tuple = ()


Term = Union[Number, Real, Constant, String, Function, Variable, BinOp, UnaryOp, ExternalCall]
GROUND_VALUE_TYPES = (Number, Real, Constant, String, Function)


def make_tuple(*args: Term) -> Function:
    return Function("", tuple(args))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, (Function, ExternalCall)):
        for a in t.args:
            yield from subterms(a)
    elif isinstance(t, BinOp):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, UnaryOp):
        yield from subterms(t.arg)


def variables(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Variable) and not s.anonymous}


def is_ground(t: Term) -> bool:
    return not any(isinstance(s, Variable) for s in subterms(t))


def is_value(t: Term) -> bool:
    """True for ground terms built only from constructors (no arithmetic, no calls)."""
    return all(isinstance(s, GROUND_VALUE_TYPES) for s in subterms(t))


# ---------------------------------------------------------------- ordering

def _rank(t: Term) -> int:
    if isinstance(t, (Number, Real)):
        return 0
    if isinstance(t, Constant):
        return 1
    if isinstance(t, String):
        return 2
    if isinstance(t, Function):
        return 3
    raise TypeError(f"cannot order non-ground term {t!r}")


def _cmp(a, b) -> int:
    return (a > b) - (a < b)


def compare_terms(a: Term, b: Term) -> int:
    """Three-way comparison (-1, 0, 1) of two ground terms.

    Numbers < constants < strings < compounds.  Integers and reals are
    compared by value; on equal value the integer comes first.  Compounds
    compare by name, arity, then arguments; tuples have the empty name.
    """
    ra, rb = _rank(a), _rank(b)
    if ra != rb:
        return _cmp(ra, rb)
    if ra == 0:
        c = _cmp(a.value, b.value)
        if c:
            return c
        return _cmp(isinstance(a, Real), isinstance(b, Real))
    if ra == 1:
        return _cmp(a.name, b.name)
    if ra == 2:
        return _cmp(a.value, b.value)
    c = _cmp(a.name, b.name) or _cmp(len(a.args), len(b.args))
    if c:
        return c
    for x, y in zip(a.args, b.args):
        c = compare_terms(x, y)
        if c:
            return c
    return 0


term_key = cmp_to_key(compare_terms)


def sorted_terms(items) -> list:
    return sorted(items, key=term_key)


# --------------------------------------------------------------- rendering

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def quote(s: str) -> str:
    return '"' + "".join(_ESCAPES.get(c, c) for c in s) + '"'


_PREC = {"**": 4, "*": 3, "/": 3, "\\": 3, "+": 2, "-": 2}


def render_term(t: Term, top_level: bool = False) -> str:
    """Canonical text of a term.

    At top level strings lose their quotes and ``real("x")`` prints as ``x``.
    """
    if top_level:
        if isinstance(t, String):
            return t.value
        if isinstance(t, Real):
            return t.text
    if isinstance(t, Number):
        return str(t.value)
    if isinstance(t, Real):
        return f"real({quote(t.text)})"
    if isinstance(t, Constant):
        return t.name
    if isinstance(t, String):
        return quote(t.value)
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Function):
        inner = ",".join(render_term(a) for a in t.args)
        if t.is_tuple:
            return f"({inner},)" if len(t.args) == 1 else f"({inner})"
        return f"{t.name}({inner})" if t.args else t.name
    if isinstance(t, ExternalCall):
        return f"@{t.name}(" + ",".join(render_term(a) for a in t.args) + ")"
    if isinstance(t, UnaryOp):
        if t.op == "|":
            return f"|{render_term(t.arg)}|"
        inner = render_term(t.arg)
        if isinstance(t.arg, (BinOp, UnaryOp)) or inner.startswith("-"):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(t, BinOp):
        return f"{_render_operand(t.left, t.op, False)}{_pad(t.op)}{_render_operand(t.right, t.op, True)}"
    raise TypeError(f"not a term: {t!r}")


def _pad(op: str) -> str:
    return op if op == "**" else f" {op} "


def _render_operand(t: Term, parent: str, right: bool) -> str:
    s = render_term(t)
    if isinstance(t, BinOp):
        p, q = _PREC[t.op], _PREC[parent]
        # ** is right associative, everything else left associative
        if p < q or (p == q and (right != (parent == "**"))):
            s = f"({s})"
    return s
