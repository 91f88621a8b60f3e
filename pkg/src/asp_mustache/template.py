"""Mustache templates whose expressions are ASP queries.

A template is text with embedded expressions:

* ``{{ program }}`` renders the projected answer set of ``program`` joined
  with the facts of the interpretation;
* ``{{= H : B }}`` is short for ``{{ #show H : B. }}``;
* ``{{* program }}`` and ``{{+ H : B }}`` store their projection in the
  persistent array, which is prepended to every later query, and render
  nothing;
* ``{{-}}`` clears the persistent array.

Inside a query, ``{{"..."}}`` is a multiline string and ``{{f"..."}}`` an
f-string with ``${expr}`` / ``${expr:%fmt}`` interpolation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Iterable, Optional

from .builtins import EvalError
from .evaluator import NotStratified, ProjectedAnswer, evaluate, is_directive, project
from .syntax import AspSyntaxError, Atom, parse_program
from .terms import Function, Term, compare_terms, quote, render_term


class TemplateError(Exception):
    """An expansion failure, located in the template."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(where + message)


class NoConvergence(TemplateError):
    pass


# --------------------------------------------------------------- segments

@dataclass(frozen=True)
class Text:
    text: str
    start: int = 0

    @property
    def source(self) -> str:
        return self.text


@dataclass(frozen=True)
class Query:
    program_text: str
    shortcut: bool = False
    start: int = 0
    source: str = ""


@dataclass(frozen=True)
class PersistQuery(Query):
    pass


@dataclass(frozen=True)
class Reset:
    start: int = 0
    source: str = "{{-}}"


Segment = object  # Text | Query | PersistQuery | Reset

_OPENERS = {"=": (Query, True), "+": (PersistQuery, True), "*": (PersistQuery, False)}


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _string_region(text: str, i: int) -> Optional[int]:
    """Length of the opener if a multiline/f-string region starts at ``i``."""
    if text.startswith('{{"', i):
        return 3
    if text.startswith('{{f"', i):
        return 4
    return None


def _skip_region(text: str, i: int) -> int:
    """Index just past the ``"}}`` that closes the region opened at ``i``."""
    opener = _string_region(text, i)
    end = text.find('"}}', i + opener)
    if end < 0:
        line, col = _position(text, i)
        raise TemplateError("unterminated multiline string or f-string", line, col)
    return end + 3


def _skip_asp_string(text: str, i: int) -> int:
    j = i + 1
    while j < len(text):
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == '"':
            return j + 1
        if c == "\n":
            break
        j += 1
    line, col = _position(text, i)
    raise TemplateError("unterminated string in query", line, col)


def _query_end(text: str, i: int) -> int:
    """Given the index after an opener, return the index of the closing ``}}``."""
    depth, braces = 1, 0
    while i < len(text):
        if _string_region(text, i):
            i = _skip_region(text, i)
        elif text[i] == '"':
            i = _skip_asp_string(text, i)
        elif text.startswith("{{", i):
            depth += 1
            i += 2
        elif text[i] == "{":
            braces += 1
            i += 1
        elif text[i] == "}":
            if braces:
                braces -= 1
                i += 1
            elif text.startswith("}}", i):
                depth -= 1
                if depth == 0:
                    return i
                i += 2
            else:
                i += 1
        else:
            i += 1
    return -1


def tokenize(template: str) -> list:
    """Split a template into Text, Query, PersistQuery and Reset segments.

    Concatenating the ``source`` of the segments gives back ``template``.
    """
    segments = []
    pos = 0
    while pos < len(template):
        start = template.find("{{", pos)
        while start >= 0 and template.startswith("{", start + 2):
            start += 1
        if start < 0:
            segments.append(Text(template[pos:], pos))
            break
        if start > pos:
            segments.append(Text(template[pos:start], pos))
        if template.startswith("{{-}}", start):
            segments.append(Reset(start))
            pos = start + 5
            continue
        kind, shortcut = _OPENERS.get(template[start + 2: start + 3], (Query, False))
        body_start = start + (3 if template[start + 2: start + 3] in _OPENERS else 2)
        end = _query_end(template, body_start)
        if end < 0:
            line, col = _position(template, start)
            raise TemplateError("unbalanced '{{': no matching '}}'", line, col)
        segments.append(kind(template[body_start:end], shortcut, start, template[start:end + 2]))
        pos = end + 2
    return segments


def has_expressions(template: str) -> bool:
    return any(not isinstance(s, Text) for s in tokenize(template))


# ---------------------------------------------------------------- strings

_FORMAT = re.compile(r"%?[-+ 0#]*\d*(?:\.\d+)?[sdif]\Z")


def lower_fstring(content: str) -> str:
    fmt, args = [], []
    i = 0
    while i < len(content):
        if content.startswith("$$", i):
            fmt.append("$")
            i += 2
        elif content.startswith("${", i):
            end = content.find("}", i + 2)
            nested = content.find("${", i + 2)
            if end < 0:
                raise TemplateError(f"unterminated interpolation in f-string: {content[i:i + 20]!r}")
            if 0 <= nested < end:
                raise TemplateError(f"nested interpolation in f-string: {content[i:end + 1]!r}")
            expr, directive = content[i + 2:end], "%s"
            head, sep, tail = expr.rpartition(":")
            if sep and _FORMAT.match(tail.strip()):
                expr, directive = head, tail.strip()
                if not directive.startswith("%"):
                    directive = "%" + directive
            if not expr.strip():
                raise TemplateError("empty interpolation in f-string")
            fmt.append(directive)
            args.append(expr.strip())
            i = end + 1
        else:
            c = content[i]
            fmt.append("%%" if c == "%" else c)
            i += 1
    return "@string_format(" + ", ".join([quote("".join(fmt))] + args) + ")"


def lower_strings(query_text: str) -> str:
    """Replace ``{{"..."}}`` with quoted strings and ``{{f"..."}}`` with ``@string_format`` terms."""
    out = []
    i = 0
    while i < len(query_text):
        opener = _string_region(query_text, i)
        if opener:
            end = _skip_region(query_text, i)
            content = query_text[i + opener:end - 3]
            out.append(quote(content) if opener == 3 else lower_fstring(content))
            i = end
        elif query_text[i] == '"':
            end = _skip_asp_string(query_text, i)
            out.append(query_text[i:end])
            i = end
        else:
            out.append(query_text[i])
            i += 1
    return "".join(out)


def query_program(segment: Query) -> str:
    """The ASP program a query segment stands for, strings lowered."""
    text = lower_strings(segment.program_text)
    if segment.shortcut:
        body = text.strip()
        if body.endswith("."):
            body = body[:-1]
        return f"#show {body}."
    return text


# ------------------------------------------------------------- rendering

@dataclass
class RenderDirectives:
    separator: str = "\n"
    term_separator: str = ", "
    prefix: str = ""
    suffix: str = ""
    sort_keys: list = field(default_factory=list)

    @classmethod
    def from_atoms(cls, *groups: Iterable[Term]) -> "RenderDirectives":
        """Build directives from groups of reserved atoms; later groups override earlier ones.

        Two distinct values for the same directive within one group is an error.
        """
        out = cls()
        for group in groups:
            seen: dict = {}
            keys = []
            for t in group:
                name, value = t.name, t.args[0]
                if name == "sort":
                    if not hasattr(value, "value") or not isinstance(value.value, int) or value.value == 0:
                        raise TemplateError(f"sort/1 expects a non-zero integer index, got {render_term(value)}")
                    if value.value not in keys:
                        keys.append(value.value)
                    continue
                text = render_term(value, True)
                if name in seen and seen[name] != text:
                    raise TemplateError(f"contradictory {name}/1 values: {seen[name]!r} and {text!r}")
                seen[name] = text
            for name, text in seen.items():
                setattr(out, name, text)
            out.sort_keys = out.sort_keys + [k for k in keys if k not in out.sort_keys]
        return out


def _components(obj: Term) -> tuple:
    if isinstance(obj, Function):
        return obj.args
    return (obj,)


def _render_tuple(obj: Term) -> list[str]:
    if isinstance(obj, Function) and obj.name == "show" and obj.args:
        first = obj.args[0]
        if isinstance(first, Function) and first.is_tuple:
            return [render_term(t, True) for t in first.args]
        return [render_term(first, True)]
    if isinstance(obj, Function) and obj.is_tuple:
        return [render_term(t, True) for t in obj.args]
    return [render_term(obj, True)]


def sort_objects(objects: Iterable[Term], sort_keys: list) -> list:
    """Order by the sort keys in turn, then by the term order on whole objects.

    Key ``i`` compares the ``|i|``-th component, descending when negative.
    An object lacking that component sorts before those having it.
    """
    def cmp(a: Term, b: Term) -> int:
        ca, cb = _components(a), _components(b)
        for k in sort_keys:
            i = abs(k) - 1
            ha, hb = i < len(ca), i < len(cb)
            if ha and hb:
                c = compare_terms(ca[i], cb[i])
            else:
                c = (ha > hb) - (ha < hb)
            if c:
                return c if k > 0 else -c
        return compare_terms(a, b)

    return sorted(set(objects), key=cmp_to_key(cmp))


def render_projection(objects: Iterable[Term], directives: RenderDirectives) -> str:
    """Render shown objects as text: one tuple per separator, terms joined by the term separator."""
    ordered = sort_objects(objects, directives.sort_keys)
    return directives.separator.join(
        directives.prefix + directives.term_separator.join(_render_tuple(o)) + directives.suffix
        for o in ordered
    )


# -------------------------------------------------------------- expansion

@dataclass
class PersistentArray:
    entries: list = field(default_factory=list)

    def extend(self, objects: Iterable[Term]) -> None:
        for o in objects:
            if o not in self.entries:
                self.entries.append(o)

    def clear(self) -> None:
        self.entries.clear()


def run_query(program_text: str, interpretation: Iterable[Atom], solver=None) -> ProjectedAnswer:
    """Evaluate one query program against an interpretation."""
    program = parse_program(program_text)
    try:
        answer = evaluate(program, interpretation)
    except NotStratified:
        if solver is None:
            raise
        return solver.query(program, interpretation)
    return project(answer, program)


def expand_once(template: str, interpretation, state: Optional[PersistentArray] = None, solver=None) -> str:
    """Expand every expression of ``template`` once."""
    state = state if state is not None else PersistentArray()
    out = []
    for seg in tokenize(template):
        if isinstance(seg, Text):
            out.append(seg.text)
            continue
        if isinstance(seg, Reset):
            state.clear()
            continue
        try:
            answer = run_query(query_program(seg), interpretation, solver)
            if isinstance(seg, PersistQuery):
                state.extend(answer.renderables)
                state.extend(t for _, t in answer.directives)
                continue
            persisted = [t for t in state.entries if not is_directive(t)]
            directives = RenderDirectives.from_atoms(
                [t for t in state.entries if is_directive(t)],
                [t for _, t in answer.directives],
            )
            out.append(render_projection(persisted + list(answer.renderables), directives))
        except TemplateError as e:
            line, col = _position(template, seg.start)
            raise TemplateError(e.message, line, col) from e
        except (AspSyntaxError, EvalError) as e:
            line, col = _position(template, seg.start)
            raise TemplateError(f"in {seg.source.strip()[:60]!r}: {e}", line, col) from e
    return "".join(out)


def expand_stages(template: str, interpretation, multi_stage: bool = False, max_stages: int = 10, solver=None) -> list[str]:
    """Outputs of each expansion stage; the last one is the result."""
    if max_stages < 1:
        raise ValueError("max_stages must be at least 1")
    stages = []
    current = template
    while True:
        result = expand_once(current, interpretation, PersistentArray(), solver)
        stages.append(result)
        if not multi_stage or result == current or not has_expressions(result):
            return stages
        if len(stages) >= max_stages:
            raise NoConvergence(f"expressions remain after {max_stages} stages")
        current = result


def expand(template: str, interpretation, multi_stage: bool = False, max_stages: int = 10, solver=None) -> str:
    """Expand ``template`` against ``interpretation``.

    With ``multi_stage`` the output is expanded again, with a fresh
    persistent array, until no expressions remain.
    """
    return expand_stages(template, interpretation, multi_stage, max_stages, solver)[-1]
