"""Relaxed JSON: a permissive JSON dialect for framework configurations.

Beyond strict JSON the parser accepts

* unquoted object keys and bare-word string values (``{ group: in }``);
* single-quoted strings;
* trailing commas, and elements separated by whitespace alone;
* ``//`` line comments and ``/* */`` block comments.

A bare word runs until whitespace or one of ``,:[]{}``; it is a number,
``true``, ``false`` or ``null`` when it spells one, and a string otherwise.
Numbers keep their decimal text: integers become ``int``, everything else
``Decimal``.  Objects preserve key order; a repeated key is an error.
"""

from __future__ import annotations

import re
from decimal import Decimal

__all__ = ["RelaxedJSONError", "parse_relaxed", "to_strict", "loads_strict"]

MAX_DEPTH = 128

_NUMBER = re.compile(r"-?(0|[1-9]\d*)(\.\d+)?([eE][+-]?\d+)?\Z")
_STRUCTURAL = set(",:[]{}")
_ESCAPES = {'"': '"', "'": "'", "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}


class RelaxedJSONError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{self.line}:{self.column}: {message}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: int = None):
        raise RelaxedJSONError(message, self.text, self.pos if pos is None else pos)

    def skip(self) -> None:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\r\n﻿":
                self.pos += 1
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.pos = len(text) if end < 0 else end + 1
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    self.error("unterminated comment")
                self.pos = end + 2
            else:
                return

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def document(self):
        value = self.value(0)
        if self.peek():
            self.error(f"unexpected {self.peek()!r} after value")
        return value

    def value(self, depth: int):
        if depth > MAX_DEPTH:
            self.error("nesting too deep")
        c = self.peek()
        if not c:
            self.error("unexpected end of input")
        if c == "{":
            return self.obj(depth)
        if c == "[":
            return self.array(depth)
        if c in "\"'":
            return self.string()
        if c in _STRUCTURAL:
            self.error(f"unexpected {c!r}")
        return self.word()

    def elements(self, close: str, depth: int, item):
        """Comma-or-whitespace separated items up to ``close``; trailing comma allowed."""
        self.pos += 1
        comma = True
        while True:
            c = self.peek()
            if c == close:
                self.pos += 1
                return
            if not c:
                self.error(f"expected {close!r}")
            if c == ",":
                if comma:
                    self.error("unexpected ','")
                comma = True
                self.pos += 1
                continue
            item(depth + 1)
            comma = False

    def obj(self, depth: int) -> dict:
        out: dict = {}

        def member(d):
            start = self.pos
            key = self.key()
            if self.peek() != ":":
                self.error("expected ':' after object key")
            self.pos += 1
            if key in out:
                self.error(f"duplicate key {key!r}", start)
            out[key] = self.value(d)

        self.elements("}", depth, member)
        return out

    def array(self, depth: int) -> list:
        out: list = []
        self.elements("]", depth, lambda d: out.append(self.value(d)))
        return out

    def key(self) -> str:
        c = self.peek()
        if c in "\"'":
            return self.string()
        if not c or c in _STRUCTURAL:
            self.error("expected an object key")
        return self.bare()

    def bare(self) -> str:
        start = self.pos
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c.isspace() or c in _STRUCTURAL:
                break
            if text.startswith("//", self.pos) or text.startswith("/*", self.pos):
                break
            self.pos += 1
        return text[start:self.pos]

    def word(self):
        start = self.pos
        w = self.bare()
        if not w:
            self.error("expected a value", start)
        if w == "true":
            return True
        if w == "false":
            return False
        if w == "null":
            return None
        if _NUMBER.match(w):
            if re.fullmatch(r"-?\d+", w):
                return int(w)
            return Decimal(w)
        return w

    def string(self) -> str:
        quote_char = self.text[self.pos]
        start = self.pos
        self.pos += 1
        out = []
        text = self.text
        while True:
            if self.pos >= len(text):
                self.error("unterminated string", start)
            c = text[self.pos]
            if c == quote_char:
                self.pos += 1
                return "".join(out)
            if c == "\\":
                if self.pos + 1 >= len(text):
                    self.error("unterminated string", start)
                e = text[self.pos + 1]
                if e == "u":
                    digits = text[self.pos + 2:self.pos + 6]
                    if not re.fullmatch(r"[0-9a-fA-F]{4}", digits):
                        self.error("bad \\u escape")
                    code = int(digits, 16)
                    self.pos += 6
                    # combine surrogate pairs
                    if 0xD800 <= code < 0xDC00 and text.startswith("\\u", self.pos):
                        low = text[self.pos + 2:self.pos + 6]
                        if re.fullmatch(r"[0-9a-fA-F]{4}", low) and 0xDC00 <= int(low, 16) < 0xE000:
                            code = 0x10000 + ((code - 0xD800) << 10) + (int(low, 16) - 0xDC00)
                            self.pos += 6
                    out.append(chr(code))
                    continue
                if e not in _ESCAPES:
                    self.error(f"bad escape \\{e}")
                out.append(_ESCAPES[e])
                self.pos += 2
                continue
            out.append(c)
            self.pos += 1


def parse_relaxed(text) -> object:
    """Parse relaxed JSON into Python values (dict, list, str, int, Decimal, bool, None)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise RelaxedJSONError(f"input is not UTF-8: {e.reason}", "", e.start) from None
    return _Parser(text).document()


def _string(s: str) -> str:
    out = ['"']
    for c in s:
        if c == '"':
            out.append('\\"')
        elif c == "\\":
            out.append("\\\\")
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif c == "\b":
            out.append("\\b")
        elif c == "\f":
            out.append("\\f")
        elif ord(c) < 0x20 or 0xD800 <= ord(c) < 0xE000:
            out.append(f"\\u{ord(c):04x}")
        else:
            out.append(c)
    out.append('"')
    return "".join(out)


def _number(n) -> str:
    if isinstance(n, Decimal):
        if not n.is_finite():
            raise ValueError(f"{n} has no JSON representation")
        return str(n)
    if isinstance(n, float):
        if n != n or n in (float("inf"), float("-inf")):
            raise ValueError(f"{n} has no JSON representation")
        return repr(n)
    return str(int(n))


def to_strict(v) -> str:
    """Serialize to compact RFC 8259 JSON, preserving key order."""
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, str):
        return _string(v)
    if isinstance(v, (int, float, Decimal)):
        return _number(v)
    if isinstance(v, dict):
        return "{" + ",".join(f"{_string(str(k))}:{to_strict(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(to_strict(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def loads_strict(text: str):
    """Strict JSON with the same value model as parse_relaxed."""
    import json

    def pairs(items):
        out = {}
        for k, x in items:
            if k in out:
                raise RelaxedJSONError(f"duplicate key {k!r}")
            out[k] = x
        return out

    def constant(name):
        raise RelaxedJSONError(f"{name} is not valid JSON")

    return json.loads(text, parse_float=Decimal, object_pairs_hook=pairs, parse_constant=constant)
