"""Interpreted string functions available to queries as ``@name(...)`` terms."""

from __future__ import annotations

import re
from decimal import Decimal

from .terms import Number, Real, String, Term, render_term


class EvalError(Exception):
    """A builtin or arithmetic failure; aborts the whole evaluation."""


_DIRECTIVE = re.compile(r"%(?P<flags>[-+ 0#]*)(?P<width>\d*)(?:\.(?P<prec>\d+))?(?P<conv>[sdif%])")


def string_join(sep: Term, *items: Term) -> String:
    return String(render_term(sep, True).join(render_term(x, True) for x in items))


def string_concat(*items: Term) -> String:
    return string_join(String(""), *items)


def string_format(fmt: Term, *args: Term) -> String:
    """printf-style formatting: ``%s``, ``%d``, ``%f``/``%.Nf`` and ``%%``.

    ``%s`` takes the top-level rendering of any term; ``%f`` accepts
    integers and reals and rounds half to even.
    """
    if not isinstance(fmt, String):
        raise EvalError(f"@string_format: format must be a string, got {render_term(fmt)}")
    text = fmt.value
    out, pos, used = [], 0, 0
    for m in _DIRECTIVE.finditer(text):
        _literal(out, text[pos:m.start()], text)
        pos = m.end()
        conv = m.group("conv")
        if conv == "%":
            out.append("%")
            continue
        if used >= len(args):
            raise EvalError(f"@string_format: not enough arguments for {text!r}")
        arg = args[used]
        used += 1
        flags, width = m.group("flags"), m.group("width")
        sign = "+" if "+" in flags else ""
        if conv == "s":
            value = render_term(arg, True)
            if m.group("prec") is not None:
                value = value[: int(m.group("prec"))]
            out.append(_justify(value, flags, width))
        elif conv in "di":
            if not isinstance(arg, Number):
                raise EvalError(f"@string_format: %{conv} expects an integer, got {render_term(arg)}")
            out.append(_justify(format(arg.value, sign + "d"), flags, width))
        else:
            if isinstance(arg, Number):
                value = Decimal(arg.value)
            elif isinstance(arg, Real):
                value = arg.value
            else:
                raise EvalError(f"@string_format: %f expects a number, got {render_term(arg)}")
            prec = m.group("prec") if m.group("prec") is not None else "6"
            out.append(_justify(format(value, f"{sign}.{prec}f"), flags, width))
    _literal(out, text[pos:], text)
    if used != len(args):
        raise EvalError(f"@string_format: {len(args)} arguments for {used} directives in {text!r}")
    return String("".join(out))


def _literal(out: list, chunk: str, text: str) -> None:
    if "%" in chunk:
        raise EvalError(f"@string_format: bad directive in {text!r}")
    out.append(chunk)


def _justify(text: str, flags: str, width: str) -> str:
    if not width:
        return text
    n = int(width)
    if "-" in flags:
        return text.ljust(n)
    if "0" in flags and text[:1] in "+-0123456789":
        sign = text[0] if text[0] in "+-" else ""
        return sign + text[len(sign):].rjust(n - len(sign), "0")
    return text.rjust(n)


BUILTINS = {
    "string_join": string_join,
    "string_concat": string_concat,
    "string_format": string_format,
}


def call_builtin(name: str, args) -> Term:
    try:
        fn = BUILTINS[name]
    except KeyError:
        raise EvalError(f"unknown builtin @{name}") from None
    if name == "string_join" and not args:
        raise EvalError("@string_join needs a separator")
    if name == "string_format" and not args:
        raise EvalError("@string_format needs a format string")
    return fn(*args)
