"""Recipes: pipelines of operations over sequences of interpretations.

A recipe file is relaxed JSON::

    {
      encode: false,
      decode: false,
      ingredients: [
        { operation: "search_models", program: "file:clique.lp", n: 1 },
        { operation: "encode", predicate: "chart", content: "file:chart.tpl" },
        { operation: "chartjs", predicate: "chart", multi_stage: false },
      ]
    }

String parameters of the form ``file:<path>`` are read from disk, relative
to the recipe file.  Side outputs are named
``NNN-<operation>-<interpretation>-<atom>.<ext>`` where ``NNN`` is the
zero-padded ingredient index; all indexes start at 0.
"""

from __future__ import annotations

import base64
import binascii
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .emitters import FRAMEWORKS, SideOutput, emit_html, emit_json, validate_config
from .evaluator import Inconsistent, NotStratified, evaluate, projected_atoms
from .interpretation import Interpretation, dump_blocks, parse_blocks
from .relaxed_json import parse_relaxed
from .solver import SolverNotConfigured
from .syntax import BASE64, Atom, Program, parse_program
from .template import TemplateError, expand
from .terms import String, quote

__all__ = [
    "Ingredient",
    "OPERATIONS",
    "Recipe",
    "RecipeError",
    "RunResult",
    "b64decode",
    "b64encode",
    "decode_text",
    "load_recipe",
    "parse_recipe",
    "run",
]

_PREDICATE = re.compile(r"_*[a-z][A-Za-z0-9_']*\Z")


class RecipeError(Exception):
    """A recipe failed to load, or an ingredient failed while running."""

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        prefix = f"ingredient {step}: " if step is not None else ""
        super().__init__(prefix + message)


def b64encode(text: str) -> str:
    return base64.b64encode(text.encode("utf-8")).decode("ascii")


def b64decode(data: str) -> str:
    try:
        return base64.b64decode(data.encode("ascii"), validate=True).decode("utf-8")
    except (binascii.Error, UnicodeError) as e:
        raise ValueError(f"invalid Base64 payload {data[:40]!r}: {e}") from None


# -------------------------------------------------------------- parameters

@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # predicate | program | text | count | bool
    default: object = None
    required: bool = False


@dataclass(frozen=True)
class Operation:
    name: str
    params: tuple
    apply: Callable


@dataclass(frozen=True)
class Ingredient:
    operation: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Recipe:
    encode: bool = False
    decode: bool = False
    ingredients: tuple = ()


@dataclass
class RunResult:
    interpretations: list
    side_outputs: list
    decode: bool = False

    def output(self) -> str:
        """The final interpretations as fact blocks, decoded if the recipe asks for it."""
        text = dump_blocks(self.interpretations)
        return decode_text(text) if self.decode else text


@dataclass
class Context:
    solver: object = None
    max_stages: int = 10
    step: int = 0


def _convert(param: Param, value, step: int):
    def bad(expected):
        return RecipeError(f"parameter {param.name!r} must be {expected}, got {value!r}", step)

    if param.kind == "bool":
        if not isinstance(value, bool):
            raise bad("a boolean")
        return value
    if param.kind == "count":
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise bad("a non-negative integer")
        return value
    if not isinstance(value, str):
        raise bad("a string")
    if param.kind == "predicate":
        if not _PREDICATE.match(value):
            raise bad("a predicate name")
        return value
    if param.kind == "program":
        try:
            return parse_program(value)
        except ValueError as e:
            raise RecipeError(f"program: {e}", step) from None
    return value


# -------------------------------------------------------------- operations

def op_encode(interps: list, predicate: str, content: str, ctx: Context):
    atom = Atom(predicate, (String(b64encode(content)),))
    return [i | [atom] for i in interps], []


def _answer_sets(program: Program, interp: Interpretation, n: int, optimize: bool, ctx: Context) -> list:
    try:
        answer = evaluate(program, interp)
    except Inconsistent:
        return []
    except NotStratified:
        if ctx.solver is None:
            raise SolverNotConfigured("this program needs an external solver (use --solver)") from None
        return ctx.solver.search(program, interp, n, optimize)
    return [projected_atoms(answer, program)]


def op_search_models(interps: list, program: Program, n: int, ctx: Context):
    out = []
    for interp in interps:
        out.extend(_answer_sets(program, interp, n, False, ctx))
    return out, []


def op_optimize(interps: list, program: Program, n: int, ctx: Context):
    out = []
    for interp in interps:
        out.extend(_answer_sets(program, interp, n, True, ctx))
    return out, []


def _framework(name: str):
    def apply(interps: list, predicate: str, multi_stage: bool, ctx: Context):
        outputs = []
        for i, interp in enumerate(interps):
            for j, atom in enumerate(interp.with_predicate(predicate, 1)):
                where = f"interpretation {i}, atom {atom}"
                try:
                    arg = atom.args[0]
                    if not isinstance(arg, String):
                        raise ValueError("the argument must be a Base64 string")
                    template = b64decode(arg.value)
                    text = expand(template, interp, multi_stage, ctx.max_stages, ctx.solver)
                    config = validate_config(name, parse_relaxed(text))
                except SolverNotConfigured:
                    raise
                except TemplateError as e:
                    if isinstance(e.__cause__, NotStratified) and ctx.solver is None:
                        raise SolverNotConfigured(f"{where}: a query needs an external solver (use --solver)") from e
                    raise RecipeError(f"{where}: {e}", ctx.step) from e
                except Exception as e:
                    raise RecipeError(f"{where}: {e}", ctx.step) from e
                stem = f"{ctx.step:03d}-{name}-{i}-{j}"
                outputs.append(emit_json(config, stem + ".json"))
                outputs.append(emit_html(name, config, stem + ".html", title=f"{name} {i}-{j}"))
        return interps, outputs

    return apply


OPERATIONS: dict[str, Operation] = {
    "encode": Operation("encode", (Param("predicate", "predicate", required=True), Param("content", "text", "")), op_encode),
    "search_models": Operation(
        "search_models", (Param("program", "program", required=True), Param("n", "count", 1)), op_search_models
    ),
    "optimize": Operation("optimize", (Param("program", "program", required=True), Param("n", "count", 1)), op_optimize),
}
for _name in FRAMEWORKS:
    OPERATIONS[_name] = Operation(
        _name, (Param("predicate", "predicate", required=True), Param("multi_stage", "bool", False)), _framework(_name)
    )


# ------------------------------------------------------------------ loading

def _resolve(value, base: Optional[Path], step: int):
    if isinstance(value, str) and value.startswith("file:"):
        path = Path(value[5:])
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise RecipeError(f"cannot read {path}: {e.strerror}", step) from None
    return value


def make_ingredient(operation: str, params: dict, step: int = 0, base: Optional[Path] = None) -> Ingredient:
    if operation not in OPERATIONS:
        raise RecipeError(f"unknown operation {operation!r}", step)
    spec = OPERATIONS[operation]
    known = {p.name for p in spec.params}
    extra = sorted(set(params) - known)
    if extra:
        raise RecipeError(f"unknown parameter {extra[0]!r} for {operation}", step)
    checked = {}
    for p in spec.params:
        if p.name in params:
            checked[p.name] = _convert(p, _resolve(params[p.name], base, step), step)
        elif p.required:
            raise RecipeError(f"missing parameter {p.name!r} for {operation}", step)
        else:
            checked[p.name] = p.default
    return Ingredient(operation, checked)


def parse_recipe(text: str, base: Optional[Path] = None) -> Recipe:
    """Load and validate a recipe from relaxed JSON text."""
    try:
        doc = parse_relaxed(text)
    except ValueError as e:
        raise RecipeError(f"recipe: {e}") from None
    if not isinstance(doc, dict):
        raise RecipeError("recipe must be an object")
    extra = sorted(set(doc) - {"encode", "decode", "ingredients"})
    if extra:
        raise RecipeError(f"unknown recipe member {extra[0]!r}")
    encode, decode = doc.get("encode", False), doc.get("decode", False)
    if not isinstance(encode, bool) or not isinstance(decode, bool):
        raise RecipeError("encode and decode must be booleans")
    items = doc.get("ingredients", [])
    if not isinstance(items, list):
        raise RecipeError("ingredients must be an array")
    ingredients = []
    for step, item in enumerate(items):
        if not isinstance(item, dict) or not isinstance(item.get("operation"), str):
            raise RecipeError("each ingredient needs an operation name", step)
        params = {k: v for k, v in item.items() if k != "operation"}
        ingredients.append(make_ingredient(item["operation"], params, step, base))
    return Recipe(encode, decode, tuple(ingredients))


def load_recipe(path) -> Recipe:
    path = Path(path)
    return parse_recipe(path.read_text(encoding="utf-8"), path.parent)


# ------------------------------------------------------------------ running

_B64 = re.escape(BASE64) + r'\("((?:[^"\\]|\\.)*)"\)'
# a whole fact line first, otherwise any occurrence
_B64_OCCURRENCE = re.compile(rf"^{_B64}\.$|{_B64}", re.M)


def decode_text(text: str) -> str:
    """Replace ``__base64__("s")`` by the decoded ``s``.

    A line holding only such a fact is replaced as a whole, so that an
    encoded input comes back byte for byte.  Decoded text is not scanned
    again.
    """
    return _B64_OCCURRENCE.sub(lambda m: b64decode(m.group(1) if m.group(1) is not None else m.group(2)), text)


def initial_interpretations(recipe: Recipe, input_text: str) -> list:
    if recipe.encode:
        return [Interpretation([Atom(BASE64, (String(b64encode(input_text)),))])]
    return parse_blocks(input_text)


def run(recipe: Recipe, input_text: str, solver=None, max_stages: int = 10) -> RunResult:
    """Apply the ingredients of ``recipe`` left to right."""
    try:
        interps = initial_interpretations(recipe, input_text)
    except ValueError as e:
        raise RecipeError(f"input: {e}") from None
    outputs: list[SideOutput] = []
    ctx = Context(solver, max_stages)
    for step, ingredient in enumerate(recipe.ingredients):
        ctx.step = step
        op = OPERATIONS[ingredient.operation]
        try:
            interps, side = op.apply(interps, **ingredient.params, ctx=ctx)
        except (RecipeError, SolverNotConfigured):
            raise
        except Exception as e:
            raise RecipeError(f"{ingredient.operation}: {e}", step) from e
        outputs.extend(side)
    return RunResult(interps, outputs, recipe.decode)


def encoded_fact(text: str) -> str:
    return f"{BASE64}({quote(b64encode(text))})."
