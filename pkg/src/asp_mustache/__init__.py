"""ASP-driven Mustache templates, recipes over interpretations, and HTML emitters."""

from .builtins import EvalError
from .emitters import FRAMEWORKS, SchemaError, SideOutput, emit_html, validate_config
from .evaluator import Inconsistent, NeedsSolver, NotStratified, evaluate, project
from .interpretation import Interpretation, dump_blocks, parse_blocks
from .recipe import Recipe, RecipeError, load_recipe, parse_recipe, run
from .relaxed_json import RelaxedJSONError, parse_relaxed, to_strict
from .solver import ClingoClient, SolverError, SolverNotConfigured, solve_external
from .syntax import AspSyntaxError, parse_facts, parse_program, parse_term
from .template import TemplateError, expand, expand_stages
from .terms import compare_terms, render_term

__version__ = "0.1.0"

__all__ = [
    "AspSyntaxError",
    "ClingoClient",
    "EvalError",
    "FRAMEWORKS",
    "Inconsistent",
    "Interpretation",
    "NeedsSolver",
    "NotStratified",
    "Recipe",
    "RecipeError",
    "RelaxedJSONError",
    "SchemaError",
    "SideOutput",
    "SolverError",
    "SolverNotConfigured",
    "TemplateError",
    "compare_terms",
    "dump_blocks",
    "emit_html",
    "evaluate",
    "expand",
    "expand_stages",
    "load_recipe",
    "parse_blocks",
    "parse_facts",
    "parse_program",
    "parse_recipe",
    "parse_relaxed",
    "parse_term",
    "project",
    "render_term",
    "run",
    "solve_external",
    "to_strict",
    "validate_config",
]
