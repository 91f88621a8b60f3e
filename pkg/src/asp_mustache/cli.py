"""Command-line interface.

Exit codes: 0 success, 1 evaluation or template error, 2 usage or I/O
error, 3 an external solver is needed but none is configured, 10 the
program has no answer set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .builtins import EvalError
from .evaluator import Inconsistent, NotStratified, evaluate, projected_atoms
from .interpretation import Interpretation, dump_blocks
from .recipe import RecipeError, load_recipe, run
from .relaxed_json import RelaxedJSONError, loads_strict, parse_relaxed, to_strict
from .solver import SOLVER_ENV, ClingoClient, SolverError, SolverNotConfigured
from .syntax import AspSyntaxError, parse_program
from .template import TemplateError, expand

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_NO_SOLVER, EXIT_UNSAT = 0, 1, 2, 3, 10

_EPILOG = f"""\
exit codes:
  0   success
  1   evaluation, template or recipe error
  2   usage or I/O error
  3   an external solver is needed but none is configured
  10  unsatisfiable (solve only)

The solver is a command such as "clingo" or "python3 -m clingo"; it can
also be given through the {SOLVER_ENV} environment variable.
"""


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise _Fail(EXIT_USAGE, f"cannot read {path}: {getattr(e, 'strerror', None) or e}") from None


def _write(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise _Fail(EXIT_USAGE, f"cannot write {path}: {e.strerror}") from None


def _solver(args):
    command = args.solver or os.environ.get(SOLVER_ENV)
    return ClingoClient(command) if command else None


def _facts(path: str) -> Interpretation:
    try:
        return Interpretation.parse(_read(path))
    except AspSyntaxError as e:
        raise _Fail(EXIT_ERROR, f"{path}:{e}") from None


def cmd_render(args) -> int:
    facts = _facts(args.facts)
    template = _read(args.template)
    try:
        text = expand(template, facts, args.multi_stage, args.max_stages, _solver(args))
    except TemplateError as e:
        cause = e.__cause__
        if isinstance(cause, NotStratified) and _solver(args) is None:
            raise _Fail(EXIT_NO_SOLVER, f"{args.template}:{e}") from None
        raise _Fail(EXIT_ERROR, f"{args.template}:{e}") from None
    _write(args.output, text)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        recipe = load_recipe(args.recipe)
    except OSError as e:
        raise _Fail(EXIT_USAGE, f"cannot read {args.recipe}: {e.strerror}") from None
    text = _read(args.input)
    result = run(recipe, text, _solver(args), args.max_stages)
    if result.side_outputs:
        out = Path(args.out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            for side in result.side_outputs:
                (out / side.name).write_bytes(side.data)
        except OSError as e:
            raise _Fail(EXIT_USAGE, f"cannot write side outputs to {out}: {e.strerror}") from None
    output = result.output()
    if not result.decode and output:
        output += "\n"
    _write(args.output, output)
    return EXIT_OK


def cmd_json(args) -> int:
    text = _read(args.file)
    try:
        value = parse_relaxed(text) if args.relaxed else loads_strict(text)
    except ValueError as e:
        raise _Fail(EXIT_ERROR, f"{args.file}:{e}") from None
    _write(args.output, to_strict(value) + "\n")
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        program = parse_program(_read(args.program))
    except AspSyntaxError as e:
        raise _Fail(EXIT_ERROR, f"{args.program}:{e}") from None
    facts = Interpretation()
    for path in args.facts:
        facts = facts | _facts(path)
    try:
        models = [projected_atoms(evaluate(program, facts), program)]
    except Inconsistent:
        models = []
    except NotStratified:
        solver = _solver(args)
        if solver is None:
            raise SolverNotConfigured("this program needs an external solver (use --solver)") from None
        models = solver.search(program, facts, args.models, args.optimize)
    if not models:
        return EXIT_UNSAT
    _write(args.output, dump_blocks(models) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asp-mustache",
        description="Render ASP-driven Mustache templates and run recipes over interpretations.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, solver=True):
        p.add_argument("-o", "--output", help="write the result here instead of stdout")
        if solver:
            p.add_argument("--solver", help=f"external solver command (default: ${SOLVER_ENV})")

    p = sub.add_parser("render", help="expand a template against a fact file", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("facts", help="fact file defining the interpretation ('-' for stdin)")
    p.add_argument("template", help="template file")
    p.add_argument("--multi-stage", action="store_true", help="expand repeatedly until no expressions remain")
    p.add_argument("--max-stages", type=_positive, default=10, help="stage limit for --multi-stage (default 10)")
    common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("run", help="run a recipe", epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("recipe", help="recipe file (relaxed JSON)")
    p.add_argument("input", nargs="?", default="-", help="recipe input ('-' or omitted for stdin)")
    p.add_argument("--out-dir", default=".", help="directory for side outputs (created if absent)")
    p.add_argument("--max-stages", type=_positive, default=10, help="stage limit for multi-stage templates")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("json", help="convert JSON to compact strict JSON", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("file", help="input file ('-' for stdin)")
    p.add_argument("--relaxed", action="store_true", help="accept relaxed JSON input")
    common(p, solver=False)
    p.set_defaults(func=cmd_json)

    p = sub.add_parser("solve", help="print the (projected) answer sets of a program", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("program", help="program file")
    p.add_argument("facts", nargs="*", help="extra fact files")
    p.add_argument("-n", "--models", type=_count, default=1, help="number of models, 0 for all (default 1)")
    p.add_argument("--optimize", action="store_true", help="keep optimal models only")
    common(p)
    p.set_defaults(func=cmd_solve)
    return parser


def _positive(text: str) -> int:
    value = _count(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must not be negative")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as e:
        print(f"asp-mustache: {e}", file=sys.stderr)
        return e.code
    except SolverNotConfigured as e:
        print(f"asp-mustache: {e}", file=sys.stderr)
        print(f"asp-mustache: pass --solver or set {SOLVER_ENV}, e.g. --solver clingo", file=sys.stderr)
        return EXIT_NO_SOLVER
    except (RecipeError, SolverError, RelaxedJSONError, EvalError) as e:
        if isinstance(e.__cause__, SolverNotConfigured):
            print(f"asp-mustache: {e}", file=sys.stderr)
            return EXIT_NO_SOLVER
        print(f"asp-mustache: {e}", file=sys.stderr)
        return EXIT_ERROR
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
