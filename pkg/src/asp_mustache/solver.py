"""Client for an external ASP solver speaking clingo's JSON output format.

Programs go to the solver on standard input with their ``#show``
directives removed, so every witness is a complete answer set.  Projection
then happens in-process, exactly as for stratified programs, which keeps
``@``-functions and show-tuples out of the solver's way.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

from .evaluator import ProjectedAnswer, project, projected_atoms
from .interpretation import Interpretation
from .syntax import Atom, Program, ShowDirective, ShowSignature, parse_facts, print_program
from .terms import term_key

SOLVER_ENV = "ASP_MUSTACHE_SOLVER"

# clingo reports SAT/UNSAT/optimum in its exit code bits; the Python
# frontend always exits 0.
_OK_EXIT = {0, 10, 20, 30}


class SolverError(Exception):
    """The solver could not be run or its output could not be understood."""


class SolverNotConfigured(SolverError):
    """Search was needed but no solver command is available."""


@dataclass(frozen=True)
class Model:
    atoms: tuple
    costs: tuple = ()


def _canonical(atoms: Iterable[Atom]) -> tuple:
    return tuple(sorted(atoms, key=lambda a: term_key(a.to_term())))


def parse_witnesses(output: str, optimize: bool = False) -> list[Model]:
    """Models from clingo's ``--outf=2`` document.

    With ``optimize`` only witnesses carrying the final cost are kept.
    Repeated witnesses (optN reports the first optimum twice) are dropped.
    """
    try:
        doc = json.loads(output)
        calls = doc.get("Call", [])
        witnesses = [w for call in calls for w in call.get("Witnesses", [])]
    except (ValueError, AttributeError, TypeError) as e:
        raise SolverError(f"malformed solver output: {e}") from None
    final = tuple(doc.get("Models", {}).get("Costs", ()))
    seen, models = set(), []
    for w in witnesses:
        costs = tuple(w.get("Costs", ()))
        if optimize and costs != final:
            continue
        try:
            atoms = _canonical(parse_facts("".join(v + "." for v in w.get("Value", []))))
        except ValueError as e:
            raise SolverError(f"cannot read witness: {e}") from None
        if atoms in seen:
            continue
        seen.add(atoms)
        models.append(Model(atoms, costs))
    return models


def strip_shows(program: Program) -> Program:
    return Program(tuple(s for s in program.statements if not isinstance(s, (ShowDirective, ShowSignature))))


class ClingoClient:
    """Runs ``command`` (a shell-style string such as ``"clingo"``) per call."""

    def __init__(self, command: str, timeout: Optional[float] = None):
        self.argv = shlex.split(command)
        if not self.argv:
            raise SolverNotConfigured("empty solver command")
        self.timeout = timeout

    @classmethod
    def from_env(cls) -> Optional["ClingoClient"]:
        command = os.environ.get(SOLVER_ENV)
        return cls(command) if command else None

    def solve_text(self, program_text: str, n: int = 1, optimize: bool = False) -> list[Model]:
        argv = self.argv + ["--outf=2", f"--models={n}"]
        if optimize:
            argv.append("--opt-mode=optN")
        try:
            proc = subprocess.run(argv, input=program_text, capture_output=True, text=True, timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired) as e:
            raise SolverError(f"cannot run solver {self.argv[0]!r}: {e}") from None
        if proc.returncode not in _OK_EXIT:
            detail = proc.stderr.strip().splitlines()
            raise SolverError(f"solver exited with {proc.returncode}: {' '.join(detail[-3:])}")
        models = parse_witnesses(proc.stdout, optimize)
        if optimize:
            models = models[:n] if n else models
        return sorted(models, key=lambda m: [term_key(a.to_term()) for a in m.atoms])

    def answer_sets(self, program: Program, facts: Iterable[Atom], n: int = 1, optimize: bool = False) -> list[Interpretation]:
        text = print_program(strip_shows(program)) + "\n" + "".join(f"{a}.\n" for a in facts)
        return [Interpretation(m.atoms) for m in self.solve_text(text, n, optimize)]

    def search(self, program: Program, facts: Iterable[Atom], n: int = 1, optimize: bool = False) -> list[Interpretation]:
        """Answer sets of ``program`` plus ``facts``, projected per its show directives."""
        return [projected_atoms(a, program) for a in self.answer_sets(program, facts, n, optimize)]

    def query(self, program: Program, interpretation: Iterable[Atom]) -> ProjectedAnswer:
        """One projected answer set for a template query; errors if there is none."""
        from .evaluator import Inconsistent

        models = self.answer_sets(program, interpretation, 2)
        if not models:
            raise Inconsistent("the query has no answer set")
        if len(models) > 1:
            warnings.warn("query has several answer sets; rendering the first", stacklevel=2)
        return project(models[0], program)


def solve_external(program_text: str, n: int = 1, optimize: bool = False, command: Optional[str] = None) -> list[Model]:
    """Run the configured solver on ``program_text``.

    ``n = 0`` asks for all models.  The command comes from ``command`` or
    the ``ASP_MUSTACHE_SOLVER`` environment variable.
    """
    command = command or os.environ.get(SOLVER_ENV)
    if not command:
        raise SolverNotConfigured(f"no solver configured (pass --solver or set {SOLVER_ENV})")
    return ClingoClient(command).solve_text(program_text, n, optimize)
