"""Sets of ground atoms, and their text form as fact blocks."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator

from .syntax import SHOW_TUPLE, Atom, parse_facts
from .terms import render_term, term_key

BLOCK_SEPARATOR = "§"


class Interpretation:
    """An immutable set of ground atoms, iterated in the term order."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._atoms = frozenset(atoms)

    @classmethod
    def parse(cls, text: str) -> "Interpretation":
        return cls(parse_facts(text))

    @cached_property
    def _ordered(self) -> tuple:
        return tuple(sorted(self._atoms, key=lambda a: term_key(a.to_term())))

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._ordered)

    def __len__(self) -> int:
        return len(self._atoms)

    def __contains__(self, atom) -> bool:
        return atom in self._atoms

    def __eq__(self, other) -> bool:
        if isinstance(other, Interpretation):
            return self._atoms == other._atoms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._atoms)

    def __or__(self, other: Iterable[Atom]) -> "Interpretation":
        return Interpretation(self._atoms | frozenset(other))

    def __repr__(self) -> str:
        return f"Interpretation([{', '.join(map(str, self))}])"

    @property
    def atoms(self) -> frozenset:
        return self._atoms

    def with_predicate(self, predicate: str, arity: int = None) -> list[Atom]:
        return [a for a in self if a.predicate == predicate and (arity is None or a.arity == arity)]

    def dump(self) -> str:
        """One fact per line; internal show tuples print as plain tuples."""
        return "\n".join(dump_atom(a) + "." for a in self)


def dump_atom(atom: Atom) -> str:
    if atom.predicate == SHOW_TUPLE:
        return render_term(atom.to_term())
    return str(atom)


def parse_blocks(text: str) -> list[Interpretation]:
    """Split on lines holding only ``§``; each block is a fact file."""
    blocks, current = [], []
    for line in text.splitlines(keepends=True):
        if line.strip() == BLOCK_SEPARATOR:
            blocks.append("".join(current))
            current = []
        else:
            current.append(line)
    blocks.append("".join(current))
    return [Interpretation.parse(b) for b in blocks]


def dump_blocks(interpretations: Iterable[Interpretation]) -> str:
    return f"\n{BLOCK_SEPARATOR}\n".join(i.dump() for i in interpretations)
