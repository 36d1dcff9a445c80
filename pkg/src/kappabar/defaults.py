"""Normality defaults ``phi ->(delta) psi`` and databases of them.

Database text format, one statement per line::

    # comment
    atoms: b p f              (optional; fixes vocabulary order)
    d1: b -> f                (label optional)
    p -> !f
    true -> w [1]             (strength in brackets, default 0)
"""

from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ParseError, VocabularyMismatch
from .logic import (
    DEFAULT_CAP,
    Atom,
    Const,
    Formula,
    Implies,
    Not,
    Vocabulary,
    World,
    conjoin,
    is_satisfiable,
    parse_formula,
    to_text,
    truth_table,
)


class Status(enum.IntEnum):
    VERIFIES = 0
    FALSIFIES = 1
    SATISFIES_VACUOUSLY = 2

    @property
    def letter(self) -> str:
        return "VFN"[self]


@dataclass(frozen=True)
class Default:
    antecedent: Formula
    consequent: Formula
    strength: int = 0
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.strength, bool) or not isinstance(self.strength, int) or self.strength < 0:
            raise ValueError(f"strength must be a non-negative integer, got {self.strength!r}")

    @property
    def name(self) -> str:
        return self.label if self.label is not None else self.text()

    def text(self) -> str:
        s = f"{to_text(self.antecedent)} -> {to_text(self.consequent)}"
        return s if self.strength == 0 else f"{s} [{self.strength}]"

    def __str__(self) -> str:
        return self.text() if self.label is None else f"{self.label}: {self.text()}"

    def atoms(self) -> frozenset[str]:
        return self.antecedent.atoms() | self.consequent.atoms()

    def verification(self) -> Formula:
        return self.antecedent & self.consequent

    def falsification(self) -> Formula:
        return self.antecedent & ~self.consequent


def material_counterpart(d: Default) -> Formula:
    return Implies(d.antecedent, d.consequent)


def status(world: World, d: Default) -> Status:
    world.vocabulary.resolve(d.antecedent)
    world.vocabulary.resolve(d.consequent)
    values = world.assignment
    if not d.antecedent.holds(values):
        return Status.SATISFIES_VACUOUSLY
    return Status.VERIFIES if d.consequent.holds(values) else Status.FALSIFIES


def agree(w1: World, w2: World, d: Default) -> bool:
    """Ceteris-paribus agreement on ``d``: verify alike and falsify alike."""
    if w1.vocabulary != w2.vocabulary:
        raise VocabularyMismatch("worlds are over different vocabularies")
    return status(w1, d) == status(w2, d)


def is_tolerated(d: Default, others: Iterable[Default], vocabulary: Vocabulary) -> bool:
    """True iff ``d`` can be verified while every rule in ``others`` is materially satisfied."""
    f = conjoin([d.antecedent, d.consequent, *(material_counterpart(o) for o in others)])
    return is_satisfiable(f, vocabulary)


@dataclass(frozen=True)
class DefaultDatabase:
    vocabulary: Vocabulary
    defaults: tuple[Default, ...] = ()

    def __post_init__(self):
        unique: list[Default] = []
        for d in self.defaults:
            self.vocabulary.resolve(d.antecedent)
            self.vocabulary.resolve(d.consequent)
            if d in unique:
                warnings.warn(f"duplicate default {d.text()!r} collapsed", stacklevel=3)
                continue
            unique.append(d)
        labels = [d.label for d in unique if d.label is not None]
        if len(labels) != len(set(labels)):
            raise ValueError(f"default labels must be unique: {labels}")
        object.__setattr__(self, "defaults", tuple(unique))

    @classmethod
    def from_defaults(cls, defaults: Iterable[Default], atoms: Iterable[str] | None = None,
                      cap: int = DEFAULT_CAP) -> DefaultDatabase:
        """Build a database, collecting atoms in first-appearance order unless given."""
        defaults = list(defaults)
        if atoms is None:
            seen: list[str] = []
            for d in defaults:
                for f in (d.antecedent, d.consequent):
                    for a in _atoms_in_order(f):
                        if a not in seen:
                            seen.append(a)
            atoms = seen
        return cls(Vocabulary(tuple(atoms), cap), tuple(defaults))

    def __len__(self) -> int:
        return len(self.defaults)

    def __iter__(self):
        return iter(self.defaults)

    def with_cap(self, cap: int) -> DefaultDatabase:
        return DefaultDatabase(self.vocabulary.with_cap(cap), self.defaults)

    def extended(self, *defaults: Default) -> DefaultDatabase:
        return DefaultDatabase.from_defaults(
            self.defaults + defaults,
            atoms=list(self.vocabulary.atoms) + [
                a for d in defaults for a in sorted(d.atoms()) if a not in self.vocabulary
            ],
            cap=self.vocabulary.cap,
        )

    def default(self, name: str) -> Default:
        for d in self.defaults:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def max_strength(self) -> int:
        return max((d.strength for d in self.defaults), default=0)

    @cached_property
    def verify_masks(self) -> np.ndarray:
        """``(n_defaults, n_worlds)`` boolean matrix of phi & psi."""
        return self._masks(Default.verification)

    @cached_property
    def falsify_masks(self) -> np.ndarray:
        """``(n_defaults, n_worlds)`` boolean matrix of phi & !psi."""
        return self._masks(Default.falsification)

    def _masks(self, which) -> np.ndarray:
        self.vocabulary.check_cap()
        if not self.defaults:
            return np.zeros((0, self.vocabulary.n_worlds), dtype=bool)
        return np.stack([truth_table(which(d), self.vocabulary) for d in self.defaults])

    @cached_property
    def status_matrix(self) -> np.ndarray:
        """``(n_worlds, n_defaults)`` int8 matrix of :class:`Status` codes."""
        out = np.full((self.vocabulary.n_worlds, len(self.defaults)), int(Status.SATISFIES_VACUOUSLY),
                      dtype=np.int8)
        out[self.verify_masks.T] = int(Status.VERIFIES)
        out[self.falsify_masks.T] = int(Status.FALSIFIES)
        return out


def _atoms_in_order(f: Formula) -> list[str]:
    # left-to-right walk so first-appearance order follows the source text
    if isinstance(f, Atom):
        return [f.name]
    if isinstance(f, Const):
        return []
    if isinstance(f, Not):
        return _atoms_in_order(f.arg)
    return _atoms_in_order(f.left) + _atoms_in_order(f.right)


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------

_LABEL_RE = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:")
_STRENGTH_RE = re.compile(r"\[\s*([^\]]*?)\s*\]\s*\Z")
_ATOMS_RE = re.compile(r"\s*atoms\s*:(.*)\Z")


def _with_line(err: ParseError, lineno: int) -> ParseError:
    return ParseError(err.message, line=lineno, column=err.column)


def parse_default(line: str, lineno: int | None = None) -> Default:
    """Parse a single ``[label:] FORMULA -> FORMULA [k]`` statement."""
    start = 0
    label = None
    m = _LABEL_RE.match(line)
    if m:
        label = m.group(1)
        start = m.end()
    strength = 0
    end = len(line)
    m = _STRENGTH_RE.search(line, start)
    if m:
        if not m.group(1).isdigit():
            raise ParseError(f"strength must be a non-negative integer, got {m.group(1)!r}",
                             line=lineno, column=m.start(1) + 1)
        strength = int(m.group(1))
        end = m.start()
    body = line[start:end]
    if body.count("->") != 1:
        col = start + 1 if "->" not in body else start + body.index("->", body.index("->") + 2) + 1
        raise ParseError("a default needs exactly one '->'", line=lineno, column=col)
    arrow = start + body.index("->")
    try:
        antecedent = parse_formula(line[start:arrow], column_offset=start)
        consequent = parse_formula(line[arrow + 2:end], column_offset=arrow + 2)
    except ParseError as err:
        raise _with_line(err, lineno) if lineno is not None else err
    return Default(antecedent, consequent, strength, label)


def parse_database(text: str, cap: int = DEFAULT_CAP) -> DefaultDatabase:
    """Parse database text; see the module docstring for the format."""
    declared: list[str] | None = None
    defaults: list[tuple[int, Default]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _ATOMS_RE.match(line)
        if m:
            if declared is not None:
                raise ParseError("duplicate 'atoms:' line", line=lineno, column=1)
            declared = m.group(1).split()
            try:
                Vocabulary(tuple(declared))
            except ValueError as err:
                raise ParseError(str(err), line=lineno, column=m.start(1) + 1) from None
            continue
        defaults.append((lineno, parse_default(line, lineno)))

    if declared is not None:
        for lineno, d in defaults:
            unknown = d.atoms() - set(declared)
            if unknown:
                raise ParseError(f"atoms {sorted(unknown)} not declared in 'atoms:' line",
                                 line=lineno, column=1)
    labels: dict[str, int] = {}
    for lineno, d in defaults:
        if d.label is not None:
            if d.label in labels:
                raise ParseError(f"label {d.label!r} already used on line {labels[d.label]}",
                                 line=lineno, column=1)
            labels[d.label] = lineno
    return DefaultDatabase.from_defaults([d for _, d in defaults], atoms=declared, cap=cap)


def load_database(path: str | Path, cap: int = DEFAULT_CAP) -> DefaultDatabase:
    try:
        return parse_database(Path(path).read_text(encoding="utf-8"), cap=cap)
    except ParseError as err:
        err.source = str(path)
        raise
