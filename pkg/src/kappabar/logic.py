"""Propositional formulas, worlds and enumeration-based satisfiability.

Worlds over a vocabulary of ``n`` atoms are the integers ``0 .. 2**n - 1``;
bit ``i`` holds the value of atom ``i`` (atom 0 is least significant).  That
integer order is the canonical iteration order used everywhere downstream.

Formulas are immutable trees.  Besides single-world evaluation there is a
vectorised :func:`truth_table` that evaluates a formula over every world of a
vocabulary at once; the ranking engines are built on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

import numpy as np

from .errors import ParseError, VocabularyMismatch, VocabularyTooLarge

DEFAULT_CAP = 20
MAX_CAP = 24

_ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"true", "false"}


# --------------------------------------------------------------------------
# Vocabulary
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    """Ordered, duplicate-free tuple of atom names.

    ``cap`` bounds the number of atoms any enumeration may range over; it is
    not part of equality.
    """

    atoms: tuple[str, ...]
    cap: int = field(default=DEFAULT_CAP, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        seen = set()
        for a in self.atoms:
            if not isinstance(a, str) or not _ATOM_RE.match(a) or a in _RESERVED:
                raise ValueError(f"invalid atom name {a!r}")
            if a in seen:
                raise ValueError(f"duplicate atom {a!r}")
            seen.add(a)
        if not 0 <= self.cap <= MAX_CAP:
            raise ValueError(f"cap must lie in 0..{MAX_CAP}, got {self.cap}")

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[str]:
        return iter(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    def index(self, atom: str) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise VocabularyMismatch(f"atom {atom!r} is not in vocabulary {list(self.atoms)}") from None

    @property
    def n_worlds(self) -> int:
        return 1 << len(self.atoms)

    def check_cap(self) -> None:
        if len(self.atoms) > self.cap:
            raise VocabularyTooLarge(
                f"{len(self.atoms)} atoms exceed the enumeration cap of {self.cap}"
            )

    def with_cap(self, cap: int) -> Vocabulary:
        return Vocabulary(self.atoms, cap)

    def worlds(self) -> Iterator[World]:
        """All worlds in canonical order."""
        self.check_cap()
        for i in range(self.n_worlds):
            yield World(i, self)

    def world(self, label: str) -> World:
        return World.from_label(label, self)

    def resolve(self, formula: Formula) -> None:
        """Raise VocabularyMismatch unless every atom of ``formula`` is known."""
        missing = formula.atoms() - set(self.atoms)
        if missing:
            raise VocabularyMismatch(
                f"atoms {sorted(missing)} are not in vocabulary {list(self.atoms)}"
            )


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------

# binding strength used by the printer; higher binds tighter
_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NOT, _PREC_ATOM = range(1, 7)


class Formula:
    """Base class of the formula tree.  Supports ``~``, ``&``, ``|`` and ``>>`` (implication)."""

    __slots__ = ()

    def __invert__(self) -> Formula:
        return Not(self)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __rshift__(self, other: Formula) -> Formula:
        return Implies(self, other)

    def iff(self, other: Formula) -> Formula:
        return Iff(self, other)

    def atoms(self) -> frozenset[str]:
        return _atoms(self)

    def holds(self, assignment: Mapping[str, bool]) -> bool:
        raise NotImplementedError

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False, eq=True)
class Atom(Formula):
    name: str

    def holds(self, assignment):
        return bool(assignment[self.name])

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def holds(self, assignment):
        return self.value

    def __repr__(self):
        return "TOP" if self.value else "BOTTOM"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def holds(self, assignment):
        return not self.arg.holds(assignment)

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    def holds(self, assignment):
        return self.left.holds(assignment) and self.right.holds(assignment)


class Or(_Binary):
    def holds(self, assignment):
        return self.left.holds(assignment) or self.right.holds(assignment)


class Implies(_Binary):
    def holds(self, assignment):
        return (not self.left.holds(assignment)) or self.right.holds(assignment)


class Iff(_Binary):
    def holds(self, assignment):
        return self.left.holds(assignment) == self.right.holds(assignment)


TOP = Const(True)
BOTTOM = Const(False)


def atoms(names: str) -> tuple[Atom, ...]:
    """``b, p, f = atoms("b p f")``"""
    return tuple(Atom(n) for n in names.split())


def conjoin(formulas) -> Formula:
    out: Formula | None = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


@lru_cache(maxsize=4096)
def _atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Not):
        return _atoms(f.arg)
    return _atoms(f.left) | _atoms(f.right)


def _prec(f: Formula) -> int:
    if isinstance(f, (Atom, Const)):
        return _PREC_ATOM
    if isinstance(f, Not):
        return _PREC_NOT
    return {And: _PREC_AND, Or: _PREC_OR, Implies: _PREC_IMP, Iff: _PREC_IFF}[type(f)]


_SYMBOL = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}


def to_text(f: Formula) -> str:
    """Render ``f`` in the concrete syntax accepted by :func:`parse_formula`, minimally parenthesised."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        inner = to_text(f.arg)
        return "!" + (inner if _prec(f.arg) >= _PREC_NOT else f"({inner})")
    p = _prec(f)
    # & | <=> associate left, => associates right
    left_min, right_min = (p + 1, p) if isinstance(f, Implies) else (p, p + 1)
    left = to_text(f.left)
    right = to_text(f.right)
    if _prec(f.left) < left_min:
        left = f"({left})"
    if _prec(f.right) < right_min:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(<=>|=>|[!&|()])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str, offset: int) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[col]!r}", column=offset + col + 1)
        if m.group(1):
            tokens.append(("op", m.group(1), offset + m.start(1) + 1))
        else:
            tokens.append(("id", m.group(2), offset + m.start(2) + 1))
        pos = m.end()
    tokens.append(("end", "", offset + len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, offset: int):
        self.tokens = _tokenize(text, offset)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, col = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", column=col)

    def parse(self) -> Formula:
        f = self.iff()
        kind, val, col = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", column=col)
        return f

    def iff(self):
        f = self.implies()
        while self.peek()[1] == "<=>":
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.peek()[1] == "=>":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self):
        f = self.conj()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, col = self.take()
        if val == "!":
            return Not(self.unary())
        if val == "(":
            f = self.iff()
            self.expect(")")
            return f
        if kind == "id":
            if val == "true":
                return TOP
            if val == "false":
                return BOTTOM
            return Atom(val)
        raise ParseError(f"expected a formula, found {val or 'end of input'!r}", column=col)


def parse_formula(text: str, vocabulary: Vocabulary | None = None, *, column_offset: int = 0) -> Formula:
    """Parse concrete syntax: ``!`` > ``&`` > ``|`` > ``=>`` (right-assoc) > ``<=>``.

    With a vocabulary, unknown atoms raise VocabularyMismatch.
    """
    f = _Parser(text, column_offset).parse()
    if vocabulary is not None:
        vocabulary.resolve(f)
    return f


# --------------------------------------------------------------------------
# Worlds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class World:
    """A total truth assignment, stored as its canonical integer code."""

    index: int
    vocabulary: Vocabulary

    def __post_init__(self):
        if not 0 <= self.index < self.vocabulary.n_worlds:
            raise ValueError(f"world index {self.index} out of range for {len(self.vocabulary)} atoms")

    def __lt__(self, other: World) -> bool:
        if self.vocabulary != other.vocabulary:
            raise VocabularyMismatch("cannot order worlds over different vocabularies")
        return self.index < other.index

    def __getitem__(self, atom: str) -> bool:
        return bool((self.index >> self.vocabulary.index(atom)) & 1)

    @property
    def assignment(self) -> dict[str, bool]:
        return {a: bool((self.index >> i) & 1) for i, a in enumerate(self.vocabulary.atoms)}

    def label(self) -> str:
        """``b !p f`` style rendering in vocabulary order."""
        return " ".join(a if v else "!" + a for a, v in self.assignment.items())

    def __str__(self) -> str:
        return self.label()

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, bool], vocabulary: Vocabulary) -> World:
        if set(assignment) != set(vocabulary.atoms):
            raise VocabularyMismatch(
                f"assignment over {sorted(assignment)} does not cover vocabulary {list(vocabulary.atoms)}"
            )
        index = sum(1 << i for i, a in enumerate(vocabulary.atoms) if assignment[a])
        return cls(index, vocabulary)

    @classmethod
    def from_label(cls, label: str, vocabulary: Vocabulary) -> World:
        """Inverse of :meth:`label`; literals may come in any order but must cover every atom once."""
        values: dict[str, bool] = {}
        for lit in label.split():
            name = lit.lstrip("!")
            if len(lit) - len(name) > 1 or name in values:
                raise ValueError(f"bad world label {label!r}")
            values[name] = not lit.startswith("!")
        return cls.from_assignment(values, vocabulary)


# --------------------------------------------------------------------------
# Semantics
# --------------------------------------------------------------------------

def evaluate(world: World, formula: Formula) -> bool:
    """Classical truth value of ``formula`` in ``world``."""
    world.vocabulary.resolve(formula)
    return formula.holds(world.assignment)


def _table(f: Formula, vocabulary: Vocabulary, idx: np.ndarray) -> np.ndarray:
    if isinstance(f, Atom):
        return ((idx >> vocabulary.index(f.name)) & 1).astype(bool)
    if isinstance(f, Const):
        return np.full(idx.shape, f.value, dtype=bool)
    if isinstance(f, Not):
        return ~_table(f.arg, vocabulary, idx)
    left = _table(f.left, vocabulary, idx)
    right = _table(f.right, vocabulary, idx)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    if isinstance(f, Implies):
        return ~left | right
    return left == right


@lru_cache(maxsize=1024)
def truth_table(formula: Formula, vocabulary: Vocabulary) -> np.ndarray:
    """Boolean vector over all worlds of ``vocabulary`` (canonical order); read-only."""
    vocabulary.check_cap()
    vocabulary.resolve(formula)
    out = _table(formula, vocabulary, np.arange(vocabulary.n_worlds, dtype=np.int64))
    out.setflags(write=False)
    return out


def models(formula: Formula, vocabulary: Vocabulary) -> tuple[World, ...]:
    """Worlds satisfying ``formula``, in canonical order."""
    table = truth_table(formula, vocabulary)
    return tuple(World(int(i), vocabulary) for i in np.flatnonzero(table))


_CHUNK = 1 << 14


def is_satisfiable(formula: Formula, vocabulary: Vocabulary) -> bool:
    """Enumerate worlds in blocks, stopping at the first block containing a model."""
    vocabulary.check_cap()
    vocabulary.resolve(formula)
    for start in range(0, vocabulary.n_worlds, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, vocabulary.n_worlds), dtype=np.int64)
        if _table(formula, vocabulary, idx).any():
            return True
    return False
