"""Ceteris-paribus conditions and the minimal cp-admissible ranking kappa-bar.

Two worlds give a cp-condition ``upper >(d) lower`` when the set ``D`` of
defaults on which their status differs is nonempty, ``upper`` falsifies every
default in ``D`` and ``lower`` verifies every default in ``D``; ``d`` is the
largest strength in ``D``.  A cp-admissible ranking is admissible and puts
``upper`` strictly more than ``d`` above ``lower`` for every condition.

Orientation: the falsifying world is the upper (less plausible) one.
"""

from __future__ import annotations

import graphlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from .defaults import Default, DefaultDatabase, Status
from .errors import VocabularyMismatch
from .logic import Vocabulary, World
from .zplus import (
    Edges,
    Ranking,
    is_admissible,
    least_fixpoint,
    require_consistent,
)

log = logging.getLogger(__name__)

ORIENTATION_NOTE = (
    "upper >d lower: upper falsifies and lower verifies every default in the witness set, "
    "the two agree on all other defaults, and rank(upper) > rank(lower) + d"
)


@dataclass(frozen=True, order=False)
class CpCondition:
    upper: World
    lower: World
    strength: int
    witness_set: tuple[Default, ...]

    def sort_key(self) -> tuple[int, int, int]:
        return (-self.strength, self.upper.index, self.lower.index)

    def __str__(self) -> str:
        names = ", ".join(d.name for d in self.witness_set)
        return f"{self.upper.label()} >{self.strength} {self.lower.label()}  [{names}]"


@dataclass(frozen=True)
class CpGraph:
    """All cp-conditions of a database over its worlds."""

    vocabulary: Vocabulary
    conditions: tuple[CpCondition, ...] = ()

    def __len__(self) -> int:
        return len(self.conditions)

    def __iter__(self) -> Iterator[CpCondition]:
        return iter(self.conditions)

    @cached_property
    def edges(self) -> Edges:
        """``(uppers, lowers, strengths)`` index arrays for the fixpoint engine."""
        return (
            np.array([c.upper.index for c in self.conditions], dtype=np.int64),
            np.array([c.lower.index for c in self.conditions], dtype=np.int64),
            np.array([c.strength for c in self.conditions], dtype=np.int64),
        )

    @cached_property
    def pairs(self) -> dict[tuple[int, int], int]:
        return {(c.upper.index, c.lower.index): c.strength for c in self.conditions}


def extract_cp_conditions(db: DefaultDatabase) -> CpGraph:
    """Scan world pairs for cp-conditions.

    Worlds with identical status vectors are interchangeable, so the scan runs
    over distinct status vectors and expands to member worlds afterwards.
    """
    vocab = db.vocabulary
    vocab.check_cap()
    if not db.defaults:
        return CpGraph(vocab)
    statuses = db.status_matrix
    signatures, inverse = np.unique(statuses, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    members = [np.flatnonzero(inverse == k) for k in range(len(signatures))]
    strengths = np.array([d.strength for d in db.defaults], dtype=np.int64)

    falsifies = signatures == Status.FALSIFIES
    verifies = signatures == Status.VERIFIES
    conditions: list[CpCondition] = []
    for a, sig in enumerate(signatures):
        differ = signatures != sig
        ok = (~differ | (falsifies[a] & verifies)).all(axis=1) & differ.any(axis=1)
        for b in np.flatnonzero(ok):
            disagree = np.flatnonzero(differ[b])
            witness = tuple(db.defaults[k] for k in disagree)
            strength = int(strengths[disagree].max())
            for u in members[a]:
                for v in members[b]:
                    conditions.append(CpCondition(World(int(u), vocab), World(int(v), vocab), strength, witness))
    conditions.sort(key=CpCondition.sort_key)
    log.debug("extracted %d cp-conditions from %d status classes", len(conditions), len(signatures))
    return CpGraph(vocab, tuple(conditions))


def cp_acyclicity_check(graph: CpGraph) -> list[World] | None:
    """None when the conditions admit a topological order, else a closed cycle of worlds."""
    sorter = graphlib.TopologicalSorter()
    for c in graph.conditions:
        sorter.add(c.upper.index, c.lower.index)
    try:
        sorter.prepare()
    except graphlib.CycleError as err:
        cycle = err.args[1]
        return [World(i, graph.vocabulary) for i in cycle]
    return None


def is_cp_admissible(ranking: Ranking, db: DefaultDatabase, graph: CpGraph | None = None) -> bool:
    if ranking.vocabulary != db.vocabulary:
        raise VocabularyMismatch("ranking and database use different vocabularies")
    if not is_admissible(ranking, db):
        return False
    return satisfies_cp_conditions(ranking, graph if graph is not None else extract_cp_conditions(db))


def satisfies_cp_conditions(ranking: Ranking, graph: CpGraph) -> bool:
    """Only the edge half of cp-admissibility."""
    uppers, lowers, strengths = graph.edges
    values = ranking.array()
    return bool(np.all(values[uppers] > values[lowers] + strengths))


def kappa_bar(db: DefaultDatabase, graph: CpGraph | None = None) -> Ranking:
    """Pointwise-minimal cp-admissible ranking: the least fixpoint of default bounds plus cp edges."""
    require_consistent(db)
    graph = graph if graph is not None else extract_cp_conditions(db)
    return Ranking.from_array(db.vocabulary, least_fixpoint(db, graph.edges))


def world_layers(db: DefaultDatabase) -> np.ndarray:
    """Per world, the least ``i`` such that it falsifies nothing outside the first ``i`` partition layers."""
    part = require_consistent(db)
    out = np.zeros(db.vocabulary.n_worlds, dtype=np.int64)
    for k, d in enumerate(db.defaults):
        falsifiers = db.falsify_masks[k]
        out[falsifiers] = np.maximum(out[falsifiers], part.layer_of(d) + 1)
    return out


def _strata(worlds: np.ndarray, graph: CpGraph) -> list[list[int]]:
    """Peel off cp-minimal worlds (no condition pointing down to a remaining world) until none remain."""
    left = set(int(w) for w in worlds)
    below: dict[int, set[int]] = {w: set() for w in left}
    for c in graph.conditions:
        if c.upper.index in left and c.lower.index in left:
            below[c.upper.index].add(c.lower.index)
    strata = []
    while left:
        stratum = sorted(w for w in left if not (below[w] & left))
        if not stratum:
            raise AssertionError("cp-conditions contain a cycle")
        strata.append(stratum)
        left.difference_update(stratum)
    return strata


def witness_ranking(db: DefaultDatabase, graph: CpGraph | None = None) -> Ranking:
    """Explicit cp-admissible ranking built from the toleration layers.

    Worlds are grouped by :func:`world_layers`; each group is split into
    cp-strata, and stratum ``j`` of group ``i`` is ranked ``base_i + j * step``
    where ``step`` is one more than the largest strength and ``base_i`` sits
    one step above everything ranked in earlier groups.  The result is an
    upper bound for :func:`kappa_bar`.
    """
    graph = graph if graph is not None else extract_cp_conditions(db)
    layer = world_layers(db)
    step = db.max_strength + 1
    ranks = np.zeros(db.vocabulary.n_worlds, dtype=np.int64)
    top = None
    for i in range(int(layer.max()) + 1):
        group = np.flatnonzero(layer == i)
        if not len(group):
            continue
        base = 0 if top is None else top + step
        for j, stratum in enumerate(_strata(group, graph)):
            ranks[stratum] = base + j * step
        top = int(ranks[group].max())
    return Ranking.from_array(db.vocabulary, ranks)
