"""Belief rankings, the toleration partition and the minimal admissible ranking kappa+.

A ranking assigns every world a non-negative integer (or ``math.inf``) with
some world at rank 0.  A default ``phi ->(d) psi`` is respected by a ranking
when ``rank(phi & !psi) > rank(phi & psi) + d``.

kappa+ is computed as the least fixpoint of those constraints: start from the
all-zero ranking and keep raising falsifying worlds to
``rank(phi & psi) + d + 1`` until nothing moves.  The same loop, fed with
extra world-to-world edges, yields kappa-bar (see :mod:`kappabar.cp`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .defaults import Default, DefaultDatabase, is_tolerated
from .errors import FixpointGuardExceeded, InconsistentDatabase, VocabularyMismatch
from .logic import TOP, Formula, Vocabulary, World, truth_table

log = logging.getLogger(__name__)

INF = math.inf
Rank = Union[int, float]  # float only ever means math.inf


def _as_rank(x) -> Rank:
    return INF if x == INF else int(x)


@dataclass(frozen=True)
class Ranking:
    """Total map from worlds (canonical order) to ranks."""

    vocabulary: Vocabulary
    ranks: tuple[Rank, ...]

    def __post_init__(self):
        ranks = tuple(_as_rank(x) for x in self.ranks)
        if len(ranks) != self.vocabulary.n_worlds:
            raise ValueError(f"expected {self.vocabulary.n_worlds} ranks, got {len(ranks)}")
        if any(x < 0 for x in ranks):
            raise ValueError("ranks must be non-negative")
        finite = [x for x in ranks if x != INF]
        if finite and min(finite) != 0:
            raise ValueError("some world must have rank 0")
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def from_array(cls, vocabulary: Vocabulary, array) -> Ranking:
        return cls(vocabulary, tuple(np.asarray(array).tolist()))

    @classmethod
    def from_labels(cls, vocabulary: Vocabulary, table: dict[str, Rank], default: Rank = 0) -> Ranking:
        ranks = [default] * vocabulary.n_worlds
        for label, r in table.items():
            ranks[World.from_label(label, vocabulary).index] = r
        return cls(vocabulary, tuple(ranks))

    @classmethod
    def zero(cls, vocabulary: Vocabulary) -> Ranking:
        vocabulary.check_cap()
        return cls(vocabulary, (0,) * vocabulary.n_worlds)

    def array(self) -> np.ndarray:
        """Ranks as a float64 vector (``inf`` stays ``inf``; integers are exact)."""
        return np.asarray(self.ranks, dtype=np.float64)

    def __getitem__(self, world: World | str | int) -> Rank:
        if isinstance(world, str):
            world = World.from_label(world, self.vocabulary)
        if isinstance(world, World):
            if world.vocabulary != self.vocabulary:
                raise VocabularyMismatch("world and ranking use different vocabularies")
            world = world.index
        return self.ranks[world]

    def __iter__(self) -> Iterator[tuple[World, Rank]]:
        for i, r in enumerate(self.ranks):
            yield World(i, self.vocabulary), r

    def __le__(self, other: Ranking) -> bool:
        """Pointwise dominance."""
        return self.vocabulary == other.vocabulary and all(a <= b for a, b in zip(self.ranks, other.ranks))

    def max_rank(self) -> Rank:
        return max(self.ranks)

    def levels(self) -> dict[Rank, list[World]]:
        """Worlds grouped by rank, ranks ascending, worlds in canonical order."""
        out: dict[Rank, list[World]] = {}
        for r in sorted(set(self.ranks)):
            out[r] = [World(i, self.vocabulary) for i, x in enumerate(self.ranks) if x == r]
        return out

    def rank_of(self, formula: Formula) -> Rank:
        return rank_of(self, formula)

    def pointwise_min(self, other: Ranking) -> Ranking:
        if self.vocabulary != other.vocabulary:
            raise VocabularyMismatch("rankings use different vocabularies")
        return Ranking(self.vocabulary, tuple(min(a, b) for a, b in zip(self.ranks, other.ranks)))


def _masked_min(values: np.ndarray, mask: np.ndarray) -> Rank:
    if not mask.any():
        return INF
    return _as_rank(values[mask].min())


def rank_of(ranking: Ranking, formula: Formula) -> Rank:
    """Minimum rank over the models of ``formula``; ``inf`` if it has none."""
    return _masked_min(ranking.array(), truth_table(formula, ranking.vocabulary))


def conditional_rank(ranking: Ranking, psi: Formula, phi: Formula = TOP) -> Rank:
    """``rank(phi & psi) - rank(phi)``, or ``inf`` when ``phi`` (or ``phi & psi``) has no model."""
    given = rank_of(ranking, phi)
    both = rank_of(ranking, phi & psi)
    if given == INF or both == INF:
        return INF
    return both - given


# --------------------------------------------------------------------------
# Toleration partition
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Layers Delta_0 .. Delta_m of mutually tolerated defaults.

    When toleration gets stuck, ``residual`` holds the defaults that could not be
    placed and the database is inconsistent.
    """

    layers: tuple[tuple[Default, ...], ...]
    residual: tuple[Default, ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.residual

    @property
    def max_strengths(self) -> tuple[int, ...]:
        return tuple(max(d.strength for d in layer) for layer in self.layers)

    def __len__(self) -> int:
        return len(self.layers)

    def layer_of(self, d: Default) -> int:
        for i, layer in enumerate(self.layers):
            if d in layer:
                return i
        raise KeyError(d.name)

    def remaining(self, i: int) -> tuple[Default, ...]:
        """Defaults not placed in layers before ``i``."""
        return tuple(d for layer in self.layers[i:] for d in layer) + self.residual


def z_partition(db: DefaultDatabase) -> Partition:
    layers: list[tuple[Default, ...]] = []
    remaining = list(db.defaults)
    while remaining:
        layer = tuple(d for d in remaining if is_tolerated(d, remaining, db.vocabulary))
        if not layer:
            log.debug("toleration stuck with %d defaults left", len(remaining))
            return Partition(tuple(layers), tuple(remaining))
        layers.append(layer)
        remaining = [d for d in remaining if d not in layer]
    return Partition(tuple(layers))


def is_consistent(db: DefaultDatabase) -> bool:
    return z_partition(db).consistent


def require_consistent(db: DefaultDatabase) -> Partition:
    part = z_partition(db)
    if not part.consistent:
        names = ", ".join(d.name for d in part.residual)
        raise InconsistentDatabase(f"database is inconsistent; no default tolerated among {{{names}}}",
                                   part.residual)
    return part


# --------------------------------------------------------------------------
# Admissibility
# --------------------------------------------------------------------------

def _default_ok(values: np.ndarray, db: DefaultDatabase, k: int) -> bool:
    verified = _masked_min(values, db.verify_masks[k])
    falsified = _masked_min(values, db.falsify_masks[k])
    # inf > inf is false, so a default that cannot be verified is never respected
    return falsified > verified + db.defaults[k].strength


def is_admissible(ranking: Ranking, db: DefaultDatabase) -> bool:
    if ranking.vocabulary != db.vocabulary:
        raise VocabularyMismatch("ranking and database use different vocabularies")
    values = ranking.array()
    return all(_default_ok(values, db, k) for k in range(len(db)))


# --------------------------------------------------------------------------
# Least fixpoint
# --------------------------------------------------------------------------

Edges = tuple[np.ndarray, np.ndarray, np.ndarray]  # (uppers, lowers, strengths)


def sweep_guard(db: DefaultDatabase) -> int:
    return db.vocabulary.n_worlds * sum(d.strength + 1 for d in db.defaults) + 1


def least_fixpoint(db: DefaultDatabase, edges: Edges | None = None) -> np.ndarray:
    """Smallest integer ranking meeting every default bound and every ``upper >= lower + s + 1`` edge.

    The caller guarantees consistency; otherwise the loop would climb until the guard trips.
    """
    n = db.vocabulary.n_worlds
    ranks = np.zeros(n, dtype=np.int64)
    verify, falsify = db.verify_masks, db.falsify_masks
    strengths = [d.strength for d in db.defaults]
    guard = sweep_guard(db)
    for sweep in range(guard):
        changed = False
        for k, s in enumerate(strengths):
            bound = ranks[verify[k]].min() + s + 1
            low = falsify[k] & (ranks < bound)
            if low.any():
                ranks[low] = bound
                changed = True
        if edges is not None and len(edges[0]):
            uppers, lowers, es = edges
            need = ranks[lowers] + es + 1
            short = ranks[uppers] < need
            if short.any():
                np.maximum.at(ranks, uppers[short], need[short])
                changed = True
        if not changed:
            log.debug("fixpoint reached after %d sweeps", sweep + 1)
            return ranks
    raise FixpointGuardExceeded(f"no fixpoint after {guard} sweeps")


def lower_bounds(ranking: Ranking, db: DefaultDatabase, edges: Edges | None = None) -> np.ndarray:
    """Per world, the largest rank forced on it by ``ranking`` through the constraints (0 if none)."""
    values = ranking.array()
    out = np.zeros(db.vocabulary.n_worlds, dtype=np.float64)
    for k, d in enumerate(db.defaults):
        bound = _masked_min(values, db.verify_masks[k]) + d.strength + 1
        out[db.falsify_masks[k]] = np.maximum(out[db.falsify_masks[k]], bound)
    if edges is not None and len(edges[0]):
        uppers, lowers, es = edges
        np.maximum.at(out, uppers, values[lowers] + es + 1)
    return out


def kappa_plus(db: DefaultDatabase) -> Ranking:
    """Pointwise-minimal admissible ranking."""
    require_consistent(db)
    return Ranking.from_array(db.vocabulary, least_fixpoint(db))
