"""JSON-ready records for partitions, rankings and cp-conditions, plus their inverses.

Worlds are written as ``b !p f`` strings and infinite ranks as the string
``"inf"`` so every record survives a strict JSON round trip.
"""

from __future__ import annotations

from typing import Any

from .cp import CpCondition, CpGraph
from .defaults import DefaultDatabase
from .logic import Vocabulary, World
from .zplus import INF, Partition, Rank, Ranking


def encode_rank(r: Rank) -> int | str:
    return "inf" if r == INF else int(r)


def decode_rank(x: int | str) -> Rank:
    return INF if x == "inf" else int(x)


def partition_record(part: Partition) -> dict[str, Any]:
    return {
        "consistent": part.consistent,
        "layers": [
            {"defaults": [d.name for d in layer], "max_strength": s}
            for layer, s in zip(part.layers, part.max_strengths)
        ],
        "residual": [d.name for d in part.residual],
    }


def ranking_record(ranking: Ranking) -> list[dict[str, Any]]:
    """Rows sorted by rank, then canonical world order."""
    rows = sorted(ranking, key=lambda item: (item[1], item[0].index))
    return [{"world": w.label(), "rank": encode_rank(r)} for w, r in rows]


def ranking_from_record(rows: list[dict[str, Any]], vocabulary: Vocabulary) -> Ranking:
    ranks: list[Rank | None] = [None] * vocabulary.n_worlds
    for row in rows:
        ranks[World.from_label(row["world"], vocabulary).index] = decode_rank(row["rank"])
    if any(r is None for r in ranks):
        raise ValueError("ranking record does not cover every world")
    return Ranking(vocabulary, tuple(ranks))


def cp_record(graph: CpGraph) -> list[dict[str, Any]]:
    return [
        {
            "upper": c.upper.label(),
            "lower": c.lower.label(),
            "strength": c.strength,
            "witness": [d.name for d in c.witness_set],
        }
        for c in sorted(graph, key=CpCondition.sort_key)
    ]


def cp_from_record(rows: list[dict[str, Any]], db: DefaultDatabase) -> list[CpCondition]:
    vocab = db.vocabulary
    return [
        CpCondition(
            World.from_label(row["upper"], vocab),
            World.from_label(row["lower"], vocab),
            int(row["strength"]),
            tuple(db.default(name) for name in row["witness"]),
        )
        for row in rows
    ]
