"""Rank-based entailment: ``evidence |~ conclusion`` under a chosen ranking.

The conclusion follows when it holds in every minimally ranked model of the
evidence, i.e. ``rank(conclusion & evidence) < rank(!conclusion & evidence)``,
or vacuously when the evidence has no model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .cp import kappa_bar, witness_ranking
from .defaults import DefaultDatabase
from .errors import ParseError
from .logic import Formula, parse_formula
from .zplus import INF, Rank, Ranking, kappa_plus, rank_of


class Method(enum.Enum):
    KPLUS = "kplus"
    KBAR = "kbar"
    WITNESS = "witness"


@dataclass(frozen=True)
class Query:
    evidence: Formula
    conclusion: Formula
    method: Method = Method.KBAR

    def __str__(self) -> str:
        return f"{self.evidence} |~ {self.conclusion}"


def ranking_for(db: DefaultDatabase, method: Method | str) -> Ranking:
    method = Method(method)
    if method is Method.KPLUS:
        return kappa_plus(db)
    if method is Method.KBAR:
        return kappa_bar(db)
    return witness_ranking(db)


def compared_ranks(ranking: Ranking, query: Query) -> tuple[Rank, Rank]:
    """``(rank(conclusion & evidence), rank(!conclusion & evidence))``"""
    return (
        rank_of(ranking, query.conclusion & query.evidence),
        rank_of(ranking, ~query.conclusion & query.evidence),
    )


def entails(ranking: Ranking, query: Query) -> bool:
    if rank_of(ranking, query.evidence) == INF:
        return True
    positive, negative = compared_ranks(ranking, query)
    return positive < negative


@dataclass(frozen=True)
class Comparison:
    query: Query
    kplus: bool
    kbar: bool

    @property
    def divergent(self) -> bool:
        return self.kplus != self.kbar


def compare_methods(db: DefaultDatabase, queries: Iterable[Query]) -> list[Comparison]:
    """Verdict of each query under kappa+ and kappa-bar (the query's own method is ignored)."""
    queries = list(queries)
    if not queries:
        # still reject inconsistent databases
        kappa_plus(db)
        return []
    plus = ranking_for(db, Method.KPLUS)
    bar = ranking_for(db, Method.KBAR)
    return [Comparison(q, entails(plus, q), entails(bar, q)) for q in queries]


def parse_query(line: str, db: DefaultDatabase | None = None, method: Method = Method.KBAR,
                lineno: int | None = None) -> Query:
    """Parse ``GIVEN |~ CONCLUSION``."""
    if line.count("|~") != 1:
        raise ParseError("a query needs exactly one '|~'", line=lineno, column=1)
    cut = line.index("|~")
    vocab = db.vocabulary if db is not None else None
    try:
        evidence = parse_formula(line[:cut], vocab)
        conclusion = parse_formula(line[cut + 2:], vocab, column_offset=cut + 2)
    except ParseError as err:
        raise ParseError(err.message, line=lineno, column=err.column) from None
    return Query(evidence, conclusion, method)


def parse_queries(text: str, db: DefaultDatabase | None = None) -> list[Query]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if line.strip():
            out.append(parse_query(line, db, lineno=lineno))
    return out


def load_queries(path: str | Path, db: DefaultDatabase | None = None) -> list[Query]:
    try:
        return parse_queries(Path(path).read_text(encoding="utf-8"), db)
    except ParseError as err:
        err.source = str(path)
        raise
