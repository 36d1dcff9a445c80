"""Command-line front end.

Exit codes: 0 success (or ENTAILED), 1 usage/parse/cap errors, 2 inconsistent
database, 3 NOT-ENTAILED.  ``--format structured`` prints a single JSON line
per invocation instead of tables.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, TextIO

from .consequence import Method, Query, compare_methods, compared_ranks, entails, load_queries, ranking_for
from .cp import ORIENTATION_NOTE, extract_cp_conditions
from .defaults import DefaultDatabase, load_database
from .errors import InconsistentDatabase, KappaError, ParseError
from .logic import DEFAULT_CAP, MAX_CAP, parse_formula
from .records import cp_record, encode_rank, partition_record, ranking_record
from .zplus import INF, Rank, z_partition

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_NOT_ENTAILED = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    path: str
    method: Method = Method.KBAR
    output: str = "table"
    cap: int = DEFAULT_CAP
    verbosity: int = 0
    given: str | None = None
    conclude: str | None = None
    queries: str | None = None

    def __post_init__(self):
        if not 0 <= self.cap <= MAX_CAP:
            raise ValueError(f"--cap must lie in 0..{MAX_CAP}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cap(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_CAP:
        raise argparse.ArgumentTypeError(f"cap must lie in 0..{MAX_CAP}")
    return value


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    def default(v):
        return argparse.SUPPRESS if suppress else v

    p.add_argument("--cap", type=_cap, default=default(DEFAULT_CAP),
                   help=f"maximum number of atoms to enumerate (<= {MAX_CAP})")
    p.add_argument("--format", choices=["table", "structured"], default=default("table"))
    p.add_argument("--quiet", action="store_const", const=-1, dest="verbosity", default=default(0),
                   help="print only the headline")
    p.add_argument("-v", "--verbose", action="store_const", const=1, dest="verbosity",
                   default=default(0), help="debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kappabar", description="System Z+ and cp-refined (kappa-bar) default reasoning")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    methods = [m.value for m in Method]
    p = sub.add_parser("check", help="toleration partition / consistency")
    p.add_argument("file")
    p = sub.add_parser("rank", help="print a ranking grouped by rank")
    p.add_argument("file")
    p.add_argument("--method", choices=methods, default="kbar")
    p = sub.add_parser("cp", help="list cp-conditions")
    p.add_argument("file")
    p = sub.add_parser("query", help="decide GIVEN |~ CONCLUDE")
    p.add_argument("file")
    p.add_argument("--given", required=True)
    p.add_argument("--conclude", required=True)
    p.add_argument("--method", choices=methods, default="kbar")
    p = sub.add_parser("compare", help="kappa+ versus kappa-bar on a query file")
    p.add_argument("file")
    p.add_argument("queries")
    for p in sub.choices.values():
        _global_options(p, suppress=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        path=args.file,
        method=Method(getattr(args, "method", "kbar")),
        output=args.format,
        cap=args.cap,
        verbosity=args.verbosity,
        given=getattr(args, "given", None),
        conclude=getattr(args, "conclude", None),
        queries=getattr(args, "queries", None),
    )


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------

def _fmt_rank(r: Rank) -> str:
    return "inf" if r == INF else str(r)


class _Report:
    """Collects the structured record and the table lines for one command."""

    def __init__(self, cfg: RunConfig, db: DefaultDatabase | None):
        self.cfg = cfg
        self.record: dict[str, Any] = {"command": cfg.command, "file": cfg.path,
                                       "orientation": ORIENTATION_NOTE}
        if db is not None:
            self.record["vocabulary"] = list(db.vocabulary.atoms)
        self.headline: list[str] = []
        self.body: list[str] = []

    def emit(self, out: TextIO) -> None:
        if self.cfg.output == "structured":
            out.write(json.dumps(self.record, ensure_ascii=False) + "\n")
            return
        lines = self.headline if self.cfg.verbosity < 0 else self.headline + self.body
        for line in lines:
            out.write(line + "\n")


def _inconsistent(report: _Report, err: InconsistentDatabase) -> int:
    report.record["consistent"] = False
    report.record["residual"] = [d.name for d in err.residual]
    report.headline.append("INCONSISTENT")
    report.body.append("  residual: " + ", ".join(str(d) for d in err.residual))
    return EXIT_INCONSISTENT


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_check(db: DefaultDatabase, report: _Report, cfg: RunConfig) -> int:
    part = z_partition(db)
    report.record.update(partition_record(part))
    if not part.consistent:
        report.headline.append("INCONSISTENT")
        report.body.append(f"  placed {len(part)} layer(s) before getting stuck")
        report.body.append("  residual: " + ", ".join(str(d) for d in part.residual))
        return EXIT_INCONSISTENT
    report.headline.append(f"CONSISTENT ({len(part)} layer{'s' if len(part) != 1 else ''})")
    for i, (layer, s) in enumerate(zip(part.layers, part.max_strengths)):
        report.body.append(f"  layer {i} (max strength {s}): " + "; ".join(str(d) for d in layer))
    return EXIT_OK


def cmd_rank(db: DefaultDatabase, report: _Report, cfg: RunConfig) -> int:
    ranking = ranking_for(db, cfg.method)
    report.record["method"] = cfg.method.value
    report.record["ranking"] = ranking_record(ranking)
    levels = ranking.levels()
    report.headline.append(f"{cfg.method.value}: {len(levels)} level(s), max rank {_fmt_rank(ranking.max_rank())}")
    width = max(len(_fmt_rank(r)) for r in levels)
    report.body.append(f"  {'rank':>{max(width, 4)}}  worlds")
    for r, worlds in levels.items():
        report.body.append(f"  {_fmt_rank(r):>{max(width, 4)}}  " + ", ".join(w.label() for w in worlds))
    return EXIT_OK


def cmd_cp(db: DefaultDatabase, report: _Report, cfg: RunConfig) -> int:
    graph = extract_cp_conditions(db)
    report.record["conditions"] = cp_record(graph)
    report.headline.append(f"{len(graph)} cp-condition(s)")
    report.body.append(f"  ({ORIENTATION_NOTE})")
    for row in report.record["conditions"]:
        report.body.append(f"  {row['upper']}  >{row['strength']}  {row['lower']}  [{', '.join(row['witness'])}]")
    return EXIT_OK


def cmd_query(db: DefaultDatabase, report: _Report, cfg: RunConfig) -> int:
    query = Query(_formula(cfg.given, db, "--given"), _formula(cfg.conclude, db, "--conclude"), cfg.method)
    ranking = ranking_for(db, cfg.method)
    verdict = entails(ranking, query)
    positive, negative = compared_ranks(ranking, query)
    evidence = ranking.rank_of(query.evidence)
    report.record.update({
        "method": cfg.method.value,
        "given": str(query.evidence),
        "conclude": str(query.conclusion),
        "entailed": verdict,
        "given_rank": encode_rank(evidence),
        "ranks": [encode_rank(positive), encode_rank(negative)],
    })
    report.headline.append("ENTAILED" if verdict else "NOT-ENTAILED")
    report.body.append(f"  {cfg.method.value}: rank({query.evidence & query.conclusion}) = {_fmt_rank(positive)}"
                       f" vs rank({query.evidence & ~query.conclusion}) = {_fmt_rank(negative)};"
                       f" rank({query.evidence}) = {_fmt_rank(evidence)}")
    return EXIT_OK if verdict else EXIT_NOT_ENTAILED


def cmd_compare(db: DefaultDatabase, report: _Report, cfg: RunConfig) -> int:
    queries = load_queries(cfg.queries, db)
    results = compare_methods(db, queries)
    diverging = sum(r.divergent for r in results)
    report.record["results"] = [
        {"query": str(r.query), "kplus": r.kplus, "kbar": r.kbar, "divergent": r.divergent}
        for r in results
    ]
    report.record["divergences"] = diverging
    report.headline.append(f"{len(results)} quer{'y' if len(results) == 1 else 'ies'}, {diverging} divergent")
    for r in results:
        mark = "  *" if r.divergent else "   "
        report.body.append(f"{mark} {r.query}: kplus {_verdict(r.kplus)}, kbar {_verdict(r.kbar)}")
    return EXIT_OK


def _verdict(flag: bool) -> str:
    return "ENTAILED" if flag else "NOT-ENTAILED"


def _formula(text: str | None, db: DefaultDatabase, flag: str):
    try:
        return parse_formula(text or "", db.vocabulary)
    except ParseError as err:
        raise ParseError(f"{flag} {text!r}: {err}") from None


COMMANDS: dict[str, Callable[[DefaultDatabase, _Report, RunConfig], int]] = {
    "check": cmd_check,
    "rank": cmd_rank,
    "cp": cmd_cp,
    "query": cmd_query,
    "compare": cmd_compare,
}


def run(cfg: RunConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    report = _Report(cfg, None)
    try:
        db = load_database(cfg.path, cap=cfg.cap)
        report = _Report(cfg, db)
        code = COMMANDS[cfg.command](db, report, cfg)
    except InconsistentDatabase as exc:
        code = _inconsistent(report, exc)
    except (KappaError, OSError, UnicodeDecodeError) as exc:
        source = getattr(exc, "source", None)
        message = f"{source}: {exc}" if source else str(exc)
        if cfg.output == "structured":
            report.record.update({"error": type(exc).__name__, "message": message})
            report.emit(out)
        else:
            err.write(f"kappabar: error: {message}\n")
        return EXIT_USAGE
    report.emit(out)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    logging.basicConfig(level=logging.DEBUG if cfg.verbosity > 0 else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(cfg)


def entry_point() -> None:
    sys.exit(main())
