"""Ranking-based default reasoning: System Z+ and its ceteris-paribus refinement kappa-bar."""

from .consequence import Comparison, Method, Query, compare_methods, entails, parse_query, ranking_for
from .cp import (
    CpCondition,
    CpGraph,
    cp_acyclicity_check,
    extract_cp_conditions,
    is_cp_admissible,
    kappa_bar,
    witness_ranking,
)
from .defaults import (
    Default,
    DefaultDatabase,
    Status,
    agree,
    is_tolerated,
    load_database,
    material_counterpart,
    parse_database,
    status,
)
from .errors import (
    FixpointGuardExceeded,
    InconsistentDatabase,
    KappaError,
    ParseError,
    VocabularyMismatch,
    VocabularyTooLarge,
)
from .logic import BOTTOM, TOP, Atom, Formula, Vocabulary, World, atoms, evaluate, is_satisfiable, models, parse_formula
from .zplus import (
    INF,
    Partition,
    Ranking,
    conditional_rank,
    is_admissible,
    is_consistent,
    kappa_plus,
    rank_of,
    z_partition,
)

__version__ = "0.1.0"
