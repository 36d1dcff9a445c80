import random

import numpy as np
import pytest

from kappabar import (
    BOTTOM,
    INF,
    TOP,
    Default,
    DefaultDatabase,
    InconsistentDatabase,
    Ranking,
    Vocabulary,
    atoms,
    conditional_rank,
    is_admissible,
    is_consistent,
    is_tolerated,
    kappa_bar,
    kappa_plus,
    parse_database,
    rank_of,
    z_partition,
)
from kappabar.errors import FixpointGuardExceeded
from kappabar.zplus import least_fixpoint, lower_bounds, sweep_guard

from oracles import brute_admissible, brute_fixpoint, brute_partition, random_databases

b, p, f, l = atoms("b p f l")

PENGUIN_KPLUS = {
    "!b !p !f": 0, "!b !p f": 0, "b !p f": 0,
    "b !p !f": 1, "b p !f": 1,
    "b p f": 2, "!b p f": 2, "!b p !f": 2,
}


# -- z_partition / consistency ------------------------------------------------

def test_penguin_partition(penguin):
    part = z_partition(penguin)
    assert part.consistent
    assert [[d.label for d in layer] for layer in part.layers] == [["d1"], ["d2", "d3"]]
    assert part.max_strengths == (0, 0)


def test_contradiction_is_inconsistent():
    db = parse_database("b -> f\nb -> !f\ntrue -> b\n")
    part = z_partition(db)
    assert not part.consistent
    assert not is_consistent(db)
    layers, residual = brute_partition(db)
    assert list(part.residual) == residual and not layers


def test_empty_partition(empty):
    part = z_partition(empty)
    assert part.consistent and len(part) == 0
    assert is_consistent(empty)


def test_penguin_consistent(penguin):
    assert is_consistent(penguin)


def test_layers_replay_toleration():
    for db in random_databases(200, seed=3):
        part = z_partition(db)
        layers, residual = brute_partition(db)
        assert [list(x) for x in part.layers] == layers
        assert list(part.residual) == residual
        for i, layer in enumerate(part.layers):
            assert layer
            for d in layer:
                assert is_tolerated(d, part.remaining(i), db.vocabulary)


# -- admissibility -------------------------------------------------------------

def test_legs_ranking_admissible(legs):
    r = Ranking.from_array(legs.vocabulary, [1 if x["b"] and (not x["f"] or not x["l"]) else 0
                                             for x in legs.vocabulary.worlds()])
    assert is_admissible(r, legs)


def test_all_zero_not_admissible():
    db = parse_database("b -> f\n")
    assert not is_admissible(Ranking.zero(db.vocabulary), db)


def test_cp_counterexample_not_admissible(penguin):
    r = Ranking.from_labels(penguin.vocabulary, {"b !p !f": 1, "!b p f": 1})
    assert not is_admissible(r, penguin)


def test_unverifiable_default_never_admissible():
    db = parse_database("b -> !b\n")
    for bump in (0, 1, 5):
        r = Ranking.from_array(db.vocabulary, [0, bump])
        assert not is_admissible(r, db)


def test_infinite_ranks():
    db = parse_database("b -> f\n")
    r = Ranking.from_labels(db.vocabulary, {"b !f": INF})
    assert is_admissible(r, db)
    assert rank_of(r, b & ~f) == INF


# -- kappa+ ---------------------------------------------------------------------

def test_kappa_plus_legs_formula(legs):
    r = kappa_plus(legs)
    for x, rank in r:
        assert rank == (1 if x["b"] and (not x["f"] or not x["l"]) else 0)


def test_kappa_plus_penguin(penguin):
    r = kappa_plus(penguin)
    assert {x.label(): rank for x, rank in r} == PENGUIN_KPLUS
    assert list(r.ranks) == brute_fixpoint(penguin)


def test_kappa_plus_empty(empty):
    assert kappa_plus(empty) == Ranking.zero(empty.vocabulary)


def test_kappa_plus_rejects_inconsistent():
    with pytest.raises(InconsistentDatabase) as info:
        kappa_plus(parse_database("b -> f\nb -> !f\n"))
    assert len(info.value.residual) == 2


def test_kappa_plus_strength_spacing():
    db = parse_database("b -> f [2]\n")
    r = kappa_plus(db)
    assert r["b !f"] == 3 and r["b f"] == 0


def test_guard_trips_on_runaway_iteration():
    # skipping the consistency check: the two bounds keep pushing each other up
    db = parse_database("b -> f\nf -> b\nb -> !f\n")
    with pytest.raises(FixpointGuardExceeded):
        least_fixpoint(db)


# -- rank_of / conditional_rank -------------------------------------------------

def test_rank_of_penguin(penguin):
    # b p !f sits at rank 1 in the kappa+ table, so the cheapest p-world costs 1
    assert rank_of(kappa_plus(penguin), p) == 1
    assert rank_of(kappa_plus(penguin), p & ~b) == 2
    assert rank_of(kappa_plus(penguin), BOTTOM) == INF
    assert rank_of(kappa_bar(penguin), p & ~b & ~f) == 2


def test_conditional_rank_examples(penguin):
    bar = kappa_bar(penguin)
    assert conditional_rank(bar, ~f, p & ~b) == 0
    assert conditional_rank(bar, f, p & ~b) == 1
    assert conditional_rank(bar, TOP, TOP) == 0
    assert conditional_rank(bar, f, BOTTOM) == INF
    assert conditional_rank(bar, b & ~b, p) == INF


def test_ranking_needs_a_zero():
    with pytest.raises(ValueError):
        Ranking(Vocabulary(("a",)), (1, 2))
    Ranking(Vocabulary(("a",)), (INF, INF))


# -- invariants -----------------------------------------------------------------

SAMPLE = random_databases(500, seed=11)


def test_kappa_plus_matches_brute_fixpoint_and_is_tight():
    checked = 0
    for db in SAMPLE:
        if not is_consistent(db):
            continue
        r = kappa_plus(db)
        assert list(r.ranks) == brute_fixpoint(db)
        assert is_admissible(r, db) and brute_admissible(r.ranks, db)
        bounds = lower_bounds(r, db)
        for i, rank in enumerate(r.ranks):
            assert rank == bounds[i]
            if rank > 0:
                lowered = list(r.ranks)
                lowered[i] -= 1
                assert not is_admissible(Ranking(db.vocabulary, tuple(lowered)), db)
        checked += 1
    assert checked > 200


def test_partition_iff_admissible_ranking():
    for db in SAMPLE:
        consistent = z_partition(db).consistent
        if consistent:
            assert is_admissible(kappa_plus(db), db)
        else:
            # no finite fixpoint exists; the oracle iteration never settles
            assert brute_fixpoint(db, limit=200) is None


def test_admissibility_closed_under_min():
    rng = random.Random(5)
    hits = 0
    for db in SAMPLE[:250]:
        if not is_consistent(db):
            continue
        base = np.asarray(kappa_plus(db).ranks)
        found = []
        for _ in range(30):
            cand = base + np.array([rng.randint(0, 3) for _ in base])
            cand -= cand.min()
            r = Ranking.from_array(db.vocabulary, cand)
            if is_admissible(r, db):
                found.append(r)
        for r1, r2 in zip(found, found[1:]):
            assert is_admissible(r1.pointwise_min(r2), db)
            hits += 1
    assert hits > 100


def test_sweep_guard_formula(penguin):
    assert sweep_guard(penguin) == 8 * 3 + 1
