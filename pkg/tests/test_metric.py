import itertools
from fractions import Fraction

import pytest

from gfgraph.core import FiniteGraph, GraphError, path_graph
from gfgraph.generators import (
    LazyGraph,
    chain,
    cycle,
    grandfather,
    great_grandfather,
    regular_tree,
    relabel,
    spine_cycle_fake,
)
from gfgraph.iso import are_isomorphic
from gfgraph.metric import (
    AgreementReport,
    BallCache,
    BudgetExceeded,
    OracleIntegrityError,
    agree_radius,
    ball,
    balls_agree,
    distance_table,
)
from oracles import explicit_grandfather_piece, nx_ball_iso, nx_isomorphic, nx_rooted_ball


def test_ball_examples():
    b = ball(chain(), 2)
    assert are_isomorphic(b, type(b)(path_graph(5), 2, 2), rooted=True)
    g3 = ball(grandfather(3), 1)
    assert (g3.vertex_count, len(g3.graph.edges)) == (9, 15)
    for g in (chain(), grandfather(4), relabel(cycle(5), 1)):
        assert ball(g, 0).graph == FiniteGraph(1)


@pytest.mark.parametrize("n, r", [(3, 1), (3, 2), (4, 1), (3, 3)])
def test_ball_matches_explicit_construction(n, r):
    piece = explicit_grandfather_piece(n, 2 * r + 2, 2 * r + 2)
    ref, root = nx_rooted_ball(piece, (0, ()), r)
    b = ball(grandfather(n), r)
    assert b.vertex_count == ref.vertex_count
    assert len(b.graph.edges) == len(ref.edges)
    assert nx_isomorphic(b.graph, ref, (b.root, root))


def test_great_grandfather_matches_explicit_construction():
    piece = explicit_grandfather_piece(3, 8, 8, k=1)
    ref, root = nx_rooted_ball(piece, (0, ()), 2)
    b = ball(great_grandfather(3, 1), 2)
    assert nx_isomorphic(b.graph, ref, (b.root, root))


def test_ball_counts_golden():
    # recorded from this implementation's own ball oracle
    assert [ball(grandfather(3), r).vertex_count for r in range(4)] == [1, 9, 41, 169]


def test_budget():
    with pytest.raises(BudgetExceeded):
        ball(grandfather(4), 3, budget=100)
    assert ball(grandfather(3), 1, budget=9).vertex_count == 9


def _broken(kind):
    def nbrs(k):
        base = [k - 1, k + 1]
        if kind == "loop" and k == 0:
            base.append(0)
        if kind == "dup" and k == 0:
            base.append(1)
        if kind == "asym" and k == 0:
            base.append(5)
        return tuple(sorted(base))

    return LazyGraph(0, nbrs, kind)


@pytest.mark.parametrize("kind", ["loop", "dup", "asym"])
def test_oracle_integrity(kind):
    with pytest.raises(OracleIntegrityError):
        ball(_broken(kind), 6)


def test_agree_radius_examples():
    rep = agree_radius(grandfather(3), grandfather(3), 4)
    assert rep.truncated and rep.distance == 0 and rep.render() == "agree_radius=all distance=0 (truncated at 4)"
    rep = agree_radius(chain(), cycle(9), 8)
    assert (rep.max_agree_radius, rep.distance, rep.truncated) == (3, Fraction(1, 8), False)
    assert rep.render() == "agree_radius=3 distance=1/8"
    rep = agree_radius(grandfather(3), spine_cycle_fake(3, 7), 1)
    assert rep.truncated and rep.upper_bound == Fraction(1, 2)
    # for k = 5 the fake already differs at radius one
    assert agree_radius(grandfather(3), spine_cycle_fake(3, 5), 1).max_agree_radius == 0


def test_distance_table_examples():
    reps = distance_table(chain(), [cycle(m) for m in range(3, 13)], 8)
    want = [1, "1/2", "1/2", "1/4", "1/4", "1/8", "1/8", "1/16", "1/16", "1/32"]
    assert [r.distance for r in reps] == [Fraction(w) for w in want]
    assert [r.max_agree_radius for r in reps] == [(m - 2) // 2 for m in range(3, 13)]
    g = regular_tree(3)
    assert distance_table(g, [g], 3)[0].truncated
    assert distance_table(g, [], 3) == []


def test_chain_cycle_rows_against_networkx():
    z = chain()
    for m in range(3, 16):
        rep = agree_radius(z, cycle(m), 10)
        for r in range(0, 11):
            same = nx_ball_iso(ball(z, r), ball(cycle(m), r))
            assert same == (r <= rep.max_agree_radius)


ATLAS = [chain(), cycle(5), cycle(9), regular_tree(3), grandfather(3), great_grandfather(3, 1), spine_cycle_fake(3, 5)]


def test_symmetry_and_ultrametric_r5():
    cache = BallCache()
    rmax = 5
    R = {}
    for g, h in itertools.product(ATLAS, repeat=2):
        R[id(g), id(h)] = agree_radius(g, h, rmax, cache)
    for g, h in itertools.product(ATLAS, repeat=2):
        assert R[id(g), id(h)] == R[id(h), id(g)]
    for g, h, k in itertools.product(ATLAS, repeat=3):
        d = lambda a, b: R[id(a), id(b)].distance
        assert d(g, k) <= max(d(g, h), d(h, k))


def test_downward_closure_on_atlas():
    cache = BallCache()
    for g, h in itertools.product(ATLAS, repeat=2):
        agree = [balls_agree(g, h, r, cache) for r in range(5)]
        assert agree == sorted(agree, reverse=True)


def test_report_validation():
    with pytest.raises(GraphError):
        agree_radius(chain(), chain(), -1)
    rep = AgreementReport(0, 3, False)
    assert rep.distance == 1 and rep.render() == "agree_radius=0 distance=1"
