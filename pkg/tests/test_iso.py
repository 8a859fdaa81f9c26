import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfgraph.core import FiniteGraph, RootedBall, complete_graph, cycle_graph, path_graph
from gfgraph.generators import chain, cycle, grandfather, spine_cycle_fake
from gfgraph.iso import (
    SizeGuardError,
    are_isomorphic,
    automorphisms,
    brute_force_canonical,
    brute_force_isomorphic,
    canonical_code,
    canonical_labeling,
    directed_edge_orbits,
    directed_edges,
    enumerate_automorphisms,
    group_elements,
    is_isomorphism,
)
from gfgraph.metric import ball
from oracles import all_graphs, nx_isomorphic, random_graph, random_perm
from test_core import graphs


def test_triangle_codes_equal_under_permutation():
    t = complete_graph(3)
    assert canonical_code(t) == canonical_code(FiniteGraph(3, [(1, 2), (2, 0), (0, 1)]))


def test_rooting_distinguishes_path():
    p3 = path_graph(3)
    assert canonical_code(p3, 0) != canonical_code(p3, 1)
    assert canonical_code(p3, 0) == canonical_code(p3, 2)
    assert canonical_code(p3) != canonical_code(p3, 0)


def test_b1_codes_of_grandfather_and_long_fake_agree():
    a = ball(grandfather(3), 1)
    b = ball(spine_cycle_fake(3, 7), 1)
    assert canonical_code(a) == canonical_code(b)
    assert nx_isomorphic(a.graph, b.graph, (a.root, b.root))


def test_code_is_deterministic():
    g = ball(grandfather(3), 2)
    assert canonical_code(g).data == canonical_code(g).data
    assert canonical_code(g).hex() == canonical_code(g).data.hex()


def test_are_isomorphic_examples():
    g = cycle_graph(6)
    assert are_isomorphic(g, g) == list(range(6))
    assert are_isomorphic(path_graph(9), cycle_graph(9)) is None
    m = are_isomorphic(ball(chain(), 3), ball(cycle(9), 3), rooted=True)
    assert m is not None and m[0] == 0


def test_are_isomorphic_witness_is_valid():
    rng = random.Random(3)
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 10))
        perm = random_perm(rng, g.vertex_count)
        h = g.permuted(perm)
        m = are_isomorphic(g, h)
        assert m is not None and is_isomorphism(g, h, m)


def test_automorphism_examples():
    gens = automorphisms(complete_graph(3))
    assert len(group_elements(gens, 3)) == 6
    assert automorphisms(path_graph(2), 0) == []
    b = ball(grandfather(3), 1)
    order = len(group_elements(automorphisms(b), 9))
    assert order == 8 == len(enumerate_automorphisms(b))


def test_orbit_examples():
    b = ball(grandfather(3), 1)
    root_edges = [(0, w) for w in b.graph.adjacency[0]]
    sizes = sorted(len(o) for o in directed_edge_orbits(b, edges=root_edges))
    assert sizes == [1, 1, 2, 4]
    assert len(directed_edge_orbits(complete_graph(3))) == 1
    assert directed_edge_orbits(path_graph(3), 1, [(1, 0), (1, 2)]) == [[(1, 0), (1, 2)]]


def test_orbits_are_stable_under_generators():
    rng = random.Random(5)
    for _ in range(100):
        g = random_graph(rng, rng.randint(2, 9))
        gens = automorphisms(g)
        orbits = directed_edge_orbits(g)
        which = {e: i for i, o in enumerate(orbits) for e in o}
        assert set(which) == set(directed_edges(g))
        for p in gens:
            assert is_isomorphism(g, g, p)
            for u, v in which:
                assert which[(p[u], p[v])] == which[(u, v)]


def test_orbits_match_enumerated_group():
    rng = random.Random(8)
    for _ in range(60):
        g = random_graph(rng, rng.randint(2, 7))
        root = rng.randrange(g.vertex_count)
        full = enumerate_automorphisms(g, root)
        assert len(group_elements(automorphisms(g, root), g.vertex_count)) == len(full)
        brute = {}
        for e in directed_edges(g):
            brute.setdefault(frozenset((p[e[0]], p[e[1]]) for p in full), []).append(e)
        assert sorted(map(sorted, brute.values())) == directed_edge_orbits(g, root)


@settings(max_examples=200, deadline=None)
@given(graphs(max_vertices=10), st.randoms(use_true_random=False))
def test_code_invariant_under_permutation(g, rnd):
    perm = list(range(g.vertex_count))
    rnd.shuffle(perm)
    h = g.permuted(perm)
    assert canonical_code(g) == canonical_code(h)
    root = rnd.randrange(g.vertex_count)
    assert canonical_code(g, root) == canonical_code(h, perm[root])


def test_labeling_maps_to_code():
    g = cycle_graph(5)
    code, pos = canonical_labeling(g)
    assert sorted(pos) == list(range(5))
    assert code == canonical_code(g.permuted(pos))


def test_exhaustive_small_graphs_against_brute_force():
    for n in range(1, 6):
        ours, theirs = {}, {}
        for g in all_graphs(n):
            ours.setdefault(canonical_code(g), set()).add(g.edges)
            theirs.setdefault(brute_force_canonical(g), set()).add(g.edges)
        assert sorted(map(sorted, ours.values())) == sorted(map(sorted, theirs.values()))


def test_rooted_small_graphs_against_brute_force():
    for g in all_graphs(4):
        for r in range(4):
            for s in range(4):
                assert (canonical_code(g, r) == canonical_code(g, s)) == (
                    brute_force_canonical(g, r) == brute_force_canonical(g, s)
                )


def test_against_networkx_vf2():
    rng = random.Random(21)
    for _ in range(300):
        n = rng.randint(5, 12)
        g = random_graph(rng, n)
        h = g.permuted(random_perm(rng, n)) if rng.random() < 0.5 else random_graph(rng, n, 0.5)
        assert (are_isomorphic(g, h) is not None) == nx_isomorphic(g, h)


def test_regular_graphs_need_search():
    # both 3-regular on 6 vertices: refinement alone cannot tell them apart
    prism = FiniteGraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])
    k33 = FiniteGraph(6, [(a, b) for a in range(3) for b in range(3, 6)])
    assert are_isomorphic(prism, k33) is None
    assert brute_force_isomorphic(prism, k33) is False
    assert len(group_elements(automorphisms(k33), 6)) == 72
    assert len(group_elements(automorphisms(prism), 6)) == 12


def test_size_guards():
    with pytest.raises(SizeGuardError):
        brute_force_canonical(path_graph(9))
    with pytest.raises(SizeGuardError):
        automorphisms(path_graph(70))


def test_empty_graph_codes():
    assert canonical_code(FiniteGraph(0)) == canonical_code(FiniteGraph(0))
    assert canonical_code(FiniteGraph(2)) != canonical_code(path_graph(2))
    assert list(itertools.islice(all_graphs(0), 2)) == [FiniteGraph(0)]
