import json

import pytest

from gfgraph.core import GraphError
from gfgraph.generators import (
    LazyGraph,
    chain,
    father_of,
    grandfather,
    great_grandfather,
    regular_tree,
    relabel,
    spine_cycle_fake,
)
from gfgraph.labeling import Family, LabeledRegion, label_region
from gfgraph.metric import ball
from gfgraph.verifier import (
    FatherCycleWitness,
    FrontierExhausted,
    PreconditionError,
    VerdictKind,
    check_grandfather_closure,
    check_tree_restriction,
    father_cycle_search,
    grandfather_ball,
    reconstruct_isomorphism,
    verify_certificate,
    verify_isolated,
    verify_witness,
)
from oracles import nx_isomorphic


def rewired_grandfather(n: int, v, new) -> LazyGraph:
    """grandfather(n) with the edge from ``v`` to its grandfather moved to ``new``."""
    g = grandfather(n)
    old = father_of(father_of(v))

    def nbrs(x):
        out = set(g.neighbors(x))
        if x == v:
            out.discard(old)
            out.add(new)
        elif x == old:
            out.discard(v)
        elif x == new:
            out.add(v)
        return tuple(sorted(out))

    return LazyGraph(g.basepoint, nbrs, "mutant")


def test_father_cycle_search():
    w = father_cycle_search(label_region(spine_cycle_fake(3, 7), 3, 6))
    assert w is not None and w.order == 7
    assert father_cycle_search(label_region(grandfather(3), 3, 4)) is None
    # bounded-radius caveat: a region of radius 1 cannot close an 8-cycle
    assert father_cycle_search(label_region(spine_cycle_fake(3, 8), 3, 1)) is None


def test_witness_reverification():
    f = spine_cycle_fake(3, 7)
    w = father_cycle_search(label_region(f, 3, 6))
    assert verify_witness(f, 3, w)
    assert f.father(w.off_cycle_son) == w.cycle[0]
    forged = FatherCycleWitness(w.cycle[:-1], w.off_cycle_son)
    assert not verify_witness(f, 3, forged)
    on_cycle = FatherCycleWitness(w.cycle, w.cycle[1])
    assert not verify_witness(f, 3, on_cycle)


def test_check_tree_restriction():
    assert check_tree_restriction(label_region(grandfather(3), 3, 4)).ok
    rep = check_tree_restriction(label_region(spine_cycle_fake(3, 7), 3, 6))
    assert not rep.ok and "cycle of length 7" in rep.detail and len(rep.cycle) == 7
    assert check_tree_restriction(label_region(grandfather(4), 4, 3)).ok


def test_check_grandfather_closure():
    assert check_grandfather_closure(label_region(grandfather(3), 3, 3)).ok
    assert check_grandfather_closure(label_region(spine_cycle_fake(3, 7), 3, 4)).ok
    lr = label_region(grandfather(3), 3, 3)
    v = (0, (1,))
    fam = lr.families[v]
    uncle = (2, (1,))  # brother of the true grandfather (1, ())
    fams = dict(lr.families)
    fams[v] = Family(fam.father, fam.sons, uncle, fam.grandsons)
    rep = check_grandfather_closure(LabeledRegion(lr.graph, 3, 3, lr.dist, lr.neighbors, fams))
    assert not rep.ok and rep.vertex == v


def test_mutated_oracle_leaves_consistent():
    v = (0, (0,))
    mutant = rewired_grandfather(3, v, (2, (1,)))
    assert mutant.neighbors(v) != grandfather(3).neighbors(v)
    verdict = verify_isolated(mutant, 3, 4)
    assert verdict.kind is VerdictKind.REJECT_B1
    # a mutation far from the basepoint is caught too
    far = rewired_grandfather(3, (0, (1, 1, 0)), (2, (1,)))
    assert verify_isolated(far, 3, 4).kind is not VerdictKind.CONSISTENT


@pytest.mark.parametrize("seed", [0, 1])
def test_reconstruction_relabeled(seed):
    h = relabel(grandfather(3), seed)
    lr = label_region(h, 3, 4)
    cert = reconstruct_isomorphism(lr, 5)
    assert verify_certificate(lr, 3, cert)
    # independent check with networkx on the balls
    b = ball(h, 5)
    target = grandfather_ball(3, 5)
    index = {c: i for i, c in enumerate(target.refs)}
    image = [index[cert.mapping[t]] for t in b.refs]
    assert len(set(image)) == b.vertex_count
    mapped = {frozenset((image[u], image[v])) for u, v in b.graph.edges}
    assert mapped == {frozenset(e) for e in target.graph.edges}
    # fathers are transported to the father map
    for t, c in cert.mapping.items():
        f = lr.father_map().get(t)
        if f is not None and f in cert.mapping:
            assert cert.mapping[f] == father_of(c)


def test_reconstruction_identity_up_to_letters():
    lr = label_region(grandfather(3), 3, 4)
    cert = reconstruct_isomorphism(lr, 5)
    for v, c in cert.mapping.items():
        assert c[0] == v[0] and len(c[1]) == len(v[1])
        if v[1]:
            assert cert.mapping[father_of(v)] == father_of(c)


def test_reconstruction_errors():
    with pytest.raises(PreconditionError):
        reconstruct_isomorphism(label_region(spine_cycle_fake(3, 7), 3, 6), 5)
    with pytest.raises(FrontierExhausted):
        reconstruct_isomorphism(label_region(grandfather(3), 3, 1), 5)


def test_tampered_certificate_rejected():
    lr = label_region(grandfather(3), 3, 2)
    cert = reconstruct_isomorphism(lr, 3)
    assert verify_certificate(lr, 3, cert)
    mapping = dict(cert.mapping)
    a, b = (0, (0,)), (0, (1,))
    mapping[a], mapping[b] = mapping[b], mapping[(0, (0, 0))]
    assert not verify_certificate(lr, 3, type(cert)(mapping, 3))


def test_verify_examples():
    v = verify_isolated(grandfather(3), 3, 5)
    assert v.kind is VerdictKind.CONSISTENT and v.certificate.radius == 5
    v = verify_isolated(spine_cycle_fake(3, 7), 3, 9)
    assert v.kind is VerdictKind.NOT_TRANSITIVE and v.witness.order == 7
    v = verify_isolated(chain(), 3, 3)
    assert v.kind is VerdictKind.REJECT_B1 and v.vertex == 0
    # cycles of length 5 and 6 are caught one step earlier, by B1
    assert verify_isolated(spine_cycle_fake(3, 5), 3, 7).kind is VerdictKind.REJECT_B1


@pytest.mark.parametrize("n, rmax", [(3, 5), (4, 4)])
def test_consistent_on_grandfather_and_relabelings(n, rmax):
    for g in (grandfather(n), relabel(grandfather(n), 2)):
        for r in range(1, rmax + 1):
            assert verify_isolated(g, n, r).kind is VerdictKind.CONSISTENT


@pytest.mark.parametrize("k", [7, 8, 9, 10, 12])
def test_fakes_caught_when_cycle_fits(k):
    for n in (3, 4):
        r = -(-(k + 2) // 2)  # smallest R with k <= 2R - 2
        v = verify_isolated(spine_cycle_fake(n, k), n, r)
        assert v.kind is VerdictKind.NOT_TRANSITIVE and v.witness.order == k


def test_other_rejections():
    assert verify_isolated(regular_tree(3), 3, 2).kind is VerdictKind.REJECT_B1
    assert verify_isolated(great_grandfather(3, 1), 3, 2).kind is VerdictKind.REJECT_B1
    assert verify_isolated(grandfather(4), 3, 2).kind is VerdictKind.REJECT_B1


def test_budget_gives_inconclusive():
    v = verify_isolated(grandfather(4), 4, 4, budget=500)
    assert v.kind is VerdictKind.INCONCLUSIVE and "budget" in v.reason


def test_verdict_serialization():
    v = verify_isolated(spine_cycle_fake(3, 7), 3, 9)
    rec = json.loads(v.record())
    assert rec["verdict"] == "NOT_TRANSITIVE" and rec["k"] == 7 and len(rec["cycle"]) == 7
    assert "\n" not in v.record()
    assert v.record() == verify_isolated(spine_cycle_fake(3, 7), 3, 9).record()
    assert "off-cycle son" in v.dump()
    rec = json.loads(verify_isolated(grandfather(3), 3, 2).record())
    assert rec == {"certified_vertices": 41, "n": 3, "radius": 2, "verdict": "CONSISTENT"}


def test_radius_must_be_positive():
    with pytest.raises(GraphError):
        verify_isolated(grandfather(3), 3, 0)


def test_region_ball_equals_fresh_ball():
    h = relabel(grandfather(3), 8)
    v = verify_isolated(h, 3, 4)
    fresh = ball(h, 4)
    from gfgraph.verifier import region_ball

    rb = region_ball(v.region, 4)
    assert rb == fresh and rb.refs == fresh.refs
    with pytest.raises(FrontierExhausted):
        region_ball(v.region, 9)
