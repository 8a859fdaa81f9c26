"""Father / son / grandfather / grandson labels read off radius-one balls.

Inside the radius-one ball of the grandfather graph ``G_n`` the father and
the sons have ball-degree ``n + 1`` while the grandfather and grandsons have
ball-degree 2; the father is the one high-degree neighbor adjacent to all
the others.  :func:`classify_star` turns that into a constructive
isomorphism with the template ball and checks every induced edge, so a
successful classification is itself a proof that the ball matches.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Collection, Hashable, Iterator, Optional

from .core import GraphError, RootedBall
from .generators import LazyGraph, vertex_key
from .metric import DEFAULT_BUDGET, BudgetExceeded, OracleIntegrityError


class Label(enum.Enum):
    FATHER = "father"
    SON = "son"
    GRANDFATHER = "grandfather"
    GRANDSON = "grandson"

    @property
    def reverse(self) -> Label:
        return _REVERSE[self]

    def __str__(self) -> str:
        return self.value


_REVERSE = {
    Label.FATHER: Label.SON,
    Label.SON: Label.FATHER,
    Label.GRANDFATHER: Label.GRANDSON,
    Label.GRANDSON: Label.GRANDFATHER,
}


class B1Mismatch(GraphError):
    """The radius-one ball at ``vertex`` is not the grandfather-graph ball."""

    def __init__(self, vertex: Hashable, reason: str):
        super().__init__(f"B1 mismatch at {vertex_key(vertex)}: {reason}")
        self.vertex = vertex
        self.reason = reason


class LabelInconsistency(GraphError):
    """Two classifications disagree about one edge."""

    def __init__(self, edge: tuple, detail: str):
        super().__init__(
            f"label inconsistency at {vertex_key(edge[0])} -> {vertex_key(edge[1])}: {detail}"
        )
        self.edge = edge


@dataclass(frozen=True)
class Family:
    """Roles of a vertex's neighbors.  ``grandsons`` pairs each grandson with its father."""

    father: Hashable
    sons: tuple
    grandfather: Hashable
    grandsons: tuple[tuple[Hashable, Hashable], ...]

    @cached_property
    def _labels(self) -> dict[Hashable, Label]:
        out = {self.father: Label.FATHER, self.grandfather: Label.GRANDFATHER}
        for s in self.sons:
            out[s] = Label.SON
        for g, _ in self.grandsons:
            out[g] = Label.GRANDSON
        return out

    def labels(self) -> dict[Hashable, Label]:
        return self._labels

    @cached_property
    def _son_of(self) -> dict:
        return dict(self.grandsons)

    def son_of(self, grandson: Hashable) -> Hashable:
        return self._son_of[grandson]

    def profile(self) -> tuple[int, int, int, int]:
        return (1, len(self.sons), 1, len(self.grandsons))


def expected_profile(n: int) -> tuple[int, int, int, int]:
    return (1, n - 1, 1, (n - 1) ** 2)


def classify_star(
    center: Hashable,
    neighbors: Collection,
    neighbor_set: Callable[[Hashable], Collection],
    n: int,
) -> Family:
    """Classify the neighbors of ``center`` or raise :class:`B1Mismatch`.

    ``neighbor_set(x)`` must return the full neighbor collection of ``x``;
    only its intersection with the neighbors of ``center`` is used.
    """
    N = set(neighbors)
    hi_deg, lo_deg = n, 1  # neighbors inside N, i.e. ball degree minus the center
    if len(N) != n + 1 + (n - 1) ** 2 or center in N:
        raise B1Mismatch(center, "degree multiset mismatch")
    inner = {x: N.intersection(neighbor_set(x)) for x in N}
    hi = sorted(x for x, s in inner.items() if len(s) == hi_deg)
    lo = sorted(x for x, s in inner.items() if len(s) == lo_deg)
    if len(hi) != n or len(lo) != 1 + (n - 1) ** 2:
        raise B1Mismatch(center, "degree multiset mismatch")
    his = set(hi)
    fathers = [x for x in hi if his - {x} <= inner[x]]
    if len(fathers) != 1:
        raise B1Mismatch(center, "ambiguous father")
    father = fathers[0]
    sons = tuple(x for x in hi if x != father)
    gfs = [x for x in lo if father in inner[x]]
    if len(gfs) != 1:
        raise B1Mismatch(center, "no consistent assignment")
    grandfather = gfs[0]
    grandsons = []
    per_son: Counter = Counter()
    for x in lo:
        if x == grandfather:
            continue
        (s,) = inner[x]
        if s not in his or s == father:
            raise B1Mismatch(center, "no consistent assignment")
        grandsons.append((x, s))
        per_son[s] += 1
    if any(per_son[s] != n - 1 for s in sons):
        raise B1Mismatch(center, "no consistent assignment")
    # the roles now fix a bijection with the template; check every induced edge
    by_son: dict = {s: set() for s in sons}
    for g, s in grandsons:
        by_son[s].add(g)
    if inner[father] != set(sons) | {grandfather} or inner[grandfather] != {father}:
        raise B1Mismatch(center, "no consistent assignment")
    for s in sons:
        if inner[s] != by_son[s] | {father}:
            raise B1Mismatch(center, "no consistent assignment")
    return Family(father, sons, grandfather, tuple(grandsons))


def classify_root_edges(b: RootedBall, n: int) -> dict[int, Label]:
    """Labels of the directed edges leaving the root of a radius-one ball."""
    if b.radius != 1:
        raise GraphError("classify_root_edges needs a ball of radius 1")
    g = b.graph
    fam = classify_star(b.root, g.adjacency[b.root], g.neighbor_sets.__getitem__, n)
    if g.vertex_count != 1 + len(g.adjacency[b.root]):
        raise B1Mismatch(b.root, "degree multiset mismatch")
    return dict(sorted(fam.labels().items()))


@dataclass
class LabeledRegion:
    """Labels on every edge with at least one *interior* endpoint.

    Interior vertices are those within ``radius`` of the basepoint; each has
    its own classified radius-one ball.  ``neighbors`` is the oracle
    transcript for every vertex within ``radius + 1``.
    """

    graph: LazyGraph
    n: int
    radius: int
    dist: dict
    neighbors: dict
    families: dict
    _sets: dict = field(default_factory=dict, repr=False)

    def is_interior(self, v: Hashable) -> bool:
        return v in self.families

    def interior(self) -> list:
        return list(self.families)

    def neighbor_set(self, v: Hashable) -> frozenset:
        s = self._sets.get(v)
        if s is None:
            s = self._sets[v] = frozenset(self.neighbors[v])
        return s

    def label(self, u: Hashable, w: Hashable) -> Optional[Label]:
        fam = self.families.get(u)
        if fam is not None:
            return fam.labels().get(w)
        fam = self.families.get(w)
        if fam is not None:
            lab = fam.labels().get(u)
            return lab.reverse if lab is not None else None
        return None

    def labels(self) -> dict[tuple, Label]:
        out: dict[tuple, Label] = {}
        for u, fam in self.families.items():
            for w, lab in fam.labels().items():
                out[(u, w)] = lab
                out.setdefault((w, u), lab.reverse)
        return out

    def iter_labels(self) -> Iterator[tuple[Hashable, Hashable, Label]]:
        for u, fam in self.families.items():
            for w, lab in sorted(fam.labels().items()):
                yield u, w, lab

    def father(self, v: Hashable) -> Optional[Hashable]:
        """Father of ``v``: read off its own ball, else inferred from interior neighbors.

        Returns None when no interior neighbor pins it down.
        """
        fam = self.families.get(v)
        if fam is not None:
            return fam.father
        found = set()
        for u in self.neighbors.get(v, ()):
            fu = self.families.get(u)
            if fu is None:
                continue
            lab = fu.labels().get(v)
            if lab is Label.SON:
                found.add(u)
            elif lab is Label.GRANDSON:
                found.add(fu.son_of(v))
            elif lab is Label.FATHER:
                found.add(fu.grandfather)
            elif lab is Label.GRANDFATHER:
                fs = self.families.get(fu.father)
                if fs is not None:
                    found.add(fs.grandfather)
        if len(found) > 1:
            raise LabelInconsistency((v, min(found)), "interior neighbors disagree on the father")
        return found.pop() if found else None

    def father_map(self) -> dict:
        """Every father the interior classifications pin down, in one outward pass.

        Agrees with :meth:`father` wherever that returns a vertex, and also
        raises on disagreement between an interior vertex and its neighbors.
        """
        out: dict = {}
        put = out.setdefault
        fams = self.families
        for u, fam in fams.items():
            pairs = [(u, fam.father), (fam.father, fam.grandfather)]
            pairs += [(s, u) for s in fam.sons]
            pairs += fam.grandsons
            ff = fams.get(fam.father)
            if ff is not None:
                pairs.append((fam.grandfather, ff.grandfather))
            for v, f in pairs:
                if put(v, f) != f:
                    raise LabelInconsistency((v, f), "interior neighbors disagree on the father")
        return out

    def sons(self, v: Hashable) -> Optional[tuple]:
        fam = self.families.get(v)
        return fam.sons if fam is not None else None


def explore_region(h: LazyGraph, depth: int, budget: int = DEFAULT_BUDGET) -> tuple[dict, dict]:
    """Oracle transcript and BFS distances for every vertex within ``depth``."""
    dist = {h.basepoint: 0}
    nbrs: dict = {}
    frontier = [h.basepoint]
    d = 0
    while frontier:
        nxt = []
        for v in frontier:
            nb = h.neighbors(v)
            if v in nb or len(set(nb)) != len(nb):
                raise OracleIntegrityError(f"self-loop or repeated neighbor at {vertex_key(v)}")
            nbrs[v] = nb
            if d == depth:
                continue
            for w in nb:
                if w not in dist:
                    if len(dist) >= budget:
                        raise BudgetExceeded(f"region of radius {depth} exceeds vertex budget {budget}")
                    dist[w] = d + 1
                    nxt.append(w)
        frontier = nxt
        d += 1
    for v, nb in nbrs.items():
        for w in nb:
            other = nbrs.get(w)
            if other is not None and v not in other:
                raise OracleIntegrityError(
                    f"asymmetric adjacency between {vertex_key(v)} and {vertex_key(w)}"
                )
    return dist, nbrs


def label_region(h: LazyGraph, n: int, radius: int, budget: int = DEFAULT_BUDGET) -> LabeledRegion:
    """Classify every vertex within ``radius`` and cross-check shared edges.

    Raises :class:`B1Mismatch` at the first vertex (BFS order) whose ball
    does not match, and :class:`LabelInconsistency` when two interior
    vertices disagree about an edge between them.
    """
    if radius < 0:
        raise GraphError("radius must be non-negative")
    dist, nbrs = explore_region(h, radius + 1, budget)
    region = LabeledRegion(h, n, radius, dist, nbrs, {})
    nset = region.neighbor_set
    for v, d in dist.items():
        if d > radius:
            continue
        region.families[v] = classify_star(v, nbrs[v], nset, n)
    fams = region.families
    for u, fam in fams.items():
        for w, lab in fam.labels().items():
            fw = fams.get(w)
            if fw is not None and fw.labels().get(u) is not lab.reverse:
                raise LabelInconsistency((u, w), f"{lab} one way, {fw.labels().get(u)} the other")
    return region


@dataclass(frozen=True)
class ForcednessProof:
    """Orbit partition of root edges of B1(G_n) matched against the four roles."""

    n: int
    orbits: tuple[tuple[tuple[int, int], ...], ...]
    classes: dict
    ball_degrees: dict

    @property
    def sizes(self) -> dict[Label, int]:
        return {lab: len(edges) for lab, edges in self.classes.items()}


def labeling_is_forced(n: int, b: Optional[RootedBall] = None) -> ForcednessProof:
    """Certify that automorphism orbits of root edges are exactly the four roles.

    ``b`` defaults to the radius-one ball of the grandfather graph; any other
    ball is checked against it first and rejected if it does not match.
    """
    from .generators import grandfather
    from .iso import are_isomorphic, directed_edge_orbits
    from .metric import ball

    template = ball(grandfather(n), 1)
    if b is None:
        b = template
    elif b.radius != 1 or are_isomorphic(b, template, rooted=True) is None:
        raise B1Mismatch(b.root, "ball is not the radius-one grandfather ball")
    labels = classify_root_edges(b, n)
    root_edges = [(b.root, w) for w in b.graph.adjacency[b.root]]
    orbits = directed_edge_orbits(b.graph, b.root, root_edges)
    classes: dict[Label, tuple] = {}
    for lab in Label:
        classes[lab] = tuple(sorted((b.root, w) for w, x in labels.items() if x is lab))
    if sorted(map(tuple, orbits)) != sorted(classes.values()):
        raise AssertionError("orbit partition differs from the familial classes")
    sizes = tuple(len(classes[lab]) for lab in Label)
    if sizes != expected_profile(n):
        raise AssertionError(f"class sizes {sizes} differ from {expected_profile(n)}")
    degrees = {w: b.graph.degree(w) for w in b.graph.adjacency[b.root]}
    return ForcednessProof(n, tuple(tuple(o) for o in orbits), classes, degrees)
