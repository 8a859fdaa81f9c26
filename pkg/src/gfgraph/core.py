"""Finite simple graphs, rooted balls and breadth-first primitives."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

Edge = tuple[int, int]

UNREACHABLE = -1


class GraphError(ValueError):
    """Raised on malformed graphs or out-of-range vertex indices."""


def _normalize_edges(vertex_count: int, edges: Iterable[Sequence[int]]) -> tuple[Edge, ...]:
    pairs = [(u, v) if u < v else (v, u) for u, v in edges]
    for u, v in pairs:
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
    if pairs and (min(u for u, _ in pairs) < 0 or max(v for _, v in pairs) >= vertex_count):
        bad = next((u, v) for u, v in pairs if u < 0 or v >= vertex_count)
        raise GraphError(f"edge {bad} out of range for {vertex_count} vertices")
    unique = set(pairs)
    if len(unique) != len(pairs):
        seen: set[Edge] = set()
        dup = next(e for e in pairs if e in seen or seen.add(e))
        raise GraphError(f"duplicate edge {dup}")
    return tuple(sorted(unique))


@dataclass(frozen=True)
class FiniteGraph:
    """Simple undirected graph on vertices ``0 .. vertex_count - 1``.

    Edges are stored as sorted ``(min, max)`` pairs, so two graphs with the
    same edge set compare equal regardless of how they were built.
    """

    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise GraphError("vertex_count must be non-negative")
        object.__setattr__(self, "edges", _normalize_edges(self.vertex_count, self.edges))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbor_sets[u]

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise GraphError(f"vertex {v} out of range for {self.vertex_count} vertices")

    def permuted(self, perm: Sequence[int]) -> FiniteGraph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return FiniteGraph(self.vertex_count, [(perm[u], perm[v]) for u, v in self.edges])


@dataclass(frozen=True)
class RootedBall:
    """A finite graph with distinguished root and the radius it was cut at.

    ``refs`` optionally records the ambient vertex identifier of every index
    (set when the ball was extracted from a lazy graph).
    """

    graph: FiniteGraph
    root: int
    radius: int
    refs: tuple[Hashable, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        self.graph.check_vertex(self.root)
        if self.radius < 0:
            raise GraphError("radius must be non-negative")
        dist = distances_from(self.graph, self.root)
        for v, d in enumerate(dist):
            if d == UNREACHABLE or d > self.radius:
                raise GraphError(f"vertex {v} lies outside radius {self.radius}")

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count


@dataclass(frozen=True, order=True)
class DirectedEdge:
    tail: int
    head: int


def distances_from(g: FiniteGraph, v: int) -> list[int]:
    """BFS distances from ``v``; unreachable vertices get ``UNREACHABLE``."""
    g.check_vertex(v)
    dist = [UNREACHABLE] * g.vertex_count
    dist[v] = 0
    queue = deque([v])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def induced_subgraph(g: FiniteGraph, subset: Iterable[int]) -> tuple[FiniteGraph, list[int]]:
    """Induced subgraph on ``subset``.

    Returns the subgraph and ``old_of_new``: the old index of each new vertex.
    New indices follow the order in which ``subset`` lists the vertices
    (duplicates ignored).
    """
    old_of_new: list[int] = []
    new_of_old: dict[int, int] = {}
    for v in subset:
        g.check_vertex(v)
        if v not in new_of_old:
            new_of_old[v] = len(old_of_new)
            old_of_new.append(v)
    edges = [
        (new_of_old[u], new_of_old[w])
        for u, w in g.edges
        if u in new_of_old and w in new_of_old
    ]
    return FiniteGraph(len(old_of_new), edges), old_of_new


def ball_in_finite(g: FiniteGraph, root: int, r: int) -> RootedBall:
    """Radius-``r`` ball around ``root``, rebased so the root is index 0.

    Vertices are indexed in BFS order (ties broken by index), which keeps
    the result deterministic.
    """
    if r < 0:
        raise GraphError("radius must be non-negative")
    g.check_vertex(root)
    order = [root]
    dist = {root: 0}
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        if dist[u] == r:
            continue
        for w in g.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                order.append(w)
    sub, _ = induced_subgraph(g, order)
    return RootedBall(sub, 0, r, tuple(order))


def is_connected(g: FiniteGraph) -> bool:
    if g.vertex_count == 0:
        return True
    return UNREACHABLE not in distances_from(g, 0)


def complete_graph(k: int) -> FiniteGraph:
    return FiniteGraph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def path_graph(k: int) -> FiniteGraph:
    return FiniteGraph(k, [(i, i + 1) for i in range(k - 1)])


def cycle_graph(k: int) -> FiniteGraph:
    if k < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return FiniteGraph(k, [(i, (i + 1) % k) for i in range(k)])
