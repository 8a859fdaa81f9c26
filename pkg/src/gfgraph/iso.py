"""Canonical forms, isomorphism tests, automorphism groups and edge orbits.

The main engine is individualization-refinement:

* an ordered partition is refined to an equitable one, splitting cells by
  the number of neighbors each vertex has in a splitter cell;
* when refinement stalls, every vertex of the first largest non-singleton
  cell is individualized in turn (ascending index) and the search recurses;
* each discrete leaf gives a relabeling, and the lexicographically least
  serialized adjacency over all leaves is the canonical code.

Leaves that reproduce the first (or best) leaf's code yield automorphisms,
which prune sibling branches lying in one orbit of the pointwise stabilizer
of the current individualized prefix.

Two slow engines are kept as oracles: an all-permutations canonical form
(capped at ``BRUTE_FORCE_MAX`` vertices) and an exhaustive backtracking
enumeration of automorphisms.
"""

from __future__ import annotations

import itertools
import sys
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import FiniteGraph, GraphError, RootedBall

BRUTE_FORCE_MAX = 8
AUTOMORPHISM_MAX = 64

GraphLike = Union[FiniteGraph, RootedBall]


class SizeGuardError(GraphError):
    """The graph is too large for the requested exact search."""


@dataclass(frozen=True)
class CanonicalCode:
    data: bytes
    rooted: bool

    def hex(self) -> str:
        return self.data.hex()


# --- ordered partitions -----------------------------------------------------


class _Partition:
    """Ordered partition of ``0 .. n-1``; a cell is named by its start index."""

    __slots__ = ("lab", "cell_of", "cell_end", "ncells")

    def __init__(self, lab, cell_of, cell_end, ncells):
        self.lab = lab
        self.cell_of = cell_of
        self.cell_end = cell_end
        self.ncells = ncells

    @classmethod
    def from_cells(cls, n: int, cells: Sequence[Sequence[int]]) -> _Partition:
        lab: list[int] = []
        cell_of = [0] * n
        cell_end = [0] * n
        for cell in cells:
            start = len(lab)
            for v in cell:
                cell_of[v] = start
                lab.append(v)
            cell_end[start] = len(lab)
        return cls(lab, cell_of, cell_end, len(cells))

    def copy(self) -> _Partition:
        return _Partition(self.lab[:], self.cell_of[:], self.cell_end[:], self.ncells)

    def starts(self) -> list[int]:
        out = []
        i = 0
        n = len(self.lab)
        while i < n:
            out.append(i)
            i = self.cell_end[i]
        return out

    def is_discrete(self) -> bool:
        return self.ncells == len(self.lab)

    def target_cell(self) -> int:
        best, best_size = -1, 1
        for s in self.starts():
            size = self.cell_end[s] - s
            if size > best_size:
                best, best_size = s, size
        return best

    def individualize(self, v: int) -> int:
        s = self.cell_of[v]
        e = self.cell_end[s]
        lab = self.lab
        i = lab.index(v, s, e)
        lab[s], lab[i] = lab[i], lab[s]
        self.cell_end[s] = s + 1
        self.cell_end[s + 1] = e
        for u in lab[s + 1 : e]:
            self.cell_of[u] = s + 1
        self.ncells += 1
        return s

    def refine(self, adj: Sequence[Sequence[int]], splitters: Iterable[int]) -> None:
        queue = deque(splitters)
        queued = set(queue)
        lab, cell_of, cell_end = self.lab, self.cell_of, self.cell_end
        n = len(lab)
        while queue and self.ncells < n:
            ws = queue.popleft()
            queued.discard(ws)
            count: dict[int, int] = {}
            for w in lab[ws : cell_end[ws]]:
                for u in adj[w]:
                    count[u] = count.get(u, 0) + 1
            touched: dict[int, None] = {}
            for u in count:
                touched[cell_of[u]] = None
            for cs in sorted(touched):
                ce = cell_end[cs]
                if ce - cs == 1:
                    continue
                members = lab[cs:ce]
                keys = [count.get(v, 0) for v in members]
                if min(keys) == max(keys):
                    continue
                order = sorted(range(len(members)), key=keys.__getitem__)
                members = [members[i] for i in order]
                keys = [keys[i] for i in order]
                lab[cs:ce] = members
                frags = []
                start = cs
                for i in range(1, len(members) + 1):
                    if i == len(members) or keys[i] != keys[i - 1]:
                        end = cs + i
                        frags.append((start, end))
                        cell_end[start] = end
                        for v in lab[start:end]:
                            cell_of[v] = start
                        start = end
                self.ncells += len(frags) - 1
                if cs in queued:
                    add = frags[1:]
                else:
                    big = max(range(len(frags)), key=lambda i: frags[i][1] - frags[i][0])
                    add = [f for i, f in enumerate(frags) if i != big]
                for fs, _ in add:
                    if fs not in queued:
                        queued.add(fs)
                        queue.append(fs)


def _encode(g: FiniteGraph, lab: Sequence[int], rooted: bool) -> bytes:
    n = g.vertex_count
    header = (b"R" if rooted else b"U") + n.to_bytes(4, "big")
    if not g.edges:
        return header
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(lab, dtype=np.int64)] = np.arange(n)
    e = pos[np.asarray(g.edges, dtype=np.int64)]
    e.sort(axis=1)
    order = np.lexsort((e[:, 1], e[:, 0]))
    return header + e[order].astype(">u4").tobytes()


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


class _Search:
    def __init__(self, g: FiniteGraph, cells: Sequence[Sequence[int]], rooted: bool):
        self.g = g
        self.adj = g.adjacency
        self.rooted = rooted
        self.cells = cells
        self.first: Optional[tuple[list[int], bytes]] = None
        self.best: Optional[tuple[list[int], bytes]] = None
        self.generators: list[list[int]] = []
        self.orbits = _UnionFind(g.vertex_count)

    def run(self) -> _Search:
        n = self.g.vertex_count
        part = _Partition.from_cells(n, [c for c in self.cells if c])
        part.refine(self.adj, part.starts())
        limit = sys.getrecursionlimit()
        if limit < 4 * n + 200:
            sys.setrecursionlimit(4 * n + 200)
        self._dfs(part, [], True)
        return self

    def _dfs(self, part: _Partition, prefix: list[int], first_path: bool) -> bool:
        if part.is_discrete():
            return self._leaf(part.lab)
        cs = part.target_cell()
        cell = sorted(part.lab[cs : part.cell_end[cs]])
        explored: list[int] = []
        for v in cell:
            if explored and self._pruned(v, explored, prefix, first_path):
                continue
            explored.append(v)
            child = part.copy()
            s = child.individualize(v)
            child.refine(self.adj, [s])
            found = self._dfs(child, prefix + [v], first_path and v == cell[0])
            if found and not first_path:
                return True
        return False

    def _pruned(self, v: int, explored: list[int], prefix: list[int], first_path: bool) -> bool:
        if first_path:
            # every generator found so far fixes the first-path prefix
            uf = self.orbits
        else:
            gens = [p for p in self.generators if all(p[x] == x for x in prefix)]
            if not gens:
                return False
            uf = _UnionFind(self.g.vertex_count)
            for p in gens:
                for x, y in enumerate(p):
                    uf.union(x, y)
        root = uf.find(v)
        return any(uf.find(x) == root for x in explored)

    def _add_generator(self, ref_lab: Sequence[int], lab: Sequence[int]) -> None:
        perm = [0] * len(lab)
        for a, b in zip(ref_lab, lab):
            perm[a] = b
        if not is_isomorphism(self.g, self.g, perm):
            raise AssertionError("search produced a non-automorphism")
        if any(perm[i] != i for i in range(len(perm))):
            self.generators.append(perm)
            for x, y in enumerate(perm):
                self.orbits.union(x, y)

    def _leaf(self, lab: list[int]) -> bool:
        code = _encode(self.g, lab, self.rooted)
        if self.first is None:
            self.first = self.best = (lab[:], code)
            return False
        if code == self.first[1]:
            self._add_generator(self.first[0], lab)
            return True
        assert self.best is not None
        if code == self.best[1]:
            self._add_generator(self.best[0], lab)
        elif code < self.best[1]:
            self.best = (lab[:], code)
        return False

    @property
    def labeling(self) -> list[int]:
        """``labeling[v]`` is the canonical position of vertex ``v``."""
        assert self.best is not None
        lab = self.best[0]
        pos = [0] * len(lab)
        for i, v in enumerate(lab):
            pos[v] = i
        return pos


def _unpack(g: GraphLike, root: Optional[int]) -> tuple[FiniteGraph, Optional[int]]:
    if isinstance(g, RootedBall):
        return g.graph, g.root if root is None else root
    return g, root


def _search(g: FiniteGraph, root: Optional[int]) -> _Search:
    n = g.vertex_count
    if root is None:
        cells = [list(range(n))]
    else:
        g.check_vertex(root)
        cells = [[root], [v for v in range(n) if v != root]]
    if n == 0:
        s = _Search(g, [], root is not None)
        s.first = s.best = ([], _encode(g, [], root is not None))
        return s
    return _Search(g, cells, root is not None).run()


# --- public API -------------------------------------------------------------


def canonical_code(g: GraphLike, root: Optional[int] = None, *, rooted: Optional[bool] = None) -> CanonicalCode:
    """Canonical code of ``g`` (root-preserving when rooted).

    A :class:`RootedBall` is rooted at its root unless ``rooted=False``.
    """
    graph, r = _unpack(g, root)
    if rooted is False:
        r = None
    s = _search(graph, r)
    assert s.best is not None
    return CanonicalCode(s.best[1], r is not None)


def canonical_labeling(g: GraphLike, root: Optional[int] = None) -> tuple[CanonicalCode, list[int]]:
    graph, r = _unpack(g, root)
    s = _search(graph, r)
    assert s.best is not None
    return CanonicalCode(s.best[1], r is not None), s.labeling


def is_isomorphism(
    g: FiniteGraph,
    h: FiniteGraph,
    mapping: Sequence[int],
    roots: Optional[tuple[int, int]] = None,
) -> bool:
    """Check ``mapping`` (index ``v`` of ``g`` -> ``mapping[v]`` of ``h``) edge by edge."""
    n = g.vertex_count
    if n != h.vertex_count or len(mapping) != n or len(g.edges) != len(h.edges):
        return False
    if sorted(mapping) != list(range(n)):
        return False
    if roots is not None and mapping[roots[0]] != roots[1]:
        return False
    hs = h.neighbor_sets
    for u, v in g.edges:
        if mapping[v] not in hs[mapping[u]]:
            return False
    # equal edge counts plus injectivity make the edge map onto
    return True


def _quick_invariants(g: FiniteGraph, root: Optional[int]) -> tuple:
    from .core import distances_from

    key: tuple = (g.vertex_count, len(g.edges), tuple(sorted(g.degrees())))
    if root is not None:
        dist = distances_from(g, root)
        layers: dict[int, list[int]] = {}
        for v, d in enumerate(dist):
            layers.setdefault(d, []).append(g.degree(v))
        key += (tuple((d, tuple(sorted(ds))) for d, ds in sorted(layers.items())),)
    return key


def are_isomorphic(g: GraphLike, h: GraphLike, rooted: bool = False) -> Optional[list[int]]:
    """Return a verified isomorphism ``g -> h`` as a list, or None.

    With ``rooted=True`` both arguments must be :class:`RootedBall` values
    and the root must map to the root.
    """
    if rooted and not (isinstance(g, RootedBall) and isinstance(h, RootedBall)):
        raise GraphError("rooted comparison needs RootedBall arguments")
    gg, rg = _unpack(g, None)
    hh, rh = _unpack(h, None)
    if not rooted:
        rg = rh = None
    roots = (rg, rh) if rooted else None
    if gg == hh and rg == rh:
        return list(range(gg.vertex_count))
    if _quick_invariants(gg, rg) != _quick_invariants(hh, rh):
        return None
    code_g, pos_g = canonical_labeling(gg, rg)
    code_h, pos_h = canonical_labeling(hh, rh)
    if code_g != code_h:
        return None
    inv_h = [0] * len(pos_h)
    for v, p in enumerate(pos_h):
        inv_h[p] = v
    mapping = [inv_h[pos_g[v]] for v in range(gg.vertex_count)]
    if not is_isomorphism(gg, hh, mapping, roots):
        raise AssertionError("equal canonical codes but witness failed verification")
    return mapping


def automorphisms(g: GraphLike, root: Optional[int] = None, max_vertices: int = AUTOMORPHISM_MAX) -> list[list[int]]:
    """Generating set of Aut(g) (root stabilizer when rooted).

    The identity group yields an empty list.
    """
    graph, r = _unpack(g, root)
    if graph.vertex_count > max_vertices:
        raise SizeGuardError(f"{graph.vertex_count} vertices exceeds automorphism guard {max_vertices}")
    return [p[:] for p in _search(graph, r).generators]


def group_elements(generators: Sequence[Sequence[int]], n: int, limit: int = 10**6) -> set[tuple[int, ...]]:
    """All elements of the permutation group generated by ``generators``."""
    ident = tuple(range(n))
    seen = {ident}
    queue = deque([ident])
    gens = [tuple(p) for p in generators]
    while queue:
        x = queue.popleft()
        for p in gens:
            y = tuple(p[i] for i in x)
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise SizeGuardError("group too large to enumerate")
                queue.append(y)
    return seen


def directed_edges(g: FiniteGraph) -> list[tuple[int, int]]:
    return sorted([(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges])


def orbits_from_generators(
    generators: Sequence[Sequence[int]],
    g: FiniteGraph,
    edges: Iterable[tuple[int, int]],
) -> list[list[tuple[int, int]]]:
    """Partition ``edges`` into orbits of the group generated by ``generators``.

    Orbits are closed over all directed edges of ``g`` first, then restricted,
    so a subset that is not itself invariant is still partitioned correctly.
    """
    everything = directed_edges(g)
    index = {e: i for i, e in enumerate(everything)}
    uf = _UnionFind(len(everything))
    for p in generators:
        for (u, v), i in index.items():
            uf.union(i, index[(p[u], p[v])])
    classes: dict[int, list[tuple[int, int]]] = {}
    for e in sorted(set(edges)):
        if e not in index:
            raise GraphError(f"{e} is not a directed edge of the graph")
        classes.setdefault(uf.find(index[e]), []).append(e)
    return sorted(classes.values())


def directed_edge_orbits(
    g: GraphLike,
    root: Optional[int] = None,
    edges: Optional[Iterable[tuple[int, int]]] = None,
    max_vertices: int = AUTOMORPHISM_MAX,
) -> list[list[tuple[int, int]]]:
    """Aut-orbits (root-stabilizing if rooted) on a set of directed edges.

    ``edges`` defaults to all directed edges.  Classes are sorted lists,
    ordered by their least element.
    """
    graph, r = _unpack(g, root)
    gens = automorphisms(graph, r, max_vertices)
    if edges is None:
        edges = directed_edges(graph)
    return orbits_from_generators(gens, graph, edges)


# --- oracles ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _all_perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def brute_force_canonical(g: GraphLike, root: Optional[int] = None) -> tuple:
    """Least adjacency bitmask over all (root-fixing) vertex permutations."""
    graph, r = _unpack(g, root)
    n = graph.vertex_count
    if n > BRUTE_FORCE_MAX:
        raise SizeGuardError(f"brute force is capped at {BRUTE_FORCE_MAX} vertices")
    perms = _all_perms(n)
    if r is not None:
        perms = perms[perms[:, r] == 0]
    if not graph.edges or n == 0:
        return (n, r is not None, 0)
    bit = np.zeros((n, n), dtype=np.int64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            bit[i, j] = bit[j, i] = 1 << k
            k += 1
    e = np.asarray(graph.edges, dtype=np.int64)
    masks = bit[perms[:, e[:, 0]], perms[:, e[:, 1]]].sum(axis=1)
    return (n, r is not None, int(masks.min()))


def brute_force_isomorphic(g: GraphLike, h: GraphLike, rooted: bool = False) -> bool:
    gg, rg = _unpack(g, None)
    hh, rh = _unpack(h, None)
    if not rooted:
        rg = rh = None
    if gg.vertex_count != hh.vertex_count:
        return False
    return brute_force_canonical(gg, rg) == brute_force_canonical(hh, rh)


def enumerate_automorphisms(g: GraphLike, root: Optional[int] = None, max_vertices: int = 24) -> list[list[int]]:
    """Every automorphism, by exhaustive backtracking over vertex images.

    A partial map is extended vertex by vertex (in index order) and dropped
    as soon as it breaks adjacency or degree with an already mapped vertex.
    """
    graph, r = _unpack(g, root)
    n = graph.vertex_count
    if n > max_vertices:
        raise SizeGuardError(f"{n} vertices exceeds enumeration guard {max_vertices}")
    nbr = graph.neighbor_sets
    deg = graph.degrees()
    out: list[list[int]] = []
    image = [-1] * n
    used = [False] * n

    def extend(v: int) -> None:
        if v == n:
            out.append(image[:])
            return
        candidates = [r] if (r is not None and v == r) else range(n)
        for c in candidates:
            if used[c] or deg[c] != deg[v]:
                continue
            if r is not None and c == r and v != r:
                continue
            if any((u in nbr[v]) != (image[u] in nbr[c]) for u in range(v)):
                continue
            image[v] = c
            used[c] = True
            extend(v + 1)
            used[c] = False
            image[v] = -1

    extend(0)
    return out
