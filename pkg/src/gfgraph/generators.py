"""Lazy presentations of infinite vertex-transitive graphs.

A :class:`LazyGraph` is a basepoint plus a neighbor oracle.  Vertices of the
tree-like families are *tree coordinates* ``(m, w)``: ``m`` is the height of
the lowest spine ancestor and ``w`` the descent word (a tuple over
``0 .. n-2``) from that ancestor.  The spine is the ray ``(0, ()), (1, ()),
(2, ()), ...`` pointing at the distinguished end, so the father map is

    (m, w) -> (m, w[:-1])   if w is nonempty
    (m, ()) -> (m + 1, ())

and child letter 0 of a spine vertex of height ``m >= 1`` is the spine
vertex ``(m - 1, ())``.  Canonical coordinates therefore never start their
word with 0 when ``m >= 1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Callable, Hashable, Optional

from .core import FiniteGraph, GraphError, is_connected

VertexRef = Hashable
TreeCoord = tuple[int, tuple[int, ...]]
Oracle = Callable[[VertexRef], tuple]

ROOT_COORD: TreeCoord = (0, ())


@dataclass(frozen=True)
class LazyGraph:
    """Infinite or finite graph given by ``basepoint`` and a neighbor oracle.

    ``neighbors(v)`` must return a sorted tuple.  ``father`` is the intrinsic
    father map for the tree-like generators and ``origin`` maps a relabeled
    vertex back to the wrapped graph's id.  Both are ground truth for tests
    and figure styling; the verifier never consults them.
    """

    basepoint: VertexRef
    neighbors: Oracle
    description: str
    father: Optional[Callable[[VertexRef], VertexRef]] = None
    origin: Optional[Callable[[VertexRef], VertexRef]] = None

    def at(self, v: VertexRef) -> LazyGraph:
        """Same graph, re-rooted at ``v``."""
        return replace(self, basepoint=v)


class Token(int):
    """Opaque vertex id produced by :func:`relabel`."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"t{int(self):016x}"

    __str__ = __repr__


def vertex_key(v: VertexRef) -> str:
    """Stable text form of a vertex id (used for hashing and output)."""
    if isinstance(v, Token):
        return repr(v)
    if isinstance(v, tuple) and len(v) == 2 and isinstance(v[1], tuple) and isinstance(v[0], int):
        m, w = v
        if all(isinstance(a, int) for a in w):
            return f"{m}:{'.'.join(map(str, w))}"
    if isinstance(v, tuple):
        return "(" + ",".join(vertex_key(x) for x in v) + ")"
    return str(v)


# --- tree coordinates -------------------------------------------------------


def check_coord(v: TreeCoord, n: Optional[int] = None) -> None:
    try:
        m, w = v
    except (TypeError, ValueError):
        raise GraphError(f"not a tree coordinate: {v!r}") from None
    if not isinstance(m, int) or m < 0 or not isinstance(w, tuple):
        raise GraphError(f"not a tree coordinate: {v!r}")
    if n is not None and any(not (0 <= a <= n - 2) for a in w):
        raise GraphError(f"letter out of range in {v!r} for n={n}")
    if m >= 1 and w and w[0] == 0:
        raise GraphError(f"non-canonical coordinate {v!r}: letter 0 below a spine vertex")


def father_of(v: TreeCoord) -> TreeCoord:
    check_coord(v)
    return _father(v)


def _father(v: TreeCoord) -> TreeCoord:
    m, w = v
    if w:
        return (m, w[:-1])
    return (m + 1, ())


def ancestor(v: TreeCoord, k: int) -> TreeCoord:
    m, w = v
    if k <= len(w):
        return (m, w[: len(w) - k])
    return (m + k - len(w), ())


def child(v: TreeCoord, letter: int) -> TreeCoord:
    m, w = v
    if not w and m >= 1 and letter == 0:
        return (m - 1, ())
    return (m, w + (letter,))


def tree_children(v: TreeCoord, n: int) -> list[TreeCoord]:
    return [child(v, a) for a in range(n - 1)]


def descendants(v: TreeCoord, n: int, depth: int) -> list[TreeCoord]:
    level = [v]
    for _ in range(depth):
        level = [c for u in level for c in tree_children(u, n)]
    return level


def _check_degree(n: int) -> None:
    if not isinstance(n, int) or n < 3:
        raise GraphError(f"degree parameter must be an integer >= 3, got {n!r}")


# --- generators -------------------------------------------------------------


def chain() -> LazyGraph:
    """The bi-infinite path on the integers."""

    def nbrs(k: int) -> tuple[int, ...]:
        return (k - 1, k + 1)

    return LazyGraph(0, nbrs, "chain")


def cycle(m: int) -> LazyGraph:
    if not isinstance(m, int) or m < 3:
        raise GraphError(f"cycle length must be >= 3, got {m!r}")

    def nbrs(k: int) -> tuple[int, ...]:
        return tuple(sorted({(k - 1) % m, (k + 1) % m}))

    return LazyGraph(0, nbrs, f"cycle:{m}")


def regular_tree(n: int) -> LazyGraph:
    _check_degree(n)

    def nbrs(v: TreeCoord) -> tuple[TreeCoord, ...]:
        return tuple(sorted([_father(v), *tree_children(v, n)]))

    return LazyGraph(ROOT_COORD, nbrs, f"tree:{n}", father=_father)


def great_grandfather(n: int, k: int) -> LazyGraph:
    """Tree plus an edge from every vertex to its ``(k + 2)``-fold father.

    ``k = 0`` is the grandfather graph.
    """
    _check_degree(n)
    if not isinstance(k, int) or k < 0:
        raise GraphError(f"k must be a non-negative integer, got {k!r}")
    span = k + 2
    letters = range(n - 1)
    off_spine = range(1, n - 1)

    def kids(v: TreeCoord) -> list[TreeCoord]:
        m, w = v
        if not w and m:
            return [(m - 1, ())] + [(m, (a,)) for a in off_spine]
        return [(m, w + (a,)) for a in letters]

    # hot path: inlined rather than built from child()/descendants()
    def nbrs(v: TreeCoord) -> tuple[TreeCoord, ...]:
        m, w = v
        out = [(m, w[:-1]) if w else (m + 1, ()), ancestor(v, span)]
        level = kids(v)
        out += level
        for _ in range(span - 1):
            level = [c for u in level for c in kids(u)]
        out += level
        out.sort()
        return tuple(out)

    desc = f"grandfather:{n}" if k == 0 else f"greatgf:{n}:{k}"
    return LazyGraph(ROOT_COORD, nbrs, desc, father=_father)


def grandfather(n: int) -> LazyGraph:
    """The grandfather graph: the n-regular tree plus father-of-father edges."""
    return great_grandfather(n, 0)


def spine_cycle_fake(n: int, k: int) -> LazyGraph:
    """Father map with a k-cycle on the spine, grandfather edges added.

    Coordinates are ``(c, w)`` with ``c`` taken mod ``k``.  The cycle vertex
    ``(c, ())`` has father ``(c + 1 mod k, ())``; its letter-0 child is
    ``(c - 1 mod k, ())``.  Off the cycle everything is as in the tree.

    Radius-one balls match the grandfather graph only for ``k >= 7``: for
    ``k = 5, 6`` the grandfather edges wrap around the cycle and add edges
    inside the ball of every cycle vertex.
    """
    _check_degree(n)
    if not isinstance(k, int) or k < 5:
        raise GraphError(f"cycle length must be >= 5, got {k!r}")

    def fa(v: TreeCoord) -> TreeCoord:
        c, w = v
        if w:
            return (c, w[:-1])
        return ((c + 1) % k, ())

    def kids(v: TreeCoord) -> list[TreeCoord]:
        c, w = v
        if not w:
            return [((c - 1) % k, ())] + [(c, (a,)) for a in range(1, n - 1)]
        return [(c, w + (a,)) for a in range(n - 1)]

    def nbrs(v: TreeCoord) -> tuple[TreeCoord, ...]:
        out = {fa(v), fa(fa(v))}
        for c in kids(v):
            out.add(c)
            out.update(kids(c))
        out.discard(v)
        return tuple(sorted(out))

    return LazyGraph(ROOT_COORD, nbrs, f"spinefake:{n}:{k}", father=fa)


def product_with_finite(g: LazyGraph, f: FiniteGraph, name: Optional[str] = None) -> LazyGraph:
    """Cartesian (box) product of a lazy graph with a finite connected graph.

    Vertices are pairs ``(v, a)`` with ``v`` a vertex of ``g`` and ``a`` an
    index of ``f``; the basepoint is ``(g.basepoint, 0)``.
    """
    if f.vertex_count == 0:
        raise GraphError("second factor must be nonempty")
    if not is_connected(f):
        raise GraphError("second factor must be connected")
    adj = f.adjacency
    inner = g.neighbors

    def nbrs(v: tuple) -> tuple:
        u, a = v
        out = [(w, a) for w in inner(u)]
        out += [(u, b) for b in adj[a]]
        return tuple(sorted(out))

    if name is None:
        name = f"f{f.vertex_count}"
    return LazyGraph((g.basepoint, 0), nbrs, f"product:{g.description},{name}")


def relabel(g: LazyGraph, seed: int) -> LazyGraph:
    """Hide vertex ids behind seeded pseudorandom 64-bit tokens.

    Tokens are a BLAKE2b hash, keyed by the seed, of the ``repr`` of the
    original id, so the same ``(seed, id)`` always yields the same token.  The wrapper
    remembers which original each issued token stands for; a token collision
    raises :class:`GraphError`.
    """
    keyed = hashlib.blake2b(digest_size=8, key=int(seed).to_bytes(16, "little", signed=True))
    to_token: dict = {}
    to_orig: dict = {}
    inner = g.neighbors

    def token(v: VertexRef) -> Token:
        t = to_token.get(v)
        if t is not None:
            return t
        h = keyed.copy()
        h.update(repr(v).encode())
        t = Token.from_bytes(h.digest(), "big")
        prev = to_orig.setdefault(t, v)
        if prev != v:
            raise GraphError(f"token collision between {prev!r} and {v!r}")
        to_token[v] = t
        return t

    cached = to_token.get
    claim = to_orig.setdefault
    copy = keyed.copy
    from_bytes = Token.from_bytes

    def nbrs(t: Token) -> tuple[Token, ...]:
        try:
            v = to_orig[t]
        except KeyError:
            raise GraphError(f"unknown token {t!r}") from None
        out = []
        for w in inner(v):
            x = cached(w)
            if x is None:
                # token() inlined: this loop dominates relabeled exploration
                h = copy()
                h.update(repr(w).encode())
                x = from_bytes(h.digest(), "big")
                if claim(x, w) != w:
                    raise GraphError(f"token collision between {to_orig[x]!r} and {w!r}")
                to_token[w] = x
            out.append(x)
        out.sort()
        return tuple(out)

    father = None
    if g.father is not None:
        gf = g.father

        def father(t: Token) -> Token:
            return token(gf(to_orig[t]))

    return LazyGraph(
        token(g.basepoint), nbrs, f"relabel:{seed}:{g.description}", father, to_orig.__getitem__
    )


def explore(g: LazyGraph, radius: int) -> dict[VertexRef, tuple]:
    """Neighbor lists of every vertex within ``radius`` of the basepoint."""
    seen = {g.basepoint: g.neighbors(g.basepoint)}
    frontier = [g.basepoint]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in seen[v]:
                if w not in seen:
                    seen[w] = g.neighbors(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def check_lazy_invariants(g: LazyGraph, radius: int) -> list[str]:
    """Symmetry / simplicity / sortedness violations on the explored region."""
    region = explore(g, radius)
    problems = []
    for v, nb in region.items():
        if v in nb:
            problems.append(f"self-loop at {vertex_key(v)}")
        if len(set(nb)) != len(nb):
            problems.append(f"duplicate neighbor at {vertex_key(v)}")
        if list(nb) != sorted(nb):
            problems.append(f"unsorted neighbor list at {vertex_key(v)}")
        for w in nb:
            if w in region and v not in region[w]:
                problems.append(f"asymmetric edge {vertex_key(v)} -> {vertex_key(w)}")
    return problems


def degree_formula(n: int, k: int = 0) -> int:
    """Degree of the great^k-grandfather graph (k = 0: grandfather graph)."""
    return n + 1 + (n - 1) ** (k + 2)
