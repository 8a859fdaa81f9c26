"""Balls in lazy graphs and the truncated ball-agreement distance.

The distance between two rooted graphs is ``2**-R`` where ``R`` is the
largest radius at which their balls are rooted-isomorphic, and 0 when they
agree at every radius.  Only radii up to ``r_max`` can ever be tested, so a
report that agrees everywhere it looked is flagged as truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Optional, Sequence

from .core import FiniteGraph, GraphError, RootedBall
from .generators import LazyGraph, vertex_key
from .iso import are_isomorphic

DEFAULT_BUDGET = 200_000


class BudgetExceeded(GraphError):
    """Exploration would visit more vertices than the configured budget."""


class OracleIntegrityError(GraphError):
    """The neighbor oracle is asymmetric, has loops or repeats on the explored region."""


def _check_list(v: Hashable, nb: Sequence) -> None:
    if v in nb:
        raise OracleIntegrityError(f"self-loop at {vertex_key(v)}")
    if len(set(nb)) != len(nb):
        raise OracleIntegrityError(f"repeated neighbor at {vertex_key(v)}")


def ball(g: LazyGraph, r: int, budget: int = DEFAULT_BUDGET) -> RootedBall:
    """Induced ball of radius ``r`` around the basepoint.

    Vertices are numbered in BFS order (neighbor lists are sorted, so the
    numbering is deterministic); the basepoint is index 0 and ``refs`` holds
    the original ids.  The oracle is only queried on vertices of the ball.
    """
    if r < 0:
        raise GraphError("radius must be non-negative")
    refs = [g.basepoint]
    index = {g.basepoint: 0}
    nbrs: list[Sequence] = []
    head = 0
    depth_end = 1
    depth = 0
    while head < len(refs):
        if head == depth_end:
            depth += 1
            depth_end = len(refs)
        v = refs[head]
        nb = g.neighbors(v)
        _check_list(v, nb)
        nbrs.append(nb)
        head += 1
        if depth == r:
            continue
        for w in nb:
            if w not in index:
                if len(refs) >= budget:
                    raise BudgetExceeded(f"ball of radius {r} exceeds vertex budget {budget}")
                index[w] = len(refs)
                refs.append(w)
    up: set[tuple[int, int]] = set()
    down: set[tuple[int, int]] = set()
    for i, nb in enumerate(nbrs):
        for w in nb:
            j = index.get(w)
            if j is None:
                continue
            if i < j:
                up.add((i, j))
            else:
                down.add((j, i))
    if up != down:
        i, j = min(up ^ down)
        raise OracleIntegrityError(
            f"asymmetric adjacency between {vertex_key(refs[i])} and {vertex_key(refs[j])}"
        )
    edges = sorted(up)
    return RootedBall(FiniteGraph(len(refs), edges), 0, r, tuple(refs))


@dataclass(frozen=True)
class AgreementReport:
    """Largest agreeing radius found, and the derived dyadic distance.

    ``truncated`` means the balls agreed at every radius up to ``r_max``;
    the distance is then reported as 0 and the true distance is only known
    to be at most ``2**-r_max``.
    """

    max_agree_radius: int
    r_max: int
    truncated: bool

    @property
    def distance(self) -> Fraction:
        if self.truncated:
            return Fraction(0)
        return Fraction(1, 2**self.max_agree_radius)

    @property
    def upper_bound(self) -> Fraction:
        return Fraction(1, 2**self.max_agree_radius)

    def render(self) -> str:
        if self.truncated:
            return f"agree_radius=all distance=0 (truncated at {self.r_max})"
        return f"agree_radius={self.max_agree_radius} distance={self.distance}"


class BallCache:
    """Memoizes balls per (graph, radius) across many comparisons."""

    def __init__(self, budget: int = DEFAULT_BUDGET):
        self.budget = budget
        self._balls: dict[tuple[int, int], RootedBall] = {}
        self._keep: list[LazyGraph] = []

    def get(self, g: LazyGraph, r: int) -> RootedBall:
        key = (id(g), r)
        b = self._balls.get(key)
        if b is None:
            b = ball(g, r, self.budget)
            self._balls[key] = b
            self._keep.append(g)
        return b


def balls_agree(g: LazyGraph, h: LazyGraph, r: int, cache: Optional[BallCache] = None) -> bool:
    cache = cache or BallCache()
    return are_isomorphic(cache.get(g, r), cache.get(h, r), rooted=True) is not None


def agree_radius(
    g: LazyGraph,
    h: LazyGraph,
    r_max: int,
    cache: Optional[BallCache] = None,
    budget: int = DEFAULT_BUDGET,
) -> AgreementReport:
    """Largest ``r <= r_max`` with rooted-isomorphic balls.

    Radius 0 always agrees.  Agreement is downward closed, so the scan stops
    at the first disagreement.
    """
    if r_max < 0:
        raise GraphError("r_max must be non-negative")
    cache = cache or BallCache(budget)
    agreed = 0
    for r in range(1, r_max + 1):
        if not balls_agree(g, h, r, cache):
            return AgreementReport(agreed, r_max, False)
        agreed = r
    return AgreementReport(r_max, r_max, True)


def distance_table(
    g: LazyGraph,
    family: Sequence[LazyGraph],
    r_max: int,
    budget: int = DEFAULT_BUDGET,
) -> list[AgreementReport]:
    cache = BallCache(budget)
    return [agree_radius(g, h, r_max, cache) for h in family]


def format_distance(d: Fraction) -> str:
    return str(d)
