"""Generator spec strings, the text edge-list format and DOT export."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

from .core import FiniteGraph, GraphError, RootedBall, complete_graph
from .generators import (
    LazyGraph,
    chain,
    cycle,
    grandfather,
    great_grandfather,
    product_with_finite,
    regular_tree,
    relabel,
    spine_cycle_fake,
)

# --- spec strings ---------------------------------------------------------------


class SpecError(GraphError):
    def __init__(self, text: str, pos: int, message: str):
        super().__init__(f"parse error at position {pos}: {message}\n  {text}\n  {' ' * pos}^")
        self.text = text
        self.pos = pos
        self.message = message


ATLAS: tuple[tuple[str, str], ...] = (
    ("chain", "bi-infinite path"),
    ("cycle:<m>", "cycle of length m >= 3"),
    ("tree:<n>", "n-regular tree"),
    ("grandfather:<n>", "grandfather graph: tree plus father-of-father edges"),
    ("greatgf:<n>:<k>", "tree plus edges to the (k+2)-fold father"),
    ("spinefake:<n>:<k>", "father map with a k-cycle on the spine (not transitive)"),
    ("product:<spec>,k<j>", "box product with the complete graph K_j"),
    ("relabel:<seed>:<spec>", "same graph behind seeded opaque vertex tokens"),
)


class _SpecParser:
    _INT = re.compile(r"-?\d+")
    _WORD = re.compile(r"[a-z]+")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str, pos: Optional[int] = None):
        raise SpecError(self.text, self.pos if pos is None else pos, message)

    def expect(self, ch: str) -> None:
        if not self.text.startswith(ch, self.pos):
            self.fail(f"expected '{ch}'")
        self.pos += len(ch)

    def integer(self, signed: bool = False) -> int:
        m = self._INT.match(self.text, self.pos)
        if m is None or (not signed and m.group().startswith("-")):
            self.fail("expected a non-negative integer" if not signed else "expected an integer")
        self.pos = m.end()
        return int(m.group())

    def build(self, start: int, make: Callable[[], LazyGraph]) -> LazyGraph:
        try:
            return make()
        except SpecError:
            raise
        except GraphError as e:
            self.fail(str(e), start)

    def spec(self) -> LazyGraph:
        start = self.pos
        m = self._WORD.match(self.text, self.pos)
        if m is None:
            self.fail("expected a generator name")
        name = m.group()
        self.pos = m.end()
        if name == "chain":
            return chain()
        if name in ("cycle", "tree", "grandfather"):
            self.expect(":")
            a = self.integer()
            make = {"cycle": cycle, "tree": regular_tree, "grandfather": grandfather}[name]
            return self.build(start, lambda: make(a))
        if name in ("greatgf", "spinefake"):
            self.expect(":")
            a = self.integer()
            self.expect(":")
            b = self.integer()
            make2 = great_grandfather if name == "greatgf" else spine_cycle_fake
            return self.build(start, lambda: make2(a, b))
        if name == "product":
            self.expect(":")
            inner = self.spec()
            self.expect(",")
            self.expect("k")
            j = self.integer()
            if j < 1:
                self.fail("complete factor needs at least one vertex", self.pos - 1)
            return self.build(start, lambda: product_with_finite(inner, complete_graph(j), f"k{j}"))
        if name == "relabel":
            self.expect(":")
            seed = self.integer(signed=True)
            self.expect(":")
            inner = self.spec()
            return relabel(inner, seed)
        self.fail(f"unknown generator '{name}'", start)


def parse_spec(text: str) -> LazyGraph:
    """Parse a generator spec string such as ``relabel:7:grandfather:3``."""
    p = _SpecParser(text)
    g = p.spec()
    if p.pos != len(text):
        p.fail("unexpected trailing input")
    return g


# --- text edge-list format ---------------------------------------------------------


@dataclass(frozen=True)
class TextGraph:
    name: str
    graph: FiniteGraph
    root: Optional[int] = None


def format_text(graph: FiniteGraph, name: str, root: Optional[int] = None, comment: Optional[str] = None) -> str:
    if not name or any(c.isspace() for c in name):
        raise GraphError(f"graph name must be a single nonempty token, got {name!r}")
    lines = []
    if comment is not None:
        lines += [f"# {c}" for c in comment.splitlines()]
    lines.append(f"graph {name}")
    lines.append(f"vertices {graph.vertex_count}")
    if root is not None:
        graph.check_vertex(root)
        lines.append(f"root {root}")
    lines += [f"edge {u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def format_ball_text(b: RootedBall, name: str, comment: Optional[str] = None) -> str:
    return format_text(b.graph, name, b.root, comment)


def parse_text(text: str) -> TextGraph:
    """Inverse of :func:`format_text`; strict about order, sorting and the final newline."""
    if not text.endswith("\n"):
        raise GraphError("missing terminating newline")
    body = [(i + 1, ln) for i, ln in enumerate(text[:-1].split("\n")) if not ln.startswith("#")]

    def fail(lineno: int, msg: str):
        raise GraphError(f"line {lineno}: {msg}")

    def fields(lineno: int, line: str, key: str, count: int) -> list[str]:
        parts = line.split(" ")
        if parts[0] != key or len(parts) != count + 1:
            fail(lineno, f"expected '{key}' with {count} field(s)")
        return parts[1:]

    def nat(lineno: int, s: str) -> int:
        if not s.isdigit() or (len(s) > 1 and s[0] == "0"):
            fail(lineno, f"bad integer {s!r}")
        return int(s)

    if len(body) < 2:
        raise GraphError("expected 'graph' and 'vertices' lines")
    (ln, line), *rest = body
    (name,) = fields(ln, line, "graph", 1)
    if not name:
        fail(ln, "empty graph name")
    ln, line = rest[0]
    k = nat(ln, fields(ln, line, "vertices", 1)[0])
    rest = rest[1:]
    root = None
    if rest and rest[0][1].startswith("root"):
        ln, line = rest[0]
        root = nat(ln, fields(ln, line, "root", 1)[0])
        if root >= k:
            fail(ln, "root out of range")
        rest = rest[1:]
    edges = []
    for ln, line in rest:
        u, v = (nat(ln, s) for s in fields(ln, line, "edge", 2))
        if not u < v:
            fail(ln, "edge endpoints must satisfy u < v")
        if edges and (u, v) <= edges[-1]:
            fail(ln, "edges must be strictly sorted")
        edges.append((u, v))
    try:
        return TextGraph(name, FiniteGraph(k, edges), root)
    except GraphError as e:
        raise GraphError(f"invalid graph: {e}") from None


# --- DOT ----------------------------------------------------------------------------


def format_dot(
    b: RootedBall,
    name: str,
    labels: Optional[Callable[[int, int], Optional[str]]] = None,
) -> str:
    """DOT for a rooted ball.

    ``labels(u, v)`` may name the familial class of an edge; tree edges are
    drawn solid black, grandfather edges as red curves, unknown ones grey.
    """
    lines = [f'graph "{name}" {{', "  node [shape=circle, fontsize=10];", "  splines=true;"]
    for v in range(b.graph.vertex_count):
        attr = ' [style=filled, fillcolor=gold, penwidth=2]' if v == b.root else ""
        lines.append(f"  {v}{attr};")
    for u, v in b.graph.edges:
        lab = labels(u, v) if labels is not None else None
        if lab in ("father", "son"):
            attr = " [color=black]"
        elif lab in ("grandfather", "grandson"):
            attr = " [color=red, style=bold, constraint=false]"
        elif labels is not None:
            attr = " [color=grey]"
        else:
            attr = ""
        lines.append(f"  {u} -- {v}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
