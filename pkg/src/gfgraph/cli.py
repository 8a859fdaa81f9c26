"""Command-line front end: ``gfgraph <command> ...``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .core import GraphError, RootedBall
from .generators import LazyGraph, chain, cycle, relabel, vertex_key
from .iso import directed_edge_orbits
from .labeling import Label, classify_root_edges, label_region
from .metric import DEFAULT_BUDGET, BallCache, agree_radius, ball
from .textio import ATLAS, format_ball_text, format_dot, parse_spec
from .verifier import VerdictKind, verify_isolated

EXIT_CODES = {
    VerdictKind.CONSISTENT: 0,
    VerdictKind.REJECT_B1: 2,
    VerdictKind.NOT_TRANSITIVE: 3,
    VerdictKind.INCONCLUSIVE: 4,
}


def infer_n(degree: int) -> Optional[int]:
    """The ``n`` whose grandfather graph has this degree, if any."""
    n = 3
    while n + 1 + (n - 1) ** 2 <= degree:
        if n + 1 + (n - 1) ** 2 == degree:
            return n
        n += 1
    return None


def _graph(args: argparse.Namespace, spec: str) -> LazyGraph:
    g = parse_spec(spec)
    if args.seed is not None:
        g = relabel(g, args.seed)
    return g


def _n_for(args: argparse.Namespace, g: LazyGraph) -> int:
    if args.n is not None:
        return args.n
    n = infer_n(len(g.neighbors(g.basepoint)))
    if n is None:
        raise GraphError("cannot infer --n from the basepoint degree; pass it explicitly")
    return n


def _edge_labels(g: LazyGraph, b: RootedBall, budget: int):
    """Familial class of each ball edge, when the ball looks like a grandfather ball."""
    n = infer_n(b.graph.degree(b.root))
    if n is None or b.radius < 1 or b.refs is None:
        return None
    try:
        lr = label_region(g, n, b.radius - 1, budget)
    except GraphError:
        return None
    refs = b.refs
    fathers = lr.father_map()

    def lookup(u: int, v: int) -> Optional[str]:
        x, y = refs[u], refs[v]
        lab = lr.label(x, y)
        if lab is not None:
            return lab.value
        # frontier pair: fall back on the father map pushed out from the interior
        fx, fy = fathers.get(x), fathers.get(y)
        if y == fx or x == fy:
            return "father" if y == fx else "son"
        if y == fathers.get(fx) or x == fathers.get(fy):
            return "grandfather" if y == fathers.get(fx) else "grandson"
        return None

    return lookup


def cmd_ball(args: argparse.Namespace) -> int:
    g = _graph(args, args.spec)
    b = ball(g, args.r, args.budget)
    name = f"B{args.r}({g.description})"
    if args.format == "dot":
        sys.stdout.write(format_dot(b, name, _edge_labels(g, b, args.budget)))
    else:
        comment = f"ball of radius {args.r}, basepoint is vertex 0"
        sys.stdout.write(format_ball_text(b, name, comment))
    return 0


def cmd_dist(args: argparse.Namespace) -> int:
    g, h = _graph(args, args.spec1), _graph(args, args.spec2)
    report = agree_radius(g, h, args.rmax, BallCache(args.budget))
    print(report.render())
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    g = _graph(args, args.spec)
    v = verify_isolated(g, _n_for(args, g), args.radius, args.budget)
    print(v.record())
    print(v.dump())
    return EXIT_CODES[v.kind]


def cmd_orbits(args: argparse.Namespace) -> int:
    g = _graph(args, args.spec)
    b = ball(g, args.r, args.budget)
    root_edges = [(b.root, w) for w in b.graph.adjacency[b.root]]
    orbits = directed_edge_orbits(b, edges=root_edges)
    names: dict = {}
    n = infer_n(b.graph.degree(b.root))
    if n is not None and args.r == 1:
        try:
            names = classify_root_edges(b, n)
        except GraphError:
            names = {}
    order = list(Label)
    if names:
        orbits.sort(key=lambda o: order.index(names[o[0][1]]))
    print(f"classes={len(orbits)} sizes={','.join(str(len(o)) for o in orbits)}")
    for i, o in enumerate(orbits):
        tag = f" [{names[o[0][1]]}]" if names else ""
        edges = " ".join(f"{u}->{w}" for u, w in o)
        print(f"class {i + 1} size {len(o)}{tag}: {edges}")
    return 0


def cmd_label(args: argparse.Namespace) -> int:
    g = _graph(args, args.spec)
    lr = label_region(g, _n_for(args, g), args.radius, args.budget)
    for u in lr.families:
        for w, lab in sorted(lr.families[u].labels().items()):
            print(f"{vertex_key(u)} -> {vertex_key(w)} : {lab}")
    return 0


def cmd_demo(args: argparse.Namespace) -> int:
    if args.which != "non-isolated":
        raise GraphError(f"unknown demo {args.which!r}")
    if args.mmax < 3:
        raise GraphError("--mmax must be at least 3")
    z = chain()
    cache = BallCache(args.budget)
    print(f"{'m':>4} {'distance':>12} {'agree_radius':>12}")
    for m in range(3, args.mmax + 1):
        rep = agree_radius(z, cycle(m), args.rmax, cache)
        dist = str(rep.distance) if not rep.truncated else f"<={rep.upper_bound}"
        radius = str(rep.max_agree_radius) if not rep.truncated else f">={rep.r_max}"
        print(f"{m:>4} {dist:>12} {radius:>12}")
    return 0


def cmd_atlas(args: argparse.Namespace) -> int:
    width = max(len(s) for s, _ in ATLAS)
    for spec, what in ATLAS:
        print(f"{spec:<{width}}  {what}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="vertex budget for exploration")
    common.add_argument("--seed", type=int, default=None, help="relabel every input graph with this seed")

    p = argparse.ArgumentParser(prog="gfgraph", description="Balls, distances and the isolation verifier.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ball", parents=[common], help="serialize the ball of radius r")
    s.add_argument("spec")
    s.add_argument("r", type=int)
    s.add_argument("--format", choices=("text", "dot"), default="text")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("dist", parents=[common], help="truncated ball-agreement distance")
    s.add_argument("spec1")
    s.add_argument("spec2")
    s.add_argument("--rmax", type=int, default=8)
    s.set_defaults(func=cmd_dist)

    s = sub.add_parser("verify", parents=[common], help="run the isolation verifier")
    s.add_argument("spec")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--radius", type=int, default=5)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("orbits", parents=[common], help="orbits of root edges of a ball")
    s.add_argument("spec")
    s.add_argument("r", type=int)
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("label", parents=[common], help="familial labels on a region")
    s.add_argument("spec")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--radius", type=int, default=1)
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("demo", parents=[common], help="reproduce a demo table")
    s.add_argument("which", choices=("non-isolated",))
    s.add_argument("--mmax", type=int, default=64)
    s.add_argument("--rmax", type=int, default=33)
    s.set_defaults(func=cmd_demo)

    s = sub.add_parser("atlas", help="list generator spec strings")
    s.set_defaults(func=cmd_atlas)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
