"""Lazy infinite graphs, rooted-ball isomorphism and the grandfather graph."""

from .core import FiniteGraph, GraphError, RootedBall
from .generators import (
    LazyGraph,
    chain,
    cycle,
    father_of,
    grandfather,
    great_grandfather,
    product_with_finite,
    regular_tree,
    relabel,
    spine_cycle_fake,
)
from .iso import are_isomorphic, canonical_code, directed_edge_orbits
from .labeling import Label, classify_root_edges, label_region, labeling_is_forced
from .metric import AgreementReport, agree_radius, ball
from .textio import parse_spec
from .verifier import Verdict, VerdictKind, verify_isolated

__all__ = [
    "AgreementReport",
    "FiniteGraph",
    "GraphError",
    "Label",
    "LazyGraph",
    "RootedBall",
    "Verdict",
    "VerdictKind",
    "agree_radius",
    "are_isomorphic",
    "ball",
    "canonical_code",
    "chain",
    "classify_root_edges",
    "cycle",
    "directed_edge_orbits",
    "father_of",
    "grandfather",
    "great_grandfather",
    "label_region",
    "labeling_is_forced",
    "parse_spec",
    "product_with_finite",
    "regular_tree",
    "relabel",
    "spine_cycle_fake",
    "verify_isolated",
]
