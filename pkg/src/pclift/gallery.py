"""Bundled gallery of the small graphs used throughout the tests and docs.

Every entry is path-complete on the two-letter alphabet {1, 2}; g_alpha,
g_phi and g_psi are additionally non-redundant (strongly connected, every
edge essential).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GraphError
from .graphs import LabeledDigraph


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    graph: LabeledDigraph
    note: str


def _g(triples) -> LabeledDigraph:
    return LabeledDigraph.from_triples(("1", "2"), triples)


GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in (
        GalleryEntry(
            "g0",
            _g([("a", "a", "1"), ("a", "a", "2")]),
            "one node with a self-loop per label; the common-certificate pattern",
        ),
        GalleryEntry(
            "g1",
            _g([("b", "b", "1"), ("b", "c", "2"), ("c", "c", "2"), ("c", "b", "1")]),
            "two nodes; label 1 always enters b, label 2 always enters c",
        ),
        GalleryEntry(
            "g2",
            _g([("b'", "b'", "1"), ("b'", "c'", "1"), ("c'", "c'", "2"), ("c'", "b'", "2")]),
            "two nodes; label 1 always leaves b', label 2 always leaves c'",
        ),
        GalleryEntry(
            "g_alpha",
            _g([("a", "b", "1"), ("a", "b", "2"), ("b", "a", "1"), ("b", "a", "2")]),
            "two nodes swapped by every label; its 2-sum lift splits off a copy of g0",
        ),
        GalleryEntry(
            "g_phi",
            _g(
                [
                    ("a", "a", "1"),
                    ("a", "b", "1"),
                    ("b", "a", "2"),
                    ("a", "c", "2"),
                    ("c", "a", "2"),
                ]
            ),
            "three nodes, non-redundant; not simulated by any single forward lift depth",
        ),
        GalleryEntry(
            "g_psi",
            _g([("a'", "a'", "1"), ("a'", "b'", "1"), ("a'", "b'", "2"), ("b'", "a'", "2")]),
            "two nodes, non-redundant; node a' emits both labels",
        ),
    )
}


def gallery_graph(name: str) -> LabeledDigraph:
    try:
        return GALLERY[name].graph
    except KeyError:
        raise GraphError(
            f"unknown gallery graph {name!r}; available: {', '.join(sorted(GALLERY))}"
        ) from None
