"""Text and DOT serialization for labeled digraphs.

File format, one graph per file::

    # optional comments
    alphabet: 1 2
    node a
    node b
    edge a b 1

Node names are the canonical renders from :mod:`pclift.graphs`, so lifted
graphs round-trip through this format unchanged.
"""

from __future__ import annotations

from typing import Iterable

from .errors import ParseError
from .graphs import (
    Alphabet,
    GraphError,
    LabeledDigraph,
    LabeledEdge,
    node_key,
    parse_node,
    render_node,
)


def render_graph(g: LabeledDigraph) -> str:
    lines = ["alphabet: " + " ".join(g.alphabet)]
    lines += [f"node {render_node(n)}" for n in g.sorted_nodes()]
    lines += [
        f"edge {render_node(e.src)} {render_node(e.dst)} {e.label}"
        for e in g.sorted_edges()
    ]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, source: str = "<string>") -> LabeledDigraph:
    alphabet = None
    nodes = set()
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if alphabet is None:
            if fields[0] != "alphabet:":
                raise ParseError(source, lineno, f"expected 'alphabet:' line, got {fields[0]!r}")
            try:
                alphabet = Alphabet(tuple(fields[1:]))
            except GraphError as exc:
                raise ParseError(source, lineno, str(exc)) from exc
            continue
        if fields[0] == "node":
            if len(fields) != 2:
                raise ParseError(source, lineno, "expected 'node <name>'")
            try:
                nodes.add(parse_node(fields[1], alphabet))
            except GraphError as exc:
                raise ParseError(source, lineno, str(exc)) from exc
        elif fields[0] == "edge":
            if len(fields) != 4:
                raise ParseError(source, lineno, "expected 'edge <src> <dst> <label>'")
            if fields[3] not in alphabet:
                raise ParseError(source, lineno, f"unknown label {fields[3]!r}")
            try:
                src = parse_node(fields[1], alphabet)
                dst = parse_node(fields[2], alphabet)
            except GraphError as exc:
                raise ParseError(source, lineno, str(exc)) from exc
            nodes.update((src, dst))
            edges.add(LabeledEdge(src, dst, fields[3]))
        else:
            raise ParseError(source, lineno, f"expected 'node' or 'edge', got {fields[0]!r}")
    if alphabet is None:
        raise ParseError(source, 1, "missing 'alphabet:' line")
    return LabeledDigraph(alphabet, frozenset(nodes), frozenset(edges))


def load_graph(path: str) -> LabeledDigraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read(), source=path)


def save_graph(g: LabeledDigraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_graph(g))


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def to_dot(g: LabeledDigraph, epsilon_edges: Iterable[tuple] = (), name: str = "g") -> str:
    """DOT rendering; unlabeled epsilon edges (if given) come out dashed."""
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    for n in g.sorted_nodes():
        lines.append(f"  {_quote(render_node(n))};")
    for e in g.sorted_edges():
        lines.append(
            f"  {_quote(render_node(e.src))} -> {_quote(render_node(e.dst))}"
            f' [label="{e.label}"];'
        )
    for a, b in sorted(epsilon_edges, key=lambda p: (node_key(p[0]), node_key(p[1]))):
        lines.append(f"  {_quote(render_node(a))} -> {_quote(render_node(b))} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
