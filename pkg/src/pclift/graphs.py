"""Labeled digraphs over a finite alphabet: the combinatorial core.

Nodes are structured identifiers (plain names, multisets, word-annotated
names) so that lifted graphs keep meaningful node identities that render
to text and parse back losslessly.

Every operation here is a pure function of immutable values; graphs are
safe to hash, share, and compare.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .errors import GraphError

# Characters with structural meaning in the text formats; banned from
# label strings and base node names.
_RESERVED = set('{}(),|#" \t\r\n')


def _check_name(kind: str, text: str) -> None:
    if not text:
        raise GraphError(f"{kind} must be a nonempty string")
    bad = set(text) & _RESERVED
    if bad:
        raise GraphError(f"{kind} {text!r} contains reserved characters {sorted(bad)}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of edge labels.

    Labels must be prefix-free (no label is a prefix of another) so that
    words rendered by plain concatenation, e.g. ``(a|21)``, decode uniquely.
    """

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise GraphError("alphabet must be nonempty")
        seen = set()
        for lab in self.labels:
            _check_name("label", lab)
            if lab in seen:
                raise GraphError(f"duplicate label {lab!r}")
            seen.add(lab)
        for a in self.labels:
            for b in self.labels:
                if a != b and b.startswith(a):
                    raise GraphError(f"labels must be prefix-free: {a!r} prefixes {b!r}")

    @classmethod
    def of(cls, *labels: str) -> "Alphabet":
        return cls(tuple(labels))

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class Base:
    """A plain named node."""

    name: str

    def __post_init__(self):
        _check_name("node name", self.name)


@dataclass(frozen=True)
class MSet:
    """A multiset of nodes; parts are kept in canonical sorted order."""

    parts: tuple["NodeId", ...]

    def __post_init__(self):
        parts = tuple(sorted(self.parts, key=node_key))
        if not parts:
            raise GraphError("multiset node needs at least one part")
        object.__setattr__(self, "parts", parts)


@dataclass(frozen=True)
class Word:
    """A node annotated with a nonempty word of labels."""

    base: "NodeId"
    word: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(self.word))
        if not self.word:
            raise GraphError("word annotation must be nonempty; use the base node directly")


NodeId = Union[Base, MSet, Word]


def render_node(node: NodeId) -> str:
    """Canonical text form; injective on canonical node ids."""
    if isinstance(node, Base):
        return node.name
    if isinstance(node, MSet):
        return "{" + ",".join(render_node(p) for p in node.parts) + "}"
    if isinstance(node, Word):
        return "(" + render_node(node.base) + "|" + "".join(node.word) + ")"
    raise GraphError(f"not a node id: {node!r}")


def node_key(node: NodeId) -> str:
    """Deterministic sort key for nodes."""
    return render_node(node)


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _decode_word(text: str, alphabet: Alphabet) -> tuple[str, ...]:
    # Prefix-free labels decode greedily left to right.
    out: list[str] = []
    i = 0
    while i < len(text):
        for lab in alphabet:
            if text.startswith(lab, i):
                out.append(lab)
                i += len(lab)
                break
        else:
            raise GraphError(f"cannot decode word {text!r} over alphabet {list(alphabet)}")
    return tuple(out)


def parse_node(text: str, alphabet: Alphabet) -> NodeId:
    """Parse the canonical text form of a node id back into a NodeId."""
    t = text.strip()
    if not t:
        raise GraphError("empty node text")
    if t.startswith("{"):
        if not t.endswith("}"):
            raise GraphError(f"unbalanced multiset braces in {text!r}")
        return MSet(tuple(parse_node(p, alphabet) for p in _split_top(t[1:-1], ",")))
    if t.startswith("("):
        if not t.endswith(")"):
            raise GraphError(f"unbalanced parentheses in {text!r}")
        inner = t[1:-1]
        pieces = _split_top(inner, "|")
        if len(pieces) != 2:
            raise GraphError(f"expected one '|' separator in {text!r}")
        return Word(parse_node(pieces[0], alphabet), _decode_word(pieces[1], alphabet))
    return Base(t)


@dataclass(frozen=True)
class LabeledEdge:
    src: NodeId
    dst: NodeId
    label: str


def edge_key(e: LabeledEdge) -> tuple[str, str, str]:
    return (node_key(e.src), node_key(e.dst), e.label)


@dataclass(frozen=True)
class LabeledDigraph:
    """A finite labeled digraph; every edge carries exactly one label.

    Parallel duplicate edges collapse automatically (the edge set is a set).
    """

    alphabet: Alphabet
    nodes: frozenset
    edges: frozenset

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(self.edges))
        for e in self.edges:
            if e.label not in self.alphabet:
                raise GraphError(f"edge label {e.label!r} not in alphabet")
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise GraphError(f"edge {edge_key(e)} references an unknown node")

    @classmethod
    def from_triples(
        cls,
        labels: Iterable[str],
        triples: Iterable[tuple],
        isolated: Iterable = (),
    ) -> "LabeledDigraph":
        """Build from (src, dst, label) triples; plain strings become Base nodes."""

        def as_node(x) -> NodeId:
            return Base(x) if isinstance(x, str) else x

        alphabet = labels if isinstance(labels, Alphabet) else Alphabet(tuple(labels))
        edges = frozenset(LabeledEdge(as_node(s), as_node(d), lab) for s, d, lab in triples)
        nodes = {e.src for e in edges} | {e.dst for e in edges}
        nodes |= {as_node(x) for x in isolated}
        return cls(alphabet, frozenset(nodes), edges)

    def sorted_nodes(self) -> list:
        return sorted(self.nodes, key=node_key)

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=edge_key)

    def without_edge(self, e: LabeledEdge) -> "LabeledDigraph":
        return LabeledDigraph(self.alphabet, self.nodes, self.edges - {e})

    def out_labels(self, node: NodeId) -> frozenset:
        return frozenset(e.label for e in self.edges if e.src == node)

    def in_labels(self, node: NodeId) -> frozenset:
        return frozenset(e.label for e in self.edges if e.dst == node)


def _label_adjacency(g: LabeledDigraph) -> dict:
    adj: dict = {lab: {} for lab in g.alphabet}
    for e in g.edges:
        adj[e.label].setdefault(e.src, set()).add(e.dst)
    return adj


def shortest_unreadable_word(g: LabeledDigraph) -> Optional[tuple[str, ...]]:
    """Shortest word that labels no path of ``g``; None iff path-complete.

    Breadth-first subset construction: start from the full node set, follow
    each label; a word is unreadable exactly when its subset trace hits the
    empty set. BFS over at most 2^|S| subsets gives a minimal witness,
    independent of node ordering.
    """
    adj = _label_adjacency(g)
    start = frozenset(g.nodes)
    if not start:
        return (g.alphabet.labels[0],)
    seen = {start}
    queue: deque = deque([(start, ())])
    while queue:
        current, word = queue.popleft()
        for label in g.alphabet:
            step = adj[label]
            nxt = frozenset().union(*(step.get(n, ()) for n in current)) if current else frozenset()
            if not nxt:
                return word + (label,)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (label,)))
    return None


def is_path_complete(g: LabeledDigraph) -> bool:
    """True iff every finite word over the alphabet labels some node path."""
    return shortest_unreadable_word(g) is None


def _reach(nodes: frozenset, succ: dict, start: NodeId) -> set:
    seen = {start}
    stack = [start]
    while stack:
        for m in succ.get(stack.pop(), ()):
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen


def _succ_map(g: LabeledDigraph, undirected: bool = False, reverse: bool = False) -> dict:
    succ: dict = {}
    for e in g.edges:
        a, b = (e.dst, e.src) if reverse else (e.src, e.dst)
        succ.setdefault(a, set()).add(b)
        if undirected:
            succ.setdefault(b, set()).add(a)
    return succ


def is_strongly_connected(g: LabeledDigraph) -> bool:
    """Label-blind reachability both ways between all node pairs."""
    if len(g.nodes) <= 1:
        return True
    root = g.sorted_nodes()[0]
    fwd = _reach(g.nodes, _succ_map(g), root)
    bwd = _reach(g.nodes, _succ_map(g, reverse=True), root)
    return len(fwd) == len(g.nodes) and len(bwd) == len(g.nodes)


def is_weakly_connected(g: LabeledDigraph) -> bool:
    """Connectivity of the underlying undirected graph."""
    if len(g.nodes) <= 1:
        return True
    root = g.sorted_nodes()[0]
    return len(_reach(g.nodes, _succ_map(g, undirected=True), root)) == len(g.nodes)


def is_sink_free(g: LabeledDigraph) -> bool:
    with_out = {e.src for e in g.edges}
    return all(n in with_out for n in g.nodes)


def is_source_free(g: LabeledDigraph) -> bool:
    with_in = {e.dst for e in g.edges}
    return all(n in with_in for n in g.nodes)


@dataclass(frozen=True)
class Assumption1Report:
    """Verdict of the non-redundancy check, with the first offender if any."""

    ok: bool
    strongly_connected: bool
    redundant_edge: Optional[LabeledEdge]


def check_assumption1(g: LabeledDigraph) -> Assumption1Report:
    """Non-redundancy: strongly connected and no single edge can be dropped
    without breaking path-completeness. The input must be path-complete.
    """
    if not is_path_complete(g):
        raise GraphError("assumption-1 check requires a path-complete graph")
    strong = is_strongly_connected(g)
    redundant = None
    for e in g.sorted_edges():
        if is_path_complete(g.without_edge(e)):
            redundant = e
            break
    return Assumption1Report(strong and redundant is None, strong, redundant)


def satisfies_assumption1(g: LabeledDigraph) -> bool:
    return check_assumption1(g).ok


def transpose(g: LabeledDigraph) -> LabeledDigraph:
    """Reverse every edge, keeping labels."""
    return LabeledDigraph(
        g.alphabet,
        g.nodes,
        frozenset(LabeledEdge(e.dst, e.src, e.label) for e in g.edges),
    )


def _sanitized(text: str) -> str:
    return "".join("_" if c in _RESERVED else c for c in text)


def disjoint_union(g1: LabeledDigraph, g2: LabeledDigraph) -> LabeledDigraph:
    """Union with deterministic renaming of second-graph nodes on collision."""
    if g1.alphabet != g2.alphabet:
        raise GraphError("disjoint union requires identical alphabets")
    taken = set(g1.nodes)
    mapping: dict = {}
    for n in g2.sorted_nodes():
        if n not in taken:
            mapping[n] = n
        else:
            k = 2
            while Base(f"{_sanitized(render_node(n))}+{k}") in taken:
                k += 1
            mapping[n] = Base(f"{_sanitized(render_node(n))}+{k}")
        taken.add(mapping[n])
    edges = frozenset(LabeledEdge(mapping[e.src], mapping[e.dst], e.label) for e in g2.edges)
    return LabeledDigraph(g1.alphabet, frozenset(taken), g1.edges | edges)


def _degree_signature(g: LabeledDigraph, node: NodeId) -> tuple:
    out: dict = {}
    inn: dict = {}
    for e in g.edges:
        if e.src == node:
            out[e.label] = out.get(e.label, 0) + 1
        if e.dst == node:
            inn[e.label] = inn.get(e.label, 0) + 1
    return (tuple(sorted(out.items())), tuple(sorted(inn.items())))


def find_isomorphism(g1: LabeledDigraph, g2: LabeledDigraph) -> Optional[dict]:
    """Label-preserving node bijection mapping edges onto edges, or None.

    Backtracking over signature-compatible candidates; degree signatures
    prune most mismatches up front.
    """
    if g1.alphabet != g2.alphabet:
        return None
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    sig1 = {n: _degree_signature(g1, n) for n in g1.nodes}
    sig2 = {n: _degree_signature(g2, n) for n in g2.nodes}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None
    by_sig: dict = {}
    for n in g2.sorted_nodes():
        by_sig.setdefault(sig2[n], []).append(n)
    order = sorted(g1.nodes, key=lambda n: (len(by_sig.get(sig1[n], ())), node_key(n)))
    e1, e2 = g1.edges, g2.edges
    labels = list(g1.alphabet)
    mapping: dict = {}
    used: set = set()

    def consistent(v1: NodeId, v2: NodeId) -> bool:
        for u1, u2 in mapping.items():
            for lab in labels:
                if (LabeledEdge(v1, u1, lab) in e1) != (LabeledEdge(v2, u2, lab) in e2):
                    return False
                if (LabeledEdge(u1, v1, lab) in e1) != (LabeledEdge(u2, v2, lab) in e2):
                    return False
        for lab in labels:
            if (LabeledEdge(v1, v1, lab) in e1) != (LabeledEdge(v2, v2, lab) in e2):
                return False
        return True

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v1 = order[i]
        for v2 in by_sig.get(sig1[v1], ()):
            if v2 in used or not consistent(v1, v2):
                continue
            mapping[v1] = v2
            used.add(v2)
            if extend(i + 1):
                return True
            del mapping[v1]
            used.remove(v2)
        return False

    if not extend(0):
        return None
    assert all(LabeledEdge(mapping[e.src], mapping[e.dst], e.label) in e2 for e in e1)
    return dict(mapping)


def isomorphic(g1: LabeledDigraph, g2: LabeledDigraph) -> bool:
    return find_isomorphism(g1, g2) is not None
