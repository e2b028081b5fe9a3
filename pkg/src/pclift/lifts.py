"""Graph lifts: sum lifts, forward/backward composition lifts, bounded
unions of composition levels, and the transitive closure of the
composition lift.

Depth conventions: a lifted node ``(s, j1..jT)`` stands for the candidate
certificate at ``s`` composed with the maps ``j1``, then ``j2``, ... so new
letters are prepended when an edge pushes a map in front. Lifts are always
truncated at an explicit finite depth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BudgetError, GraphError
from .graphs import LabeledDigraph, LabeledEdge, MSet, NodeId, Word

# Soft cap on constructed node counts; lifts grow as |S|*|Sigma|^t.
NODE_BUDGET = 200_000


def _check_budget(count: int, what: str) -> None:
    if count > NODE_BUDGET:
        raise BudgetError(f"{what} would create {count} nodes (budget {NODE_BUDGET})")


def _has_matching(rows: list, cols: list, allowed) -> bool:
    """Perfect matching on a small bipartite graph (Kuhn's augmenting paths)."""
    match_of_col = [-1] * len(cols)

    def try_row(r: int, seen: list) -> bool:
        for c in range(len(cols)):
            if allowed(rows[r], cols[c]) and not seen[c]:
                seen[c] = True
                if match_of_col[c] < 0 or try_row(match_of_col[c], seen):
                    match_of_col[c] = r
                    return True
        return False

    for r in range(len(rows)):
        if not try_row(r, [False] * len(cols)):
            return False
    return True


def sum_lift(g: LabeledDigraph, t: int) -> LabeledDigraph:
    """T-sum lift: nodes are size-t multisets; an edge with label i exists
    when the two multisets admit a perfect pairing of label-i edges.
    """
    if t < 1:
        raise GraphError("sum lift depth must be at least 1")
    base = g.sorted_nodes()
    msets = list(itertools.combinations_with_replacement(base, t))
    _check_budget(len(msets), f"sum lift at depth {t}")
    edge_set = {(e.src, e.dst, e.label) for e in g.edges}
    succs: dict = {}
    for e in g.edges:
        succs.setdefault((e.src, e.label), set()).add(e.dst)

    nodes = [MSet(m) for m in msets]
    edges = set()
    for m_src, src_node in zip(msets, nodes):
        for label in g.alphabet:
            # Quick reject: every source part needs some label-i successor.
            if any((a, label) not in succs for a in m_src):
                continue
            for m_dst, dst_node in zip(msets, nodes):
                if _has_matching(
                    list(m_src),
                    list(m_dst),
                    lambda a, b, lab=label: (a, b, lab) in edge_set,
                ):
                    edges.add(LabeledEdge(src_node, dst_node, label))
    return LabeledDigraph(g.alphabet, frozenset(nodes), frozenset(edges))


def _words(alphabet, t: int) -> list[tuple[str, ...]]:
    return [tuple(w) for w in itertools.product(alphabet, repeat=t)]


def fwd_comp_lift(g: LabeledDigraph, t: int) -> LabeledDigraph:
    """T-forward composition lift; depth 0 returns the graph itself.

    Each base edge (a, b, i) and word w spawn the edge
    ((a, w), (b, i . w[:-1]), w[-1]).
    """
    if t < 0:
        raise GraphError("lift depth must be nonnegative")
    if t == 0:
        return g
    _check_budget(len(g.nodes) * len(g.alphabet) ** t, f"forward composition lift at depth {t}")
    words = _words(g.alphabet, t)
    nodes = frozenset(Word(s, w) for s in g.nodes for w in words)
    edges = frozenset(
        LabeledEdge(Word(e.src, w), Word(e.dst, (e.label,) + w[:-1]), w[-1])
        for e in g.edges
        for w in words
    )
    return LabeledDigraph(g.alphabet, nodes, edges)


def bwd_comp_lift(g: LabeledDigraph, t: int) -> LabeledDigraph:
    """T-backward composition lift; transpose-dual of the forward lift.

    Each base edge (a, b, i) and word w spawn the edge
    ((a, i . w[:-1]), (b, w), w[-1]).
    """
    if t < 0:
        raise GraphError("lift depth must be nonnegative")
    if t == 0:
        return g
    _check_budget(len(g.nodes) * len(g.alphabet) ** t, f"backward composition lift at depth {t}")
    words = _words(g.alphabet, t)
    nodes = frozenset(Word(s, w) for s in g.nodes for w in words)
    edges = frozenset(
        LabeledEdge(Word(e.src, (e.label,) + w[:-1]), Word(e.dst, w), w[-1])
        for e in g.edges
        for w in words
    )
    return LabeledDigraph(g.alphabet, nodes, edges)


def _levels(g: LabeledDigraph, tmax: int) -> list[dict]:
    """Per-level maps (base node, word) -> lifted NodeId, level 0 first."""
    levels: list[dict] = [{(s, ()): s for s in g.nodes}]
    for t in range(1, tmax + 1):
        levels.append({(s, w): Word(s, w) for s in g.nodes for w in _words(g.alphabet, t)})
    return levels


def comp_lift_union(g: LabeledDigraph, tmax: int) -> LabeledDigraph:
    """Disjoint union of forward lift levels 0..tmax; node words carry levels."""
    if tmax < 0:
        raise GraphError("lift depth must be nonnegative")
    parts = [fwd_comp_lift(g, t) for t in range(tmax + 1)]
    nodes: set = set()
    edges: set = set()
    for p in parts:
        before = len(nodes)
        nodes |= p.nodes
        if len(nodes) != before + len(p.nodes):
            raise GraphError(
                "level node identities collide; the base graph already uses "
                "word-annotated nodes of a clashing shape"
            )
        edges |= p.edges
    return LabeledDigraph(g.alphabet, frozenset(nodes), frozenset(edges))


@dataclass(frozen=True)
class TransitiveLiftGraph:
    """Closure of the composition lift: labeled single-letter edges plus the
    unlabeled pointwise-domination (epsilon) edges used to build them.
    """

    graph: LabeledDigraph
    epsilon_edges: frozenset
    tmax: int


def transitive_comp_lift(g: LabeledDigraph, tmax: int) -> TransitiveLiftGraph:
    """Transitive closure of the depth-bounded composition lift.

    On the nodes of ``comp_lift_union(g, tmax)`` three edge families are laid
    down: the lifted labeled edges of every level, definitional descent edges
    ((s, w) -> (s, w[:-1]) labeled w[-1], an identity of certificates), and
    unlabeled epsilon edges (a, u) -> (b, i.u) for every base edge (a, b, i).
    The result keeps exactly the labeled edges of the closure
    { (p, q', k) : p ->eps* q, (q, r, k) labeled, r ->eps* q' }.
    """
    if tmax < 0:
        raise GraphError("lift depth must be nonnegative")
    union = comp_lift_union(g, tmax)
    levels = _levels(g, tmax)

    labeled: set = set(union.edges)
    for t in range(1, tmax + 1):
        for (s, w), node in levels[t].items():
            labeled.add(LabeledEdge(node, levels[t - 1][(s, w[:-1])], w[-1]))

    epsilon: set = set()
    for t in range(tmax):
        for (a, u), src in levels[t].items():
            for e in g.edges:
                if e.src == a:
                    epsilon.add((src, levels[t + 1][(e.dst, (e.label,) + u)]))

    eps_succ: dict = {}
    eps_pred: dict = {}
    for p, q in epsilon:
        eps_succ.setdefault(p, set()).add(q)
        eps_pred.setdefault(q, set()).add(p)

    def closure(start: NodeId, step: dict) -> set:
        seen = {start}
        stack = [start]
        while stack:
            for m in step.get(stack.pop(), ()):
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return seen

    fwd_closure = {n: closure(n, eps_succ) for n in union.nodes}
    bwd_closure = {n: closure(n, eps_pred) for n in union.nodes}

    closed: set = set()
    for e in labeled:
        for p in bwd_closure[e.src]:
            for q2 in fwd_closure[e.dst]:
                closed.add(LabeledEdge(p, q2, e.label))
    graph = LabeledDigraph(g.alphabet, union.nodes, frozenset(closed))
    return TransitiveLiftGraph(graph=graph, epsilon_edges=frozenset(epsilon), tmax=tmax)
