"""Simulation between labeled digraphs: a total node map carrying every
labeled edge of the simulated graph to an edge of the simulating graph.

``find_simulation(g1, g2)`` looks for such a map from g2's nodes into g1,
i.e. a labeled-graph homomorphism g2 -> g1. Bounded searches through lift
families return a three-way verdict: a witness at some depth, a structural
refutation, or an honest "unknown" when the depth budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import GraphError
from .graphs import LabeledDigraph, LabeledEdge, NodeId, is_weakly_connected, node_key, render_node
from .lifts import fwd_comp_lift, sum_lift


@dataclass(frozen=True, eq=True)
class SimulationWitness:
    """Total map from the simulated graph's nodes into the simulating graph."""

    mapping: tuple  # sorted ((node of g2, node of g1), ...) pairs

    @classmethod
    def checked(cls, g1: LabeledDigraph, g2: LabeledDigraph, mapping: dict) -> "SimulationWitness":
        witness = cls(tuple(sorted(mapping.items(), key=lambda kv: node_key(kv[0]))))
        if not witness.verify(g1, g2):
            raise GraphError("mapping is not a simulation witness")
        return witness

    def as_dict(self) -> dict:
        return dict(self.mapping)

    def __getitem__(self, node: NodeId) -> NodeId:
        return self.as_dict()[node]

    def verify(self, g1: LabeledDigraph, g2: LabeledDigraph) -> bool:
        """Independent re-check of every edge of g2 under the map."""
        m = self.as_dict()
        if set(m) != set(g2.nodes):
            return False
        if any(v not in g1.nodes for v in m.values()):
            return False
        return all(LabeledEdge(m[e.src], m[e.dst], e.label) in g1.edges for e in g2.edges)


def find_simulation(g1: LabeledDigraph, g2: LabeledDigraph) -> Optional[SimulationWitness]:
    """Witness that g1 simulates g2, or None if no such map exists.

    Backtracking over g2's nodes in descending out-degree order; candidate
    sets are pre-filtered by label support (a node can only map to one whose
    out- and in-label sets dominate its own) and pruned by forward checking.
    Deterministic ordering makes the returned witness reproducible.
    """
    if g1.alphabet != g2.alphabet:
        raise GraphError("simulation requires identical alphabets")
    if not g2.nodes:
        return SimulationWitness(())

    nodes1 = g1.sorted_nodes()
    out1 = {n: g1.out_labels(n) for n in nodes1}
    in1 = {n: g1.in_labels(n) for n in nodes1}
    candidates: dict = {}
    for v in g2.nodes:
        need_out, need_in = g2.out_labels(v), g2.in_labels(v)
        pool = [u for u in nodes1 if need_out <= out1[u] and need_in <= in1[u]]
        # Trying the same node id first makes self-simulations come out as
        # the identity map and is a cheap win on shared-node instances.
        candidates[v] = sorted(pool, key=lambda u: (u != v, node_key(u)))
        if not candidates[v]:
            return None

    out_deg = {v: 0 for v in g2.nodes}
    adj: dict = {v: [] for v in g2.nodes}  # edges of g2 touching v
    for e in g2.edges:
        out_deg[e.src] += 1
        adj[e.src].append(e)
        if e.dst != e.src:
            adj[e.dst].append(e)
    order = sorted(g2.nodes, key=lambda v: (-out_deg[v], node_key(v)))
    rank = {v: i for i, v in enumerate(order)}
    e1 = g1.edges
    assignment: dict = {}

    def ok(v: NodeId, u: NodeId) -> bool:
        for e in adj[v]:
            a = u if e.src == v else assignment.get(e.src)
            b = u if e.dst == v else assignment.get(e.dst)
            if a is None or b is None:
                continue
            if LabeledEdge(a, b, e.label) not in e1:
                return False
        return True

    def extend(i: int, cand: dict) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for u in cand[v]:
            if not ok(v, u):
                continue
            assignment[v] = u
            pruned = dict(cand)
            dead = False
            for e in adj[v]:
                w = e.dst if e.src == v else e.src
                if w in assignment or rank[w] <= i:
                    continue
                keep = [c for c in pruned[w] if _edge_ok(assignment, e1, e, v, u, w, c)]
                if not keep:
                    dead = True
                    break
                pruned[w] = keep
            if not dead and extend(i + 1, pruned):
                return True
            del assignment[v]
        return False

    if not extend(0, candidates):
        return None
    return SimulationWitness.checked(g1, g2, assignment)


def _edge_ok(assignment, e1, e, v, u, w, c) -> bool:
    a = u if e.src == v else (c if e.src == w else assignment.get(e.src))
    b = u if e.dst == v else (c if e.dst == w else assignment.get(e.dst))
    if a is None or b is None:
        return True
    return LabeledEdge(a, b, e.label) in e1


@dataclass(frozen=True)
class LiftSimVerdict:
    """Outcome of a bounded lift-simulation search.

    ``yes`` carries the successful depth and a verified witness, ``no`` a
    machine-checked structural refutation, and ``unknown`` means the depth
    budget was exhausted without a decision.
    """

    status: str  # "yes" | "no" | "unknown"
    level: Optional[int] = None
    witness: Optional[SimulationWitness] = None
    reason: Optional[str] = None
    tmax: Optional[int] = None

    @property
    def is_yes(self) -> bool:
        return self.status == "yes"

    @property
    def is_no(self) -> bool:
        return self.status == "no"


def simulates_comp_lift(g: LabeledDigraph, g_tilde: LabeledDigraph, tmax: int) -> LiftSimVerdict:
    """Search for a simulation of ``g_tilde`` by forward composition lifts of
    ``g`` up to depth ``tmax``.

    ``g_tilde`` must be weakly connected, so any homomorphism into the
    disjoint union of lift levels lands inside a single level. In a level of
    depth >= 1 every node emits exactly one label, hence a node of
    ``g_tilde`` with outgoing edges of two distinct labels can only map into
    the depth-0 copy: if the direct search fails too, that is a refutation
    for every depth at once.
    """
    if g.alphabet != g_tilde.alphabet:
        raise GraphError("simulation requires identical alphabets")
    if not is_weakly_connected(g_tilde):
        raise GraphError("lift simulation search requires a weakly connected target")

    multi = sorted(
        (v for v in g_tilde.nodes if len(g_tilde.out_labels(v)) >= 2),
        key=node_key,
    )
    if multi:
        witness = find_simulation(g, g_tilde)
        if witness is not None:
            return LiftSimVerdict("yes", level=0, witness=witness, tmax=tmax)
        labels = sorted(g_tilde.out_labels(multi[0]))
        return LiftSimVerdict(
            "no",
            reason=(
                f"node {render_node(multi[0])} has outgoing edges labeled "
                f"{' and '.join(labels)}, but beyond depth 0 every lift node emits "
                "a single label, and the depth-0 graph admits no simulation"
            ),
            tmax=tmax,
        )
    for t in range(tmax + 1):
        witness = find_simulation(fwd_comp_lift(g, t), g_tilde)
        if witness is not None:
            return LiftSimVerdict("yes", level=t, witness=witness, tmax=tmax)
    return LiftSimVerdict("unknown", tmax=tmax)


def simulates_sum_lift(g: LabeledDigraph, g_tilde: LabeledDigraph, tmax: int) -> LiftSimVerdict:
    """Search for a simulation of ``g_tilde`` by sum lifts of ``g`` up to
    depth ``tmax``. No structural refutation is attempted, so failure is
    reported as unknown rather than no.
    """
    if g.alphabet != g_tilde.alphabet:
        raise GraphError("simulation requires identical alphabets")
    for t in range(1, tmax + 1):
        witness = find_simulation(sum_lift(g, t), g_tilde)
        if witness is not None:
            return LiftSimVerdict("yes", level=t, witness=witness, tmax=tmax)
    return LiftSimVerdict("unknown", tmax=tmax)
