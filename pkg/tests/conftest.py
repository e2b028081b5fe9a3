import random

import pytest

from pclift import LabeledDigraph, gallery_graph, is_path_complete, is_sink_free, is_weakly_connected


@pytest.fixture(scope="session")
def g0():
    return gallery_graph("g0")


@pytest.fixture(scope="session")
def g1():
    return gallery_graph("g1")


@pytest.fixture(scope="session")
def g2():
    return gallery_graph("g2")


@pytest.fixture(scope="session")
def g_alpha():
    return gallery_graph("g_alpha")


@pytest.fixture(scope="session")
def g_phi():
    return gallery_graph("g_phi")


@pytest.fixture(scope="session")
def g_psi():
    return gallery_graph("g_psi")


def random_graph_corpus(
    count: int,
    seed: int,
    max_nodes: int = 5,
    labels=("1", "2"),
    path_complete: bool = True,
    connected: bool = True,
    sink_free: bool = True,
):
    """Deterministic rejection sampler for small labeled digraphs."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_nodes)
        names = [f"n{i}" for i in range(n)]
        edges = set()
        for a in names:  # at least one outgoing edge per node
            edges.add((a, rng.choice(names), rng.choice(labels)))
        for _ in range(rng.randint(0, 2 * n)):
            edges.add((rng.choice(names), rng.choice(names), rng.choice(labels)))
        g = LabeledDigraph.from_triples(labels, edges, isolated=names)
        if path_complete and not is_path_complete(g):
            continue
        if connected and not is_weakly_connected(g):
            continue
        if sink_free and not is_sink_free(g):
            continue
        out.append(g)
    return out


@pytest.fixture(scope="session")
def small_corpus():
    return random_graph_corpus(30, seed=11)
