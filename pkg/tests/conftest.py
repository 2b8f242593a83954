import itertools
import os

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from unitdist.enumeration import ForbiddenFamily
from unitdist.graphcore import Graph
from unitdist.pipeline import default_catalog, default_family

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

K4 = Graph.complete(4)
K23 = Graph.complete_bipartite(2, 3)
# two rhombi sharing a vertex, apexes joined
MOSER = Graph.from_edges(7, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3),
                             (0, 4), (0, 5), (4, 5), (4, 6), (5, 6), (3, 6)])


@pytest.fixture(scope="session")
def family74() -> ForbiddenFamily:
    return default_family()


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@st.composite
def graphs(draw, min_n=0, max_n=8, p=None):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    if p is None:
        chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    else:
        chosen = [draw(st.floats(0, 1)) < p for _ in pairs]
    return Graph.from_edges(n, [e for e, c in zip(pairs, chosen) if c])


@st.composite
def permutations_of(draw, n):
    return draw(st.permutations(list(range(n))))


# --- independent oracles (networkx / brute force) ---------------------------


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def nx_contains(host: Graph, pattern: Graph) -> bool:
    gm = nx.algorithms.isomorphism.GraphMatcher(to_nx(host), to_nx(pattern))
    return gm.subgraph_is_monomorphic()


def brute_embeddings(host: Graph, pattern: Graph) -> set[tuple[int, ...]]:
    out = set()
    for phi in itertools.permutations(range(host.n), pattern.n):
        if all(host.has_edge(phi[u], phi[v]) for u, v in pattern.edges()):
            out.add(phi)
    return out


def brute_canonical(g: Graph) -> tuple:
    """Lexicographically least sorted edge list over all relabelings."""
    best = None
    for perm in itertools.permutations(range(g.n)):
        key = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in g.edges()))
        if best is None or key < best:
            best = key
    return best
