import math
import random

import numpy as np
import pytest

from vroad import Environment, PoIEdge, PoIGraph, PoINode, Polyline, load_map
from vroad.fixtures import FIXTURE_NAMES, ROUTES, env_doc, map_doc


def bent_edge(a: PoINode, b: PoINode, weight: float) -> PoIEdge:
    """Edge whose 3-point segment has arc length exactly ``weight``.

    The midpoint is offset perpendicular to the chord so that the two
    halves sum to the requested weight (which must be >= the chord).
    """
    pa, pb = np.asarray(a.position), np.asarray(b.position)
    chord = float(np.linalg.norm(pb - pa))
    if weight < chord:
        raise ValueError("weight below chord")
    half = weight / 2.0
    bulge = math.sqrt(max(half**2 - (chord / 2.0) ** 2, 0.0))
    direction = (pb - pa) / chord
    perp = np.array([-direction[1], direction[0]])
    mid = (pa + pb) / 2.0 + perp * bulge
    if bulge < 1e-9:
        segment = Polyline([pa, pb])
    else:
        segment = Polyline([pa, mid, pb])
    return PoIEdge(a.id, b.id, segment, weight)


def make_random_graph(rng: random.Random, n_nodes: int = 8) -> PoIGraph:
    """Connected graph with bent-segment edges and weights >= chord."""
    nodes = {}
    for k in range(n_nodes):
        nid = f"n{k}"
        nodes[nid] = PoINode(
            nid, f"P{k}", (rng.uniform(0, 30), rng.uniform(0, 30)), k
        )
    ids = list(nodes)
    edges = []
    for k in range(1, n_nodes):  # random spanning tree keeps it connected
        other = ids[rng.randrange(k)]
        w_scale = rng.uniform(1.0, 1.8)
        a, b = nodes[ids[k]], nodes[other]
        chord = float(np.linalg.norm(np.asarray(a.position) - np.asarray(b.position)))
        edges.append(bent_edge(a, b, max(chord * w_scale, 1e-3)))
    for _ in range(rng.randrange(1, n_nodes)):
        i, j = rng.sample(range(n_nodes), 2)
        a, b = nodes[ids[i]], nodes[ids[j]]
        chord = float(np.linalg.norm(np.asarray(a.position) - np.asarray(b.position)))
        if chord < 1e-6:
            continue
        edges.append(bent_edge(a, b, chord * rng.uniform(1.0, 1.8)))
    graph = PoIGraph(nodes, edges)
    graph.validate()
    return graph


@pytest.fixture(scope="session")
def fixture_maps():
    """Graphs and roads of the three built-in maps, loaded once."""
    return {name: load_map(map_doc(name)) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def fixture_envs():
    return {
        (name, obstacles): Environment.from_doc(env_doc(name, obstacles))
        for name in FIXTURE_NAMES
        for obstacles in (False, True)
    }


@pytest.fixture(scope="session")
def fixture_routes():
    return ROUTES
