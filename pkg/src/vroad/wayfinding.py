"""Shortest-route search over the PoI graph and expansion to a dense path."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .blind_road import MapFormatError, PoIGraph, UnknownNodeError
from .geometry import Polyline, resample

DEFAULT_PATH_SPACING = 0.25

# Exhaustive enumeration is the planner's test oracle; cap its input size.
_BRUTE_FORCE_MAX_NODES = 12

_EXPAND_LENGTH_TOL = 1e-6


class NoPathError(Exception):
    """The goal is unreachable from the start node."""


@dataclass(frozen=True)
class NodeRoute:
    """An ordered walk through graph nodes and its total edge cost."""

    node_ids: tuple[str, ...]
    total_cost: float


def _require_node(graph: PoIGraph, node_id: str) -> None:
    if node_id not in graph.nodes:
        raise UnknownNodeError(f"unknown node id {node_id!r}")


def astar(graph: PoIGraph, start: str, goal: str) -> NodeRoute:
    """Minimal-cost route between two nodes.

    Uses the straight-line distance between node positions as the
    heuristic; edge weights are validated to be at least that distance,
    which keeps the heuristic admissible. Equal-cost routes tie-break
    to the lexicographically smallest node-id sequence.
    """
    _require_node(graph, start)
    _require_node(graph, goal)
    goal_pos = np.asarray(graph.nodes[goal].position)

    def h(node_id: str) -> float:
        return float(np.linalg.norm(np.asarray(graph.nodes[node_id].position) - goal_pos))

    best: dict[str, tuple[float, tuple[str, ...]]] = {start: (0.0, (start,))}
    heap: list[tuple[float, float, tuple[str, ...]]] = [(h(start), 0.0, (start,))]
    while heap:
        _, g, path = heapq.heappop(heap)
        node = path[-1]
        if best.get(node) != (g, path):
            continue  # superseded entry
        if node == goal:
            return NodeRoute(path, g)
        for other, (weight, _) in graph.neighbors(node):
            ng = g + weight
            npath = path + (other,)
            cur = best.get(other)
            if cur is None or (ng, npath) < cur:
                best[other] = (ng, npath)
                heapq.heappush(heap, (ng + h(other), ng, npath))
    raise NoPathError(f"no route from {start!r} to {goal!r}")


def brute_force_shortest(graph: PoIGraph, start: str, goal: str) -> NodeRoute:
    """Exhaustively enumerate simple paths and return the cheapest.

    Independent reference for :func:`astar`; refuses graphs with more
    than 12 nodes. Ties resolve to the lexicographically smallest
    node-id sequence.
    """
    _require_node(graph, start)
    _require_node(graph, goal)
    if len(graph.nodes) > _BRUTE_FORCE_MAX_NODES:
        raise ValueError(
            f"brute force limited to {_BRUTE_FORCE_MAX_NODES} nodes, "
            f"got {len(graph.nodes)}"
        )

    best: tuple[float, tuple[str, ...]] | None = None

    def walk(node: str, cost: float, path: tuple[str, ...], seen: set[str]):
        nonlocal best
        if node == goal:
            cand = (cost, path)
            if best is None or cand < best:
                best = cand
            return
        for other, (weight, _) in sorted(graph.neighbors(node)):
            if other in seen:
                continue
            walk(other, cost + weight, path + (other,), seen | {other})

    walk(start, 0.0, (start,), {start})
    if best is None:
        raise NoPathError(f"no route from {start!r} to {goal!r}")
    return NodeRoute(best[1], best[0])


def expand_path(
    graph: PoIGraph, route: NodeRoute, path_spacing: float = DEFAULT_PATH_SPACING
) -> Polyline:
    """Concatenate the route's edge segments into one dense polyline.

    Each segment is oriented to leave the previous node, shared junction
    vertices are collapsed, and the result is resampled at
    ``path_spacing``. The expanded arc length must match the route cost.
    """
    ids = route.node_ids
    if not ids:
        raise ValueError("route has no nodes")
    for nid in ids:
        _require_node(graph, nid)
    start_pos = np.asarray(graph.nodes[ids[0]].position)
    if len(ids) == 1:
        return Polyline([start_pos])

    chunks = [start_pos.reshape(1, 2)]
    for a, b in zip(ids[:-1], ids[1:]):
        edge = graph.best_edge(a, b)
        seg = edge.segment.points
        pos_a = np.asarray(graph.nodes[a].position)
        pos_b = np.asarray(graph.nodes[b].position)
        if np.linalg.norm(seg[0] - pos_a) <= 1e-9 and np.linalg.norm(seg[-1] - pos_b) <= 1e-9:
            oriented = seg
        elif np.linalg.norm(seg[-1] - pos_a) <= 1e-9 and np.linalg.norm(seg[0] - pos_b) <= 1e-9:
            oriented = seg[::-1]
        else:
            raise MapFormatError(
                f"segment between {a!r} and {b!r} does not join the two nodes"
            )
        chunks.append(oriented[1:])

    path = resample(Polyline(np.vstack(chunks)), path_spacing)
    if not math.isclose(path.length, route.total_cost, abs_tol=_EXPAND_LENGTH_TOL):
        raise MapFormatError(
            f"expanded path length {path.length} does not match route cost "
            f"{route.total_cost}"
        )
    return path
