"""Recording walkable trails, tagging points of interest, and map files.

A trail is recorded once by walking it; labeled places along it become
graph nodes, and the pieces of trail between consecutive tags become
weighted edges that carry their own geometry. Maps with branching
corridors are built by recording several walks and merging the resulting
graphs on shared labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import COINCIDENT_EPS, Polyline, arc_length

DEFAULT_MIN_RECORD_SPACING = 0.1
DEFAULT_SNAP_RADIUS = 0.5
MAP_SCHEMA_VERSION = 1

# Tolerances for validating loaded maps (coordinates are serialized with
# 9 significant digits).
_WEIGHT_TOL = 1e-6
_ENDPOINT_TOL = 1e-9


class DuplicateLabelError(ValueError):
    """A point-of-interest label is already in use."""


class TooFarFromRoadError(ValueError):
    """A tag position does not snap to any trail vertex."""


class MapFormatError(ValueError):
    """A map document is malformed or internally inconsistent."""


class VirtualBlindRoad:
    """A reference trail recorded as a sparsely spaced vertex chain."""

    def __init__(self, min_spacing: float = DEFAULT_MIN_RECORD_SPACING):
        if not min_spacing > 0.0:
            raise ValueError("min_spacing must be positive")
        self.min_spacing = float(min_spacing)
        self._points: list[tuple[float, float]] = []

    def record_point(self, p) -> bool:
        """Append ``p`` if it is at least ``min_spacing`` from the last point.

        Returns True when the point was appended.
        """
        x, y = float(p[0]), float(p[1])
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValueError("recorded point must be finite")
        if self._points:
            lx, ly = self._points[-1]
            if np.hypot(x - lx, y - ly) < self.min_spacing:
                return False
        self._points.append((x, y))
        return True

    @classmethod
    def from_points(cls, points, min_spacing: float = DEFAULT_MIN_RECORD_SPACING):
        road = cls(min_spacing)
        for p in points:
            road.record_point(p)
        return road

    @classmethod
    def _from_stored(cls, points, min_spacing: float):
        # Used when loading a map file: keep vertices exactly as stored.
        road = cls(min_spacing)
        road._points = [(float(x), float(y)) for x, y in points]
        return road

    @property
    def trail(self) -> Polyline:
        if not self._points:
            raise ValueError("road has no recorded points")
        return Polyline(self._points)

    def __len__(self) -> int:
        return len(self._points)


@dataclass(frozen=True)
class PoINode:
    """A labeled place snapped onto the trail."""

    id: str
    label: str
    position: tuple[float, float]
    trail_index: int


@dataclass(frozen=True)
class PoIEdge:
    """Undirected connection carrying the piece of trail between two nodes."""

    from_id: str
    to_id: str
    segment: Polyline
    weight: float


class PoIGraph:
    """Nodes and undirected weighted edges; immutable once built."""

    def __init__(self, nodes: dict[str, PoINode], edges: list[PoIEdge]):
        self.nodes = dict(nodes)
        self.edges = list(edges)
        self._adjacency = None
        self._by_label = {n.label: n for n in self.nodes.values()}

    def node_by_label(self, label: str) -> PoINode:
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownNodeError(f"no node labeled {label!r}") from None

    def neighbors(self, node_id: str):
        """Yield (other_id, weight, edge) using the cheapest parallel edge."""
        return self._adj()[node_id].items()

    def best_edge(self, a: str, b: str) -> PoIEdge:
        try:
            _, edge = self._adj()[a][b]
        except KeyError:
            raise MapFormatError(f"no edge between {a!r} and {b!r}") from None
        return edge

    def _adj(self):
        if self._adjacency is None:
            adj: dict[str, dict[str, tuple[float, PoIEdge]]] = {
                nid: {} for nid in self.nodes
            }
            for edge in self.edges:
                for u, v in ((edge.from_id, edge.to_id), (edge.to_id, edge.from_id)):
                    cur = adj[u].get(v)
                    if cur is None or edge.weight < cur[0]:
                        adj[u][v] = (edge.weight, edge)
            self._adjacency = adj
        return self._adjacency

    def validate(self) -> None:
        """Check structural invariants; raises MapFormatError on violation."""
        labels = set()
        for node in self.nodes.values():
            if node.label in labels:
                raise MapFormatError(f"duplicate node label {node.label!r}")
            labels.add(node.label)
        for k, edge in enumerate(self.edges):
            for nid in (edge.from_id, edge.to_id):
                if nid not in self.nodes:
                    raise MapFormatError(
                        f"edge {k} references unknown node id {nid!r}"
                    )
            if not edge.weight > 0.0:
                raise MapFormatError(f"edge {k}: weight must be positive")
            seg_len = edge.segment.length
            if abs(edge.weight - seg_len) > _WEIGHT_TOL:
                raise MapFormatError(
                    f"edge {k}: weight {edge.weight} does not match its "
                    f"segment arc length {seg_len}"
                )
            a = np.asarray(self.nodes[edge.from_id].position)
            b = np.asarray(self.nodes[edge.to_id].position)
            seg = edge.segment.points
            if (
                np.linalg.norm(seg[0] - a) > _ENDPOINT_TOL
                or np.linalg.norm(seg[-1] - b) > _ENDPOINT_TOL
            ):
                raise MapFormatError(
                    f"edge {k}: segment endpoints do not coincide with its nodes"
                )
            chord = float(np.linalg.norm(b - a))
            if edge.weight < chord - _WEIGHT_TOL:
                raise MapFormatError(
                    f"edge {k}: weight {edge.weight} is below the straight-line "
                    f"distance {chord} between its nodes"
                )


class UnknownNodeError(KeyError):
    """A node id or label is not present in the graph."""

    def __str__(self) -> str:  # KeyError quotes its message by default
        return self.args[0] if self.args else ""


def _fresh_id(taken) -> str:
    k = len(taken)
    while f"n{k}" in taken:
        k += 1
    return f"n{k}"


def tag_poi(
    road: VirtualBlindRoad,
    position,
    label: str,
    existing=(),
    snap_radius: float = DEFAULT_SNAP_RADIUS,
) -> PoINode:
    """Create a node for ``label`` snapped to the nearest trail vertex.

    ``existing`` is the collection of nodes already tagged on this map;
    it is used for label uniqueness and id assignment.
    """
    existing = list(existing)
    if any(n.label == label for n in existing):
        raise DuplicateLabelError(f"label {label!r} already tagged")
    trail = road.trail.points
    p = np.asarray([float(position[0]), float(position[1])])
    dists = np.linalg.norm(trail - p, axis=1)
    idx = int(np.argmin(dists))
    if dists[idx] > snap_radius:
        raise TooFarFromRoadError(
            f"{label!r} is {dists[idx]:.3f} m from the trail "
            f"(snap radius {snap_radius} m)"
        )
    node_id = _fresh_id({n.id for n in existing})
    return PoINode(node_id, label, (float(trail[idx, 0]), float(trail[idx, 1])), idx)


def build_graph(road: VirtualBlindRoad, nodes) -> PoIGraph:
    """Connect trail-consecutive nodes with edges carrying the trail slice."""
    nodes = list(nodes)
    if len(nodes) < 2:
        raise ValueError("a graph needs at least 2 tagged nodes")
    indices = [n.trail_index for n in nodes]
    if len(set(indices)) != len(indices):
        raise ValueError("nodes must sit at distinct trail vertices")
    ordered = sorted(nodes, key=lambda n: n.trail_index)
    trail = road.trail
    edges = []
    for a, b in zip(ordered[:-1], ordered[1:]):
        segment = Polyline(trail.points[a.trail_index : b.trail_index + 1])
        weight = arc_length(trail, a.trail_index, b.trail_index)
        edges.append(PoIEdge(a.id, b.id, segment, weight))
    graph = PoIGraph({n.id: n for n in ordered}, edges)
    graph.validate()
    return graph


def _weld_segment(segment: Polyline, start, end) -> Polyline:
    """Re-anchor a segment's endpoints onto the given positions.

    Used when merging walks: a shared label may sit at slightly different
    recorded positions, and every edge must end exactly on its node.
    """
    pts = [tuple(p) for p in segment.points]
    pts[0] = (float(start[0]), float(start[1]))
    pts[-1] = (float(end[0]), float(end[1]))
    cleaned = [pts[0]]
    for p in pts[1:]:
        if np.hypot(p[0] - cleaned[-1][0], p[1] - cleaned[-1][1]) >= COINCIDENT_EPS:
            cleaned.append(p)
    if len(cleaned) == 1 or cleaned[-1] != pts[-1]:
        cleaned = [pts[0], pts[-1]] if pts[0] != pts[-1] else [pts[0]]
    return Polyline(cleaned)


def merge_graphs(graphs, snap_radius: float = DEFAULT_SNAP_RADIUS) -> PoIGraph:
    """Union several walk graphs, joining nodes that share a label.

    Same-label nodes must agree in position within ``snap_radius``; the
    first walk's position wins and later segments are welded onto it.
    Node ids are reassigned in deterministic order.
    """
    graphs = list(graphs)
    if not graphs:
        raise ValueError("nothing to merge")
    by_label: dict[str, PoINode] = {}
    edges: list[PoIEdge] = []
    for graph in graphs:
        remap: dict[str, str] = {}
        for node in graph.nodes.values():
            known = by_label.get(node.label)
            if known is not None:
                gap = float(
                    np.linalg.norm(
                        np.asarray(known.position) - np.asarray(node.position)
                    )
                )
                if gap > snap_radius:
                    raise MapFormatError(
                        f"label {node.label!r} appears {gap:.3f} m apart in "
                        f"two walks (snap radius {snap_radius} m)"
                    )
                remap[node.id] = known.id
            else:
                new_id = _fresh_id({n.id for n in by_label.values()})
                merged = PoINode(new_id, node.label, node.position, node.trail_index)
                by_label[node.label] = merged
                remap[node.id] = new_id
        by_id = {n.id: n for n in by_label.values()}
        for edge in graph.edges:
            from_id, to_id = remap[edge.from_id], remap[edge.to_id]
            start = by_id[from_id].position
            end = by_id[to_id].position
            seg = edge.segment
            if (
                np.linalg.norm(seg.points[0] - np.asarray(start)) > _ENDPOINT_TOL
                or np.linalg.norm(seg.points[-1] - np.asarray(end)) > _ENDPOINT_TOL
            ):
                seg = _weld_segment(seg, start, end)
                edges.append(PoIEdge(from_id, to_id, seg, seg.length))
            else:
                edges.append(PoIEdge(from_id, to_id, seg, edge.weight))
    merged = PoIGraph({n.id: n for n in by_label.values()}, edges)
    merged.validate()
    return merged


def _round9(v: float) -> float:
    return float(f"{float(v):.9g}")


def save_map(graph: PoIGraph, road: VirtualBlindRoad) -> dict:
    """Serialize a graph and its trail to a plain JSON-ready document.

    Coordinates and weights are written with 9 significant digits.
    """
    return {
        "version": MAP_SCHEMA_VERSION,
        "road": {
            "spacing": _round9(road.min_spacing),
            "points": [[_round9(x), _round9(y)] for x, y in road._points],
        },
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "index": n.trail_index,
                "x": _round9(n.position[0]),
                "y": _round9(n.position[1]),
            }
            for n in graph.nodes.values()
        ],
        "edges": [
            {
                "from": e.from_id,
                "to": e.to_id,
                "weight": _round9(e.weight),
                "segment": [[_round9(x), _round9(y)] for x, y in e.segment.points],
            }
            for e in graph.edges
        ],
    }


def _require(doc: dict, key: str, ctx: str):
    if key not in doc:
        raise MapFormatError(f"{ctx}: missing {key!r}")
    return doc[key]


def _number(doc: dict, key: str, ctx: str) -> float:
    v = _require(doc, key, ctx)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MapFormatError(f"{ctx}: {key!r} must be a number")
    return float(v)


def _point_list(raw, ctx: str):
    if not isinstance(raw, list) or not raw:
        raise MapFormatError(f"{ctx}: must be a non-empty list of [x, y] pairs")
    pts = []
    for k, item in enumerate(raw):
        if (
            not isinstance(item, list)
            or len(item) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in item)
        ):
            raise MapFormatError(f"{ctx}[{k}]: must be an [x, y] number pair")
        pts.append((float(item[0]), float(item[1])))
    return pts


def load_map(doc: dict) -> tuple[PoIGraph, VirtualBlindRoad]:
    """Parse and validate a map document produced by :func:`save_map`."""
    if not isinstance(doc, dict):
        raise MapFormatError("map document must be a JSON object")
    version = _require(doc, "version", "map")
    if version != MAP_SCHEMA_VERSION:
        raise MapFormatError(f"unknown map schema version {version!r}")

    road_doc = _require(doc, "road", "map")
    if not isinstance(road_doc, dict):
        raise MapFormatError("map: 'road' must be an object")
    spacing = _number(road_doc, "spacing", "road")
    if not spacing > 0:
        raise MapFormatError("road: 'spacing' must be positive")
    road = VirtualBlindRoad._from_stored(
        _point_list(_require(road_doc, "points", "road"), "road.points"), spacing
    )

    nodes_doc = _require(doc, "nodes", "map")
    if not isinstance(nodes_doc, list):
        raise MapFormatError("map: 'nodes' must be a list")
    nodes: dict[str, PoINode] = {}
    for k, nd in enumerate(nodes_doc):
        ctx = f"nodes[{k}]"
        if not isinstance(nd, dict):
            raise MapFormatError(f"{ctx}: must be an object")
        nid = _require(nd, "id", ctx)
        label = _require(nd, "label", ctx)
        if not isinstance(nid, str) or not isinstance(label, str):
            raise MapFormatError(f"{ctx}: 'id' and 'label' must be strings")
        index = _require(nd, "index", ctx)
        if isinstance(index, bool) or not isinstance(index, int) or index < 0:
            raise MapFormatError(f"{ctx}: 'index' must be a non-negative integer")
        x = _number(nd, "x", ctx)
        y = _number(nd, "y", ctx)
        if nid in nodes:
            raise MapFormatError(f"{ctx}: duplicate node id {nid!r}")
        nodes[nid] = PoINode(nid, label, (x, y), index)

    edges_doc = _require(doc, "edges", "map")
    if not isinstance(edges_doc, list):
        raise MapFormatError("map: 'edges' must be a list")
    edges = []
    for k, ed in enumerate(edges_doc):
        ctx = f"edges[{k}]"
        if not isinstance(ed, dict):
            raise MapFormatError(f"{ctx}: must be an object")
        from_id = _require(ed, "from", ctx)
        to_id = _require(ed, "to", ctx)
        weight = _number(ed, "weight", ctx)
        points = _point_list(_require(ed, "segment", ctx), f"{ctx}.segment")
        try:
            segment = Polyline(points)
        except ValueError as exc:
            raise MapFormatError(f"{ctx}.segment: {exc}") from None
        edges.append(PoIEdge(from_id, to_id, segment, weight))

    graph = PoIGraph(nodes, edges)
    graph.validate()
    return graph, road
