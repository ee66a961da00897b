#!/usr/bin/env python3
"""Record a walking trail, tag places on it, and build the place graph.

Shows the offline mapping workflow: a sighted walk becomes a sparse
trail, labeled places snap onto it, trail-consecutive places become
weighted edges, and a second walk merges in on shared labels to form a
branching map.
"""

import numpy as np

from vroad import VirtualBlindRoad, build_graph, merge_graphs, save_map, tag_poi


def main():
    # A walk along a hallway with a turn: points arrive densely (say per
    # video frame); the recorder keeps only points 0.1 m apart.
    road = VirtualBlindRoad(min_spacing=0.1)
    kept = 0
    for t in np.linspace(0.0, 1.0, 2000):
        if t < 0.6:
            p = (12.0 * (t / 0.6), 0.0)
        else:
            p = (12.0, 8.0 * ((t - 0.6) / 0.4))
        kept += road.record_point(p)
    print(f"recorded {kept} trail points from 2000 raw samples")
    print(f"trail length: {road.trail.length:.2f} m")

    nodes = []
    for label, position in [
        ("entrance", (0.0, 0.0)),
        ("junction", (12.0, 0.0)),
        ("lab", (12.0, 8.0)),
    ]:
        node = tag_poi(road, position, label, nodes)
        nodes.append(node)
        print(f"tagged {label!r} at trail vertex {node.trail_index}")

    graph = build_graph(road, nodes)
    for edge in graph.edges:
        a = graph.nodes[edge.from_id].label
        b = graph.nodes[edge.to_id].label
        print(f"edge {a} -- {b}: {edge.weight:.2f} m over {len(edge.segment)} vertices")

    # A second walk that shares the junction label merges into a branch.
    spur = VirtualBlindRoad.from_points([(12.0, 0.0), (16.0, 0.0), (20.0, 0.0)])
    spur_nodes = [tag_poi(spur, (12.0, 0.0), "junction")]
    spur_nodes.append(tag_poi(spur, (20.0, 0.0), "storage", spur_nodes))
    merged = merge_graphs([graph, build_graph(spur, spur_nodes)])
    print(f"\nmerged map: {len(merged.nodes)} places, {len(merged.edges)} edges")

    doc = save_map(merged, road)
    print(f"map document keys: {sorted(doc)}; "
          f"{len(doc['road']['points'])} stored trail points")


if __name__ == "__main__":
    main()
