#!/usr/bin/env python3
"""Plan the shortest route across the office fixture and expand it.

The office map has a direct chain and a longer detour loop between the
same two places; the planner must pick the chain, and the exhaustive
reference search agrees.
"""

from vroad import astar, brute_force_shortest, expand_path, load_map
from vroad.fixtures import map_doc


def main():
    graph, _ = load_map(map_doc("office"))
    start = graph.node_by_label("J")
    goal = graph.node_by_label("Room3311")

    route = astar(graph, start.id, goal.id)
    labels = [graph.nodes[n].label for n in route.node_ids]
    print("shortest route:", " -> ".join(labels))
    print(f"total cost: {route.total_cost:.2f} m")

    oracle = brute_force_shortest(graph, start.id, goal.id)
    print(f"exhaustive search agrees: {oracle.node_ids == route.node_ids}")

    path = expand_path(graph, route, path_spacing=0.25)
    print(f"dense path: {len(path)} points, {path.length:.2f} m, "
          f"from {tuple(path.points[0])} to {tuple(path.points[-1])}")

    # the losing detour, for comparison
    via = graph.node_by_label("L")
    leg1 = astar(graph, start.id, via.id)
    leg2 = astar(graph, via.id, goal.id)
    print(f"detour via L would cost {leg1.total_cost + leg2.total_cost:.2f} m")


if __name__ == "__main__":
    main()
