"""Command line: build maps from recordings, plan routes, simulate, score.

Exit codes: 0 success, 1 usage error, 2 planning error (unknown label or
no route), 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .blind_road import (
    MapFormatError,
    UnknownNodeError,
    VirtualBlindRoad,
    build_graph,
    load_map,
    save_map,
    tag_poi,
)
from .config import ConfigError, load_config
from .geometry import Polyline
from .sensors import EnvFormatError, Environment
from .simulate import (
    TRACE_HEADER,
    path_deviations,
    read_trajectory_positions,
    run_scenario,
    write_trajectory_csv,
)
from .wayfinding import NoPathError, astar, expand_path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PLAN = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_json(path: str):
    with open(path, "r", encoding="utf-8") as fp:
        return json.load(fp)


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(doc, fp)
        fp.write("\n")


def _cmd_build_road(args) -> int:
    traj = _read_json(args.trajectory)
    if not isinstance(traj, dict) or "points" not in traj:
        raise MapFormatError("trajectory: missing 'points'")
    spacing = args.spacing if args.spacing is not None else traj.get("spacing", 0.1)
    road = VirtualBlindRoad(float(spacing))
    for p in traj["points"]:
        road.record_point(p)
    tags = _read_json(args.tags)
    if not isinstance(tags, list):
        raise MapFormatError("tags: must be a list of {label, x, y} objects")
    nodes = []
    for k, tag in enumerate(tags):
        if not isinstance(tag, dict) or not {"label", "x", "y"} <= set(tag):
            raise MapFormatError(f"tags[{k}]: must have 'label', 'x', 'y'")
        nodes.append(
            tag_poi(road, (tag["x"], tag["y"]), tag["label"], nodes, args.snap_radius)
        )
    graph = build_graph(road, nodes)
    _write_json(args.output, save_map(graph, road))
    print(f"map: {len(graph.nodes)} nodes, {len(graph.edges)} edges -> {args.output}")
    return EXIT_OK


def _cmd_plan(args) -> int:
    graph, _ = load_map(_read_json(args.map))
    start = graph.node_by_label(getattr(args, "from"))
    goal = graph.node_by_label(args.to)
    route = astar(graph, start.id, goal.id)
    labels = [graph.nodes[nid].label for nid in route.node_ids]
    print("route: " + ",".join(labels))
    print(f"cost_m: {route.total_cost:.6f}")
    if args.output:
        path = expand_path(graph, route, args.spacing)
        _write_json(args.output, {"points": [[x, y] for x, y in path.points]})
    return EXIT_OK


def _resolve_seed(args) -> int:
    raw = os.environ.get("VROAD_SEED")
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            print(f"vroad simulate: error: VROAD_SEED must be an integer, got {raw!r}",
                  file=sys.stderr)
            raise SystemExit(EXIT_USAGE) from None
    return args.seed


def _cmd_simulate(args) -> int:
    graph, _ = load_map(_read_json(args.map))
    env = Environment.from_doc(_read_json(args.env))
    cfg = load_config(_read_json(args.config) if args.config else None)
    seed = _resolve_seed(args)
    record = run_scenario(
        env, graph, getattr(args, "from"), args.to, cfg, seed, trace=args.trace
    )
    with open(args.output, "w", encoding="utf-8", newline="\n") as fp:
        write_trajectory_csv(record, fp)
    if args.trace:
        print(TRACE_HEADER)
        for row in record.trace:
            print(row)
    print(f"outcome: {record.outcome.value} ({len(record.samples)} ticks) -> {args.output}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    with open(args.trajectory, "r", encoding="utf-8") as fp:
        positions = read_trajectory_positions(fp)
    path_doc = _read_json(args.path)
    if not isinstance(path_doc, dict) or "points" not in path_doc:
        raise MapFormatError("path: missing 'points'")
    path = Polyline(path_doc["points"])
    d = path_deviations(path, positions)
    print("max_dev_m avg_dev_m variance_m2")
    print(f"{d.max():.6f} {d.mean():.6f} {np.var(d):.6f}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vroad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-road", help="build a map from a recorded trajectory")
    p.add_argument("trajectory", help="trajectory JSON with a 'points' list")
    p.add_argument("--tags", required=True, help="JSON list of {label, x, y}")
    p.add_argument("--spacing", type=float, default=None,
                   help="min recording spacing in m (default 0.1)")
    p.add_argument("--snap-radius", type=float, default=0.5)
    p.add_argument("-o", "--output", required=True, help="map JSON to write")
    p.set_defaults(func=_cmd_build_road)

    p = sub.add_parser("plan", help="shortest route between two labels")
    p.add_argument("map", help="map JSON")
    p.add_argument("--from", required=True, help="start label")
    p.add_argument("--to", required=True, help="goal label")
    p.add_argument("--spacing", type=float, default=0.25,
                   help="path resampling spacing in m")
    p.add_argument("-o", "--output", default=None, help="path JSON to write")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="closed-loop walk along a planned route")
    p.add_argument("map", help="map JSON")
    p.add_argument("env", help="environment JSON")
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--seed", type=int, default=0,
                   help="run seed (VROAD_SEED overrides)")
    p.add_argument("--config", default=None, help="config JSON bundle")
    p.add_argument("-o", "--output", required=True, help="trajectory CSV to write")
    p.add_argument("--trace", action="store_true",
                   help="print per-tick guidance internals as CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("stats", help="deviation metrics of a trajectory vs a path")
    p.add_argument("trajectory", help="trajectory CSV")
    p.add_argument("path", help="path JSON")
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UnknownNodeError, NoPathError) as exc:
        print(f"vroad: error: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except (MapFormatError, EnvFormatError, ConfigError, json.JSONDecodeError,
            OSError, ValueError) as exc:
        print(f"vroad: error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
