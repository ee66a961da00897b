"""Built-in desk-scale office fixtures: three maps with matching environments.

Each fixture is returned as plain documents (the map and environment JSON
schemas), so the same data drives unit tests, the command line, and the
demo scripts. Routes are 15-30 m of walled hallway: a straight corridor,
an L-shaped corridor, and a multi-junction office floor where the
planner must choose between a direct chain and a longer detour.
"""

from __future__ import annotations

import numpy as np

from .blind_road import VirtualBlindRoad, build_graph, merge_graphs, save_map, tag_poi

RESOLUTION = 0.05
CORRIDOR_HALFWIDTH = 1.2
# Hallways open this far past turns and terminals. Must exceed the
# ultrasonic veto distance (2.0 m), or the range gate pins the walker
# short of a corner or destination it still has to walk up to.
CORRIDOR_OVERHANG = 2.2

FIXTURE_NAMES = ("straight", "lshape", "office")

# start / goal labels walked in the experiments
ROUTES = {
    "straight": ("Entrance", "Room101"),
    "lshape": ("Dock", "Lab"),
    "office": ("J", "Room3311"),
}


def _leg(a, b, step=0.5):
    """Points from a to b every ``step`` m, excluding a, including b."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    length = float(np.linalg.norm(b - a))
    n = max(1, round(length / step))
    return [tuple(a + (b - a) * (k / n)) for k in range(1, n + 1)]


def _record(waypoints, step=0.5) -> VirtualBlindRoad:
    pts = [tuple(map(float, waypoints[0]))]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        pts.extend(_leg(a, b, step))
    return VirtualBlindRoad.from_points(pts)


def _tag_all(road, labeled_positions):
    nodes = []
    for label, pos in labeled_positions:
        nodes.append(tag_poi(road, pos, label, nodes))
    return nodes


def _corridor(a, b, ext_a, ext_b, width_m, height_m):
    """Free rectangle around an axis-aligned leg from ``a`` to ``b``.

    ``ext_a``/``ext_b`` extend the corridor past each endpoint: the full
    overhang where the route turns or terminates there, a plain end cap
    otherwise.
    """
    (ax, ay), (bx, by) = a, b
    hw = CORRIDOR_HALFWIDTH
    if ax == bx:  # vertical leg
        lo, hi = (ay, by) if ay < by else (by, ay)
        e_lo, e_hi = (ext_a, ext_b) if ay < by else (ext_b, ext_a)
        x0, x1, y0, y1 = ax - hw, ax + hw, lo - e_lo, hi + e_hi
    else:
        lo, hi = (ax, bx) if ax < bx else (bx, ax)
        e_lo, e_hi = (ext_a, ext_b) if ax < bx else (ext_b, ext_a)
        x0, x1, y0, y1 = lo - e_lo, hi + e_hi, ay - hw, ay + hw
    margin = 0.2
    return (
        max(x0, margin),
        max(y0, margin),
        min(x1, width_m - margin),
        min(y1, height_m - margin),
    )


def _wall_rects(width_m, height_m, corridors):
    """Decompose everything outside the corridor rectangles into wall rects."""
    xs = sorted({0.0, width_m} | {c[0] for c in corridors} | {c[2] for c in corridors})
    ys = sorted({0.0, height_m} | {c[1] for c in corridors} | {c[3] for c in corridors})
    walls = []
    for y0, y1 in zip(ys[:-1], ys[1:]):
        cy = 0.5 * (y0 + y1)
        run_start = None
        for x0, x1 in zip(xs[:-1], xs[1:]):
            cx = 0.5 * (x0 + x1)
            free = any(c[0] <= cx <= c[2] and c[1] <= cy <= c[3] for c in corridors)
            if not free and run_start is None:
                run_start = x0
            elif free and run_start is not None:
                walls.append({"type": "rect", "x": run_start, "y": y0,
                              "w": x0 - run_start, "h": y1 - y0})
                run_start = None
        if run_start is not None:
            walls.append({"type": "rect", "x": run_start, "y": y0,
                          "w": width_m - run_start, "h": y1 - y0})
    return walls


def _env(width_m, height_m, legs, obstacles):
    corridors = [
        _corridor(a, b, ext_a, ext_b, width_m, height_m)
        for a, b, ext_a, ext_b in legs
    ]
    return {
        "resolution": RESOLUTION,
        "width": round(width_m / RESOLUTION),
        "height": round(height_m / RESOLUTION),
        "origin": [0.0, 0.0],
        "obstacles": _wall_rects(width_m, height_m, corridors) + obstacles,
    }


def _side_box(x, y, along="x", side=1, depth=0.7, width=0.4):
    """Crate-sized obstacle whose near edge sits on the route line.

    It blocks walking straight through while leaving the other half of
    the hallway open, so the follower has to thread a detour around it.
    ``along`` is the route direction at (x, y); ``side`` picks which half
    of the hallway it fills.
    """
    if along == "x":
        y0 = y if side > 0 else y - depth
        return {"type": "rect", "x": x - width / 2, "y": y0, "w": width, "h": depth}
    x0 = x if side > 0 else x - depth
    return {"type": "rect", "x": x0, "y": y - width / 2, "w": depth, "h": width}


def _pacer(a, b):
    """Person-sized obstacle pacing between two points beside the route."""
    return {"type": "circle", "r": 0.25,
            "waypoints": [list(a), list(b)], "speed": 0.3}


# Each leg: (start, end, extension past start, extension past end). The
# overhang goes where the route turns or terminates; plain caps elsewhere.
_CAP = CORRIDOR_HALFWIDTH
_OVER = CORRIDOR_OVERHANG
_STRAIGHT_LEGS = [((2.0, 5.0), (22.0, 5.0), _CAP, _OVER)]
_LSHAPE_LEGS = [
    ((2.0, 2.0), (14.0, 2.0), _CAP, _OVER),
    ((14.0, 2.0), (14.0, 14.0), _CAP, _OVER),
]
_OFFICE_LEGS = [
    ((2.0, 3.0), (14.0, 3.0), _CAP, _OVER),    # main corridor: bar, J, I, K
    ((14.0, 3.0), (14.0, 9.0), _CAP, _OVER),   # riser: K up to H
    ((14.0, 9.0), (20.0, 9.0), _CAP, _OVER),   # top corridor: H to the room
    ((6.0, 3.0), (6.0, 13.0), _CAP, _CAP),     # detour riser: J up to L
    ((6.0, 13.0), (20.0, 13.0), _CAP, _CAP),   # detour corridor: L to M
    ((20.0, 13.0), (20.0, 9.0), _CAP, _CAP),   # detour drop: M down to the room
]


def _straight_map():
    road = _record([(2.0, 5.0), (22.0, 5.0)])
    nodes = _tag_all(
        road,
        [("Entrance", (2.0, 5.0)), ("Hall", (12.0, 5.0)), ("Room101", (22.0, 5.0))],
    )
    return save_map(build_graph(road, nodes), road)


def _straight_env(obstacles: bool):
    extra = []
    if obstacles:
        extra = [
            _side_box(8.0, 5.0, "x", -1),
            _side_box(14.0, 5.0, "x", +1),
            _pacer((16.0, 5.55), (19.0, 5.55)),
        ]
    return _env(24.0, 10.0, _STRAIGHT_LEGS, extra)


def _lshape_map():
    road = _record([(2.0, 2.0), (14.0, 2.0), (14.0, 14.0)])
    nodes = _tag_all(
        road,
        [("Dock", (2.0, 2.0)), ("Junction", (14.0, 2.0)), ("Lab", (14.0, 14.0))],
    )
    return save_map(build_graph(road, nodes), road)


def _lshape_env(obstacles: bool):
    extra = []
    if obstacles:
        extra = [
            _side_box(7.0, 2.0, "x", -1),
            _side_box(14.0, 8.0, "y", +1),
            _pacer((14.55, 10.0), (14.55, 13.0)),
        ]
    return _env(18.0, 18.0, _LSHAPE_LEGS, extra)


def _office_map():
    # Main walk: bar, then the corridor J-I-K, up to H, and east to the room.
    walk1 = _record([(2.0, 3.0), (14.0, 3.0), (14.0, 9.0), (20.0, 9.0)])
    nodes1 = _tag_all(
        walk1,
        [
            ("bar", (2.0, 3.0)),
            ("J", (6.0, 3.0)),
            ("I", (10.0, 3.0)),
            ("K", (14.0, 3.0)),
            ("H", (14.0, 9.0)),
            ("Room3311", (20.0, 9.0)),
        ],
    )
    g1 = build_graph(walk1, nodes1)
    # Second walk: a longer loop from J up and across, rejoining at the room.
    walk2 = _record([(6.0, 3.0), (6.0, 13.0), (20.0, 13.0), (20.0, 9.0)])
    nodes2 = _tag_all(
        walk2,
        [
            ("J", (6.0, 3.0)),
            ("L", (6.0, 13.0)),
            ("M", (20.0, 13.0)),
            ("Room3311", (20.0, 9.0)),
        ],
    )
    g2 = build_graph(walk2, nodes2)
    merged = merge_graphs([g1, g2])
    return save_map(merged, walk1)


def _office_env(obstacles: bool):
    extra = []
    if obstacles:
        extra = [
            _side_box(8.0, 3.0, "x", -1),
            _side_box(14.0, 5.5, "y", +1),
            _side_box(17.0, 9.0, "x", -1),
            _pacer((10.5, 3.55), (13.0, 3.55)),
        ]
    return _env(26.0, 16.0, _OFFICE_LEGS, extra)


_MAPS = {"straight": _straight_map, "lshape": _lshape_map, "office": _office_map}
_ENVS = {"straight": _straight_env, "lshape": _lshape_env, "office": _office_env}


def map_doc(name: str) -> dict:
    """Map document for a named fixture."""
    return _MAPS[name]()


def env_doc(name: str, obstacles: bool = False) -> dict:
    """Environment document for a named fixture, optionally with obstacles."""
    return _ENVS[name](obstacles)
