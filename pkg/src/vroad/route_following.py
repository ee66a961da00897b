"""Per-tick guidance along a dense path with obstacle-aware direction choice.

Every tick combines: nearest path vertex, dynamic sub-goal selection
(spaced / turning / destination), the expected bearing toward the
sub-goal, the best obstacle-free direction, and an ultrasonic gate on
near-straight commands. All functions are pure; the only state is the
explicit sub-goal value passed in and out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Polyline, angular_diff, expected_angle, normalize_global


class SubGoalKind(Enum):
    SPACED = "spaced"
    TURNING = "turning"
    DESTINATION = "destination"


class Cue(Enum):
    STRAIGHT = "straight"
    SLIGHT_LEFT = "slight_left"
    LEFT = "left"
    SLIGHT_RIGHT = "slight_right"
    RIGHT = "right"
    STOP = "stop"
    ARRIVED = "arrived"


@dataclass(frozen=True)
class Pose:
    """Planar position plus heading (the camera's optical-axis bearing)."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("pose position must be finite")
        object.__setattr__(self, "heading", normalize_global(self.heading))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class FollowerConfig:
    """Route-follower thresholds.

    subgoal_distance: arc length ahead of the closest vertex at which a
        spaced sub-goal is placed.
    turn_angle: minimum bend (chord vs. outgoing segment) that makes a
        vertex a turning point.
    arrival_radius: distance to the path's last point that counts as
        having arrived.
    deviation_threshold / heading_threshold: when either is exceeded the
        follower corrects toward the expected bearing instead of simply
        keeping straight.
    ultra_fov_half_deg: half-width of the ultrasonic cone, degrees.
    ultra_obstacle_threshold: range reading at or below which a
        near-straight command is suppressed.
    """

    subgoal_distance: float = 3.0
    turn_angle: float = math.pi / 6
    arrival_radius: float = 1.0
    deviation_threshold: float = 1.0
    heading_threshold: float = math.pi / 6
    ultra_fov_half_deg: float = 7.5
    ultra_obstacle_threshold: float = 2.0

    def __post_init__(self):
        for name in (
            "subgoal_distance",
            "turn_angle",
            "arrival_radius",
            "deviation_threshold",
            "heading_threshold",
            "ultra_fov_half_deg",
            "ultra_obstacle_threshold",
        ):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.ultra_fov_half_deg > 90.0:
            raise ValueError("ultra_fov_half_deg must be at most 90")

    @property
    def turning_reach_radius(self) -> float:
        # A locked turning point releases on a tighter radius than
        # destination arrival, so corners are not cut.
        return 0.5 * self.arrival_radius


@dataclass(frozen=True)
class SubGoalState:
    """The point on the path the user is currently steered toward."""

    sub_goal: tuple[float, float]
    kind: SubGoalKind
    locked: bool
    path_index: int

    def __post_init__(self):
        if self.locked and self.kind is not SubGoalKind.TURNING:
            raise ValueError("only turning sub-goals can be locked")


@dataclass(frozen=True)
class GuidanceOutput:
    """One tick of guidance; ``walk_direction`` is None when there is
    nowhere safe to walk (cue Stop)."""

    walk_direction: float | None
    cue: Cue
    distance_to_subgoal: float
    deviation: float
    arrived: bool


def closest_point(path: Polyline, current) -> tuple[int, np.ndarray, float]:
    """Path vertex nearest to ``current``: (index, point, distance).

    Ties resolve to the smallest index.
    """
    pts = path.points
    p = np.asarray([float(current[0]), float(current[1])])
    d2 = ((pts - p) ** 2).sum(axis=1)
    idx = int(np.argmin(d2))
    return idx, pts[idx].copy(), float(math.sqrt(d2[idx]))


def _turn_at(chord_from: np.ndarray, at: np.ndarray, nxt: np.ndarray) -> float:
    chord_bearing = math.atan2(at[1] - chord_from[1], at[0] - chord_from[0])
    out_bearing = math.atan2(nxt[1] - at[1], nxt[0] - at[0])
    return abs(angular_diff(out_bearing, chord_bearing))


def select_sub_goal(
    path: Polyline,
    cls_index: int,
    prev: SubGoalState | None,
    cfg: FollowerConfig,
) -> SubGoalState:
    """Pick the sub-goal for the current closest-vertex index.

    A locked turning sub-goal is kept until the closest vertex reaches it.
    Otherwise the path is scanned forward from ``cls_index``: the first
    vertex that bends by at least ``turn_angle`` (against the chord from
    the closest vertex) becomes a locked turning sub-goal; failing that,
    the first vertex at arc distance ``subgoal_distance`` becomes a spaced
    sub-goal; if the scan runs out of path, the last point is the
    destination sub-goal.
    """
    pts = path.points
    n = len(pts)
    if not 0 <= cls_index < n:
        raise IndexError(f"closest index {cls_index} out of range for {n} vertices")

    scan_from = cls_index
    if prev is not None and prev.locked:
        gap = float(np.linalg.norm(pts[cls_index] - np.asarray(prev.sub_goal)))
        if cls_index < prev.path_index and gap > cfg.turning_reach_radius:
            return prev
        # Turning point reached: it is behind us now, resume the scan past it.
        scan_from = max(cls_index, prev.path_index)

    cd = path.cumdist
    cls_pt = pts[cls_index]
    chosen = None
    for s in range(scan_from + 1, n):
        if s + 1 < n and _turn_at(cls_pt, pts[s], pts[s + 1]) >= cfg.turn_angle:
            chosen = SubGoalState(
                (float(pts[s, 0]), float(pts[s, 1])), SubGoalKind.TURNING, True, s
            )
            break
        if cd[s] - cd[cls_index] >= cfg.subgoal_distance:
            chosen = SubGoalState(
                (float(pts[s, 0]), float(pts[s, 1])), SubGoalKind.SPACED, False, s
            )
            break
    if chosen is None:
        last = n - 1
        chosen = SubGoalState(
            (float(pts[last, 0]), float(pts[last, 1])), SubGoalKind.DESTINATION, False, last
        )
    # Sub-goals never move backward: jitter in the closest vertex must not
    # re-engage a turning point that was already released.
    if prev is not None and chosen.path_index < prev.path_index:
        return prev
    return chosen


def optimal_direction(
    candidates,
    theta_exp: float,
    pose: Pose,
    deviation: float,
    cfg: FollowerConfig,
) -> float | None:
    """Best walkable direction among ``candidates`` (relative angles).

    Returns None when there are no candidates. When the user has deviated
    past ``deviation_threshold`` or is headed at least
    ``heading_threshold`` away from the expected bearing, the candidate
    that best aims at the expected bearing wins; otherwise the
    straightest candidate wins. Ties prefer the smaller magnitude, then
    the leftward (positive) direction.
    """
    cands = [float(t) for t in candidates]
    if not cands:
        return None
    heading_error = angular_diff(theta_exp, pose.heading)
    if deviation > cfg.deviation_threshold or abs(heading_error) >= cfg.heading_threshold:
        def cost(t: float) -> float:
            return abs(angular_diff(theta_exp, normalize_global(pose.heading + t)))
    else:
        cost = abs
    return min(cands, key=lambda t: (cost(t), abs(t), t < 0.0))


def fuse_ultrasonic(
    opt: float | None, distance: float, cfg: FollowerConfig
) -> float | None:
    """Gate a near-straight command on the ultrasonic range reading.

    Commands outside the sensor cone pass through; inside the cone the
    reading must strictly exceed ``ultra_obstacle_threshold``, otherwise
    there is no walkable direction (None).
    """
    if opt is None:
        return None
    cone = math.radians(cfg.ultra_fov_half_deg)
    if abs(opt) > cone:
        return opt
    if distance > cfg.ultra_obstacle_threshold:
        return opt
    return None


_SLIGHT_EDGE = math.radians(7.5)
_TURN_EDGE = math.radians(30.0)


def render_cue(direction: float | None, arrived: bool) -> Cue:
    """Bucket a walking direction into a discrete cue."""
    if arrived:
        return Cue.ARRIVED
    if direction is None:
        return Cue.STOP
    mag = abs(direction)
    if mag < _SLIGHT_EDGE:
        return Cue.STRAIGHT
    if mag < _TURN_EDGE:
        return Cue.SLIGHT_LEFT if direction > 0 else Cue.SLIGHT_RIGHT
    return Cue.LEFT if direction > 0 else Cue.RIGHT


def guidance_step(
    pose: Pose,
    path: Polyline,
    candidates,
    ultra_distance: float,
    state: SubGoalState | None,
    cfg: FollowerConfig,
) -> tuple[GuidanceOutput, SubGoalState | None]:
    """One tick of the guidance loop.

    Composes closest vertex -> sub-goal -> expected bearing -> optimal
    direction -> ultrasonic gate, or reports arrival when the path's last
    point is within ``arrival_radius``.
    """
    position = pose.position
    cls_index, _, deviation = closest_point(path, position)
    dest_gap = float(np.linalg.norm(position - path.points[-1]))
    if dest_gap < cfg.arrival_radius:
        out = GuidanceOutput(None, Cue.ARRIVED, dest_gap, deviation, True)
        return out, state

    new_state = select_sub_goal(path, cls_index, state, cfg)
    sub = np.asarray(new_state.sub_goal)
    to_sub = float(np.linalg.norm(position - sub))
    if to_sub > 1e-12:
        theta_exp = expected_angle(position, sub)
    else:
        theta_exp = pose.heading  # standing on the sub-goal: keep heading
    opt = optimal_direction(candidates, theta_exp, pose, deviation, cfg)
    walk = fuse_ultrasonic(opt, ultra_distance, cfg)
    out = GuidanceOutput(walk, render_cue(walk, False), to_sub, deviation, False)
    return out, new_state
