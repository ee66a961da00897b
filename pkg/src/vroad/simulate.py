"""Closed-loop walker simulation, trajectory records, and deviation metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .blind_road import PoIGraph
from .config import SimulationConfig, WalkerModel
from .geometry import Polyline, expected_angle, normalize_global
from .route_following import GuidanceOutput, Pose, closest_point, guidance_step
from .sensors import Environment, noisy_pose, sense
from .wayfinding import astar, expand_path

TRAJECTORY_HEADER = "tick,x,y,theta,cue,walk_dir,deviation"
TRACE_HEADER = (
    "tick,cls_index,subgoal_x,subgoal_y,subgoal_kind,theta_exp,"
    "candidates,theta_opt,d_ultra,theta_walk"
)


class Outcome(Enum):
    ARRIVED = "arrived"
    TIMEOUT = "timeout"
    COLLISION = "collision"


@dataclass(frozen=True)
class StepSample:
    tick: int
    pose: Pose
    guidance: GuidanceOutput


@dataclass
class TrajectoryRecord:
    """True poses and guidance per tick, plus how the run ended."""

    samples: list[StepSample]
    outcome: Outcome
    path: Polyline
    trace: list[str] | None = None


@dataclass(frozen=True)
class DeviationStats:
    max_dev: float
    avg_dev: float
    variance: float


@dataclass(frozen=True)
class WalkerState:
    """Walker pose plus the part of the last cued turn not yet executed.

    A person keeps turning through an instructed turn instead of
    re-evaluating it every tenth of a second; the pending amount is the
    one piece of memory that models this.
    """

    pose: Pose
    pending_turn: float = 0.0


def walker_step(
    state: WalkerState,
    guidance: GuidanceOutput,
    model: WalkerModel,
    tick: int,
    seed: int = 0,
    scan_sign: float | None = None,
) -> WalkerState:
    """Advance the simulated user by one tick.

    Arrived leaves the state unchanged. Stop sweeps in place, alternating
    direction every few seconds so the scan eventually covers the whole
    circle (walkable space can be anywhere, including behind). A fresh
    turn command replaces the pending turn; a straight command lets the
    walker finish the turn already underway. While the remaining turn
    exceeds what one tick can rotate, the user pivots without striding
    (turn first, then walk); once within reach they complete it and step
    forward, with compliance noise on the direction actually walked.
    """
    if guidance.arrived:
        return state
    pose = state.pose
    if guidance.walk_direction is None:
        if scan_sign is None:
            scan_sign = 1.0 if (tick // 50) % 2 == 0 else -1.0
        heading = normalize_global(pose.heading + scan_sign * model.scan_rate * model.dt)
        return WalkerState(Pose(pose.x, pose.y, heading), 0.0)
    pending = state.pending_turn
    if guidance.walk_direction != 0.0:
        pending = guidance.walk_direction
    limit = model.max_turn_rate * model.dt
    turn = max(-limit, min(limit, pending))
    heading = normalize_global(pose.heading + turn)
    pending -= turn
    if abs(pending) > limit:
        # Still pivoting toward the cued direction.
        return WalkerState(Pose(pose.x, pose.y, heading), pending)
    executed = heading
    if model.compliance_noise > 0.0:
        rng = np.random.default_rng((int(seed), int(tick), 1))
        executed = normalize_global(heading + rng.normal(0.0, model.compliance_noise))
    step = model.speed * model.dt
    return WalkerState(
        Pose(
            pose.x + step * math.cos(executed),
            pose.y + step * math.sin(executed),
            heading,
        ),
        pending,
    )


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def run_scenario(
    env: Environment,
    graph: PoIGraph,
    start_label: str,
    goal_label: str,
    cfg: SimulationConfig,
    seed: int,
    trace: bool = False,
) -> TrajectoryRecord:
    """Plan a route between two labels and walk it tick by tick.

    The loop senses (noisy pose, candidate directions, ultrasonic),
    computes guidance, and advances the walker until arrival, collision
    of the true position with an occupied cell, or timeout. Dynamic
    obstacles move with simulation time. Fully deterministic per seed.
    """
    start = graph.node_by_label(start_label)
    goal = graph.node_by_label(goal_label)
    route = astar(graph, start.id, goal.id)
    path = expand_path(graph, route, cfg.path_spacing)
    pts = path.points

    heading = expected_angle(pts[0], pts[1]) if len(pts) > 1 else 0.0
    walker = WalkerState(Pose(pts[0, 0], pts[0, 1], heading))
    noise = replace(cfg.noise, seed=int(seed))
    max_ticks = max(1, int(round(cfg.timeout / cfg.walker.dt)))

    samples: list[StepSample] = []
    trace_rows: list[str] | None = [] if trace else None
    state = None
    outcome = Outcome.TIMEOUT
    for tick in range(max_ticks):
        now = tick * cfg.walker.dt
        grid = env.grid_at(now)
        pose = walker.pose
        if grid.occupied_point(pose.x, pose.y):
            outcome = Outcome.COLLISION
            break
        sensed = noisy_pose(pose, noise, tick)
        cands, ultra = sense(grid, sensed, cfg.camera)
        guidance, state = guidance_step(sensed, path, cands, ultra, state, cfg.follower)
        samples.append(StepSample(tick, pose, guidance))
        if trace_rows is not None:
            trace_rows.append(_trace_row(tick, sensed, path, cands, ultra, state, guidance, cfg))
        if guidance.arrived:
            outcome = Outcome.ARRIVED
            break
        walker = walker_step(walker, guidance, cfg.walker, tick, seed)
    return TrajectoryRecord(samples, outcome, path, trace_rows)


def _trace_row(tick, sensed, path, cands, ultra, state, guidance, cfg) -> str:
    from .route_following import optimal_direction

    cls_index, _, deviation = closest_point(path, sensed.position)
    sub = np.asarray(state.sub_goal)
    gap = float(np.linalg.norm(sensed.position - sub))
    theta_exp = expected_angle(sensed.position, sub) if gap > 1e-12 else sensed.heading
    opt = optimal_direction(cands, theta_exp, sensed, deviation, cfg.follower)
    return ",".join(
        [
            str(tick),
            str(cls_index),
            _fmt(sub[0]),
            _fmt(sub[1]),
            state.kind.value,
            _fmt(theta_exp),
            "|".join(_fmt(c) for c in cands),
            _fmt(opt) if opt is not None else "",
            _fmt(ultra),
            _fmt(guidance.walk_direction) if guidance.walk_direction is not None else "",
        ]
    )


def path_deviations(path: Polyline, positions) -> np.ndarray:
    """Distance from each position to the nearest point on the path.

    Projects onto path segments (not just vertices), which is the fair
    metric for evaluating a walked trajectory.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    pts = path.points
    if len(pts) == 1:
        return np.linalg.norm(positions - pts[0], axis=1)
    a = pts[:-1]
    v = pts[1:] - a
    vv = (v**2).sum(axis=1)
    w = positions[:, None, :] - a[None, :, :]
    t = np.clip((w * v).sum(axis=2) / vv, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * v[None, :, :]
    d = np.linalg.norm(positions[:, None, :] - closest, axis=2)
    return d.min(axis=1)


def deviation_stats(record: TrajectoryRecord, path: Polyline) -> DeviationStats:
    """Max, mean, and population variance of per-sample path deviation."""
    if not record.samples:
        raise ValueError("trajectory has no samples")
    positions = np.array([[s.pose.x, s.pose.y] for s in record.samples])
    d = path_deviations(path, positions)
    return DeviationStats(float(d.max()), float(d.mean()), float(np.var(d)))


def write_trajectory_csv(record: TrajectoryRecord, fp) -> None:
    """Write the per-tick trajectory in the fixed CSV schema."""
    fp.write(TRAJECTORY_HEADER + "\n")
    for s in record.samples:
        walk = _fmt(s.guidance.walk_direction) if s.guidance.walk_direction is not None else ""
        fp.write(
            f"{s.tick},{_fmt(s.pose.x)},{_fmt(s.pose.y)},{_fmt(s.pose.heading)},"
            f"{s.guidance.cue.value},{walk},{_fmt(s.guidance.deviation)}\n"
        )


def read_trajectory_positions(fp) -> np.ndarray:
    """Read back the (x, y) columns of a trajectory CSV."""
    header = fp.readline().strip()
    if header != TRAJECTORY_HEADER:
        raise ValueError(f"unexpected trajectory header {header!r}")
    rows = []
    for line_no, line in enumerate(fp, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise ValueError(f"line {line_no}: expected 7 columns")
        try:
            rows.append((float(parts[1]), float(parts[2])))
        except ValueError:
            raise ValueError(f"line {line_no}: x/y must be numbers") from None
    if not rows:
        raise ValueError("trajectory has no samples")
    return np.asarray(rows)
