import math
import random

import numpy as np
import pytest

from vroad import (
    Cue,
    FollowerConfig,
    Polyline,
    Pose,
    SubGoalKind,
    SubGoalState,
    angular_diff,
    closest_point,
    fuse_ultrasonic,
    guidance_step,
    optimal_direction,
    render_cue,
    select_sub_goal,
)

CFG = FollowerConfig()


def straight_path(length=10.0, step=0.5):
    return Polyline([(x, 0.0) for x in np.arange(0.0, length + step / 2, step)])


def eq4_cost_oracle(theta_exp, heading, theta):
    """Independent wrap of |theta_exp - heading - theta| onto [0, pi]."""
    raw = abs(theta_exp - heading - theta) % (2 * math.pi)
    return min(raw, 2 * math.pi - raw)


class TestClosestPoint:
    def test_on_vertex(self):
        path = straight_path()
        idx, point, dev = closest_point(path, (3.0, 0.0))
        assert idx == 6 and dev == 0.0
        assert np.allclose(point, (3.0, 0.0))

    def test_off_path_point(self):
        path = Polyline([(0, 0), (1, 0), (2, 0)])
        idx, point, dev = closest_point(path, (1.2, 0.5))
        assert idx == 1
        assert dev == pytest.approx(math.sqrt(0.04 + 0.25))

    def test_tie_takes_smaller_index(self):
        path = straight_path(10.0, 1.0)
        idx, _, _ = closest_point(path, (3.5, 0.7))  # midway between 3 and 4
        assert idx == 3


class TestSelectSubGoal:
    def test_spaced_on_straight_path(self):
        state = select_sub_goal(straight_path(), 0, None, CFG)
        assert state.kind is SubGoalKind.SPACED
        assert state.path_index == 6  # arc of exactly 3.0 m at 0.5 m spacing
        assert state.sub_goal == (3.0, 0.0)
        assert not state.locked

    def test_turning_point_before_spacing(self):
        # corner 1.5 m ahead, well inside the 3 m spacing horizon
        pts = [(0, 0), (0.5, 0), (1.0, 0), (1.5, 0), (1.5, 0.5), (1.5, 1.0), (1.5, 6.0)]
        path = Polyline(pts)
        state = select_sub_goal(path, 0, None, CFG)
        assert state.kind is SubGoalKind.TURNING
        assert state.locked
        assert state.sub_goal == (1.5, 0.0)

    def test_destination_when_path_runs_out(self):
        path = Polyline([(0, 0), (0.6, 0), (1.2, 0)])
        state = select_sub_goal(path, 0, None, CFG)
        assert state.kind is SubGoalKind.DESTINATION
        assert state.sub_goal == (1.2, 0.0)

    def test_locked_turning_goal_is_sticky(self):
        pts = [(0, 0), (0.5, 0), (1.0, 0), (1.5, 0), (1.5, 0.5), (1.5, 1.0), (1.5, 6.0)]
        path = Polyline(pts)
        first = select_sub_goal(path, 0, None, CFG)
        assert first.locked
        again = select_sub_goal(path, 1, first, CFG)
        assert again is first  # bitwise-identical sub-goal while not reached

    def test_lock_releases_when_closest_point_reaches_it(self):
        pts = [(0, 0), (0.5, 0), (1.0, 0), (1.5, 0), (1.5, 0.5), (1.5, 1.0), (1.5, 6.0)]
        path = Polyline(pts)
        locked = select_sub_goal(path, 0, None, CFG)
        after = select_sub_goal(path, 3, locked, CFG)  # cls is the corner itself
        assert after.path_index > locked.path_index

    def test_progress_is_monotone(self):
        path = straight_path(20.0, 0.25)
        state = None
        last_index = -1
        for cls in range(len(path)):
            state = select_sub_goal(path, cls, state, CFG)
            assert state.path_index >= cls
            assert state.path_index >= last_index
            last_index = state.path_index

    def test_locked_requires_turning(self):
        with pytest.raises(ValueError):
            SubGoalState((0.0, 0.0), SubGoalKind.SPACED, True, 3)


class TestOptimalDirection:
    def test_empty_candidates_give_none(self):
        pose = Pose(0, 0, 0.0)
        assert optimal_direction([], 0.0, pose, 0.0, CFG) is None

    def test_on_path_takes_straightest(self):
        pose = Pose(0, 0, 0.0)
        got = optimal_direction([-0.3, 0.0, 0.4], 0.1, pose, 0.2, CFG)
        assert got == 0.0

    def test_correction_minimizes_bearing_cost(self):
        pose = Pose(0, 0, 0.0)
        # deviation above threshold; expected bearing 0.5 left of heading
        got = optimal_direction([0.2, 0.6], 0.5, pose, 1.5, CFG)
        assert got == 0.6  # cost 0.1 beats 0.3

    def test_result_is_a_member(self):
        rng = random.Random(9)
        pose = Pose(0, 0, 1.0)
        for _ in range(300):
            cands = [rng.uniform(-0.6, 0.6) for _ in range(rng.randrange(1, 8))]
            got = optimal_direction(cands, rng.uniform(0, 2 * math.pi), pose, rng.uniform(0, 2), CFG)
            assert got in cands

    def test_heading_threshold_triggers_correction(self):
        pose = Pose(0, 0, 0.0)
        # deviation small but bearing error exactly pi/6: correction mode
        got = optimal_direction([0.0, 0.5], math.pi / 6, pose, 0.1, CFG)
        assert got == 0.5

    def test_tie_prefers_smaller_magnitude_then_left(self):
        pose = Pose(0, 0, 0.0)
        # on-path: |0.2| ties with |-0.2| -> positive (left) wins
        assert optimal_direction([-0.2, 0.2], 0.0, pose, 0.0, CFG) == 0.2

    def test_matches_exhaustive_cost_search(self):
        rng = random.Random(10)
        for _ in range(2000):
            heading = rng.uniform(0, 2 * math.pi)
            pose = Pose(0, 0, heading)
            theta_exp = rng.uniform(0, 2 * math.pi)
            deviation = rng.uniform(0, 2.5)
            cands = [rng.uniform(-0.55, 0.55) for _ in range(rng.randrange(1, 9))]
            got = optimal_direction(cands, theta_exp, pose, deviation, CFG)
            err = abs(angular_diff(theta_exp, heading))
            if deviation > CFG.deviation_threshold or err >= CFG.heading_threshold:
                cost = lambda t: eq4_cost_oracle(theta_exp, heading, t)
            else:
                cost = abs
            best = min(cands, key=lambda t: (cost(t), abs(t), t < 0))
            assert got == best


class TestFuseUltrasonic:
    def test_none_passes_through(self):
        assert fuse_ultrasonic(None, 0.5, CFG) is None

    def test_outside_cone_ignores_reading(self):
        wide = math.radians(30.0)
        assert fuse_ultrasonic(wide, 0.5, CFG) == wide

    def test_inside_cone_far_reading_passes(self):
        assert fuse_ultrasonic(0.0, 3.0, CFG) == 0.0

    def test_inside_cone_close_reading_blocks(self):
        assert fuse_ultrasonic(0.0, 1.0, CFG) is None

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_exact_cone_edge_counts_as_inside(self, sign):
        edge = sign * math.radians(CFG.ultra_fov_half_deg)
        assert fuse_ultrasonic(edge, 1.0, CFG) is None
        assert fuse_ultrasonic(edge, 2.5, CFG) == edge

    def test_reading_exactly_at_threshold_blocks(self):
        assert fuse_ultrasonic(0.0, CFG.ultra_obstacle_threshold, CFG) is None

    def test_just_outside_cone_passes(self):
        out = math.radians(CFG.ultra_fov_half_deg) + 1e-9
        assert fuse_ultrasonic(out, 0.5, CFG) == out


class TestRenderCue:
    @pytest.mark.parametrize(
        "direction,cue",
        [
            (0.0, Cue.STRAIGHT),
            (math.radians(7.4), Cue.STRAIGHT),
            (math.radians(7.5), Cue.SLIGHT_LEFT),
            (math.radians(20.0), Cue.SLIGHT_LEFT),
            (-math.radians(20.0), Cue.SLIGHT_RIGHT),
            (math.radians(30.0), Cue.LEFT),
            (-math.radians(45.0), Cue.RIGHT),
        ],
    )
    def test_buckets(self, direction, cue):
        assert render_cue(direction, False) is cue

    def test_stop_and_arrived(self):
        assert render_cue(None, False) is Cue.STOP
        assert render_cue(None, True) is Cue.ARRIVED
        assert render_cue(0.3, True) is Cue.ARRIVED


class TestGuidanceStep:
    def test_arrival_at_path_end(self):
        path = straight_path()
        out, state = guidance_step(Pose(10.0, 0.0, 0.0), path, [0.0], 4.25, None, CFG)
        assert out.arrived and out.cue is Cue.ARRIVED
        assert out.walk_direction is None

    def test_arrival_radius_is_strict(self):
        path = straight_path()
        out, _ = guidance_step(Pose(9.01, 0.0, 0.0), path, [0.0], 4.25, None, CFG)
        assert out.arrived  # 0.99 m away
        out, _ = guidance_step(Pose(8.99, 0.0, 0.0), path, [0.0], 4.25, None, CFG)
        assert not out.arrived  # 1.01 m away

    def test_clear_straight_corridor(self):
        path = straight_path(20.0)
        cands = [math.radians(d) for d in range(-30, 31, 5)]
        out, state = guidance_step(Pose(2.0, 0.0, 0.0), path, cands, 4.25, None, CFG)
        assert out.walk_direction == 0.0
        assert out.cue is Cue.STRAIGHT
        assert not out.arrived
        assert state.kind is SubGoalKind.SPACED
        assert out.distance_to_subgoal == pytest.approx(3.0)

    def test_no_candidates_is_stop(self):
        path = straight_path(20.0)
        out, _ = guidance_step(Pose(2.0, 0.0, 0.0), path, [], 0.5, None, CFG)
        assert out.walk_direction is None
        assert out.cue is Cue.STOP

    def test_ultrasonic_blocks_straight(self):
        path = straight_path(20.0)
        out, _ = guidance_step(Pose(2.0, 0.0, 0.0), path, [0.0], 1.0, None, CFG)
        assert out.cue is Cue.STOP

    def test_deterministic(self):
        path = straight_path(20.0)
        pose = Pose(2.2, 0.3, 0.1)
        cands = [-0.2, 0.0, 0.3]
        a = guidance_step(pose, path, cands, 2.5, None, CFG)
        b = guidance_step(pose, path, cands, 2.5, None, CFG)
        assert a == b

    def test_deviation_reported(self):
        path = straight_path(20.0)
        out, _ = guidance_step(Pose(5.0, 0.4, 0.0), path, [0.0], 4.25, None, CFG)
        assert out.deviation == pytest.approx(0.4)
