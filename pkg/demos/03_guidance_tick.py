#!/usr/bin/env python3
"""Walk through single guidance ticks: sub-goals, direction choice, gating.

Feeds hand-picked situations to the per-tick guidance function and
prints what the user would be told in each.
"""

import math

from vroad import FollowerConfig, Polyline, Pose, guidance_step

CFG = FollowerConfig()
FULL_FAN = [math.radians(d) for d in range(-30, 31, 5)]


def tick(title, pose, path, candidates, ultra, state=None):
    out, state = guidance_step(pose, path, candidates, ultra, state, CFG)
    walk = "none" if out.walk_direction is None else f"{math.degrees(out.walk_direction):+.0f} deg"
    print(f"{title:<38} cue={out.cue.value:<12} walk={walk:<9} "
          f"dev={out.deviation:.2f} m  sub-goal {out.distance_to_subgoal:.2f} m away")
    return state


def main():
    path = Polyline([(x * 0.25, 0.0) for x in range(81)])  # 20 m straight

    print("-- on the path, everything clear")
    tick("aligned, clear hallway", Pose(2.0, 0.0, 0.0), path, FULL_FAN, 4.25)

    print("\n-- drifted half a metre left: still inside both thresholds")
    tick("offset 0.5 m, aligned", Pose(4.0, 0.5, 0.0), path, FULL_FAN, 4.25)

    print("\n-- drifted past the deviation threshold: corrective turn")
    tick("offset 1.2 m, aligned", Pose(6.0, 1.2, 0.0), path, FULL_FAN, 4.25)

    print("\n-- facing 45 degrees off: heading threshold trips instead")
    tick("on path, heading 45 deg", Pose(8.0, 0.0, math.radians(45)), path, FULL_FAN, 4.25)

    print("\n-- a box straight ahead: camera drops the central fan")
    sides = [t for t in FULL_FAN if abs(t) >= math.radians(15)]
    tick("central directions blocked", Pose(10.0, 0.0, 0.0), path, sides, 4.25)

    print("\n-- glass door the camera missed: the range gate vetoes straight")
    tick("clear fan, sonar reads 1.2 m", Pose(12.0, 0.0, 0.0), path, FULL_FAN, 1.2)

    print("\n-- nothing walkable at all")
    tick("no candidates", Pose(14.0, 0.0, 0.0), path, [], 0.8)

    print("\n-- a turning point locks until reached")
    bend = Polyline([(x * 0.25, 0.0) for x in range(9)] + [(2.0, 1.0), (2.0, 4.0)])
    state = tick("corner ahead locks sub-goal", Pose(0.0, 0.0, 0.0), bend, FULL_FAN, 4.25)
    state = tick("closer, sub-goal unchanged", Pose(1.0, 0.0, 0.0), bend, FULL_FAN, 4.25, state)
    tick("corner reached, sub-goal advances", Pose(2.0, 0.05, math.radians(90)), bend,
         FULL_FAN, 4.25, state)

    print("\n-- within a metre of the destination")
    tick("arrival", Pose(19.8, 0.1, 0.0), path, FULL_FAN, 4.25)


if __name__ == "__main__":
    main()
