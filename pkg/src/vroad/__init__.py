"""Indoor navigation on recorded walking trails.

Record a trail, tag points of interest into a weighted graph, plan the
shortest route, and follow it with per-tick guidance that dodges
obstacles -- plus a deterministic 2-D simulator to evaluate the whole
loop.
"""

from .blind_road import (
    DuplicateLabelError,
    MapFormatError,
    PoIEdge,
    PoIGraph,
    PoINode,
    TooFarFromRoadError,
    UnknownNodeError,
    VirtualBlindRoad,
    build_graph,
    load_map,
    merge_graphs,
    save_map,
    tag_poi,
)
from .config import ConfigError, SimulationConfig, WalkerModel, load_config
from .geometry import (
    Polyline,
    angular_diff,
    arc_length,
    expected_angle,
    normalize_global,
    resample,
)
from .route_following import (
    Cue,
    FollowerConfig,
    GuidanceOutput,
    Pose,
    SubGoalKind,
    SubGoalState,
    closest_point,
    fuse_ultrasonic,
    guidance_step,
    optimal_direction,
    render_cue,
    select_sub_goal,
)
from .sensors import (
    DepthCameraModel,
    DynamicObstacle,
    EnvFormatError,
    Environment,
    OccupancyGrid,
    PoseNoiseModel,
    candidate_directions,
    noisy_pose,
    ray_cast,
    ray_cast_batch,
    ultrasonic_reading,
)
from .simulate import (
    DeviationStats,
    Outcome,
    StepSample,
    TrajectoryRecord,
    WalkerState,
    deviation_stats,
    path_deviations,
    run_scenario,
    walker_step,
    write_trajectory_csv,
)
from .wayfinding import NodeRoute, NoPathError, astar, brute_force_shortest, expand_path

__version__ = "0.1.0"

__all__ = [
    "Cue",
    "ConfigError",
    "DepthCameraModel",
    "DeviationStats",
    "DuplicateLabelError",
    "DynamicObstacle",
    "EnvFormatError",
    "Environment",
    "FollowerConfig",
    "GuidanceOutput",
    "MapFormatError",
    "NodeRoute",
    "NoPathError",
    "OccupancyGrid",
    "Outcome",
    "PoIEdge",
    "PoIGraph",
    "PoINode",
    "Polyline",
    "Pose",
    "PoseNoiseModel",
    "SimulationConfig",
    "StepSample",
    "SubGoalKind",
    "SubGoalState",
    "TooFarFromRoadError",
    "TrajectoryRecord",
    "UnknownNodeError",
    "VirtualBlindRoad",
    "WalkerModel",
    "WalkerState",
    "angular_diff",
    "arc_length",
    "astar",
    "brute_force_shortest",
    "build_graph",
    "candidate_directions",
    "closest_point",
    "deviation_stats",
    "expand_path",
    "expected_angle",
    "fuse_ultrasonic",
    "guidance_step",
    "load_config",
    "load_map",
    "merge_graphs",
    "noisy_pose",
    "normalize_global",
    "optimal_direction",
    "path_deviations",
    "ray_cast",
    "ray_cast_batch",
    "render_cue",
    "resample",
    "run_scenario",
    "save_map",
    "select_sub_goal",
    "tag_poi",
    "ultrasonic_reading",
    "walker_step",
    "write_trajectory_csv",
]
