"""Simulated senses over a 2-D occupancy grid.

Stand-ins for the real hardware: a rasterized indoor environment, a
depth-camera front end that reports obstacle-free candidate directions,
a narrow ultrasonic cone, and a noisy pose source replacing visual
localization. Everything is a pure function of (grid, pose, seed, tick),
so runs are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .route_following import Pose

ULTRA_MIN = 0.03
ULTRA_MAX = 4.25
# Relative ray angles sweeping the 15-degree ultrasonic cone.
ULTRA_CONE_DEG = (-7.5, -3.75, 0.0, 3.75, 7.5)


class EnvFormatError(ValueError):
    """An environment document is malformed."""


class OccupancyGrid:
    """Boolean occupancy raster; queries outside the bounds read occupied."""

    def __init__(self, resolution: float, width: int, height: int, origin=(0.0, 0.0)):
        if not resolution > 0:
            raise ValueError("resolution must be positive")
        if width < 1 or height < 1:
            raise ValueError("grid must be at least 1x1 cells")
        self.resolution = float(resolution)
        self.width = int(width)
        self.height = int(height)
        self.origin = (float(origin[0]), float(origin[1]))
        self.cells = np.zeros((self.height, self.width), dtype=bool)

    def copy(self) -> "OccupancyGrid":
        g = OccupancyGrid(self.resolution, self.width, self.height, self.origin)
        np.copyto(g.cells, self.cells)
        return g

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ox, oy = self.origin
        return (
            int(math.floor((x - ox) / self.resolution)),
            int(math.floor((y - oy) / self.resolution)),
        )

    def occupied_cell(self, ix: int, iy: int) -> bool:
        if ix < 0 or iy < 0 or ix >= self.width or iy >= self.height:
            return True
        return bool(self.cells[iy, ix])

    def occupied_point(self, x: float, y: float) -> bool:
        ix, iy = self.cell_of(x, y)
        return self.occupied_cell(ix, iy)

    def fill_rect(self, x: float, y: float, w: float, h: float) -> None:
        """Occupy every cell whose center lies in [x, x+w] x [y, y+h]."""
        res = self.resolution
        ox, oy = self.origin
        ix0 = max(0, math.ceil((x - ox) / res - 0.5))
        ix1 = min(self.width - 1, math.floor((x + w - ox) / res - 0.5))
        iy0 = max(0, math.ceil((y - oy) / res - 0.5))
        iy1 = min(self.height - 1, math.floor((y + h - oy) / res - 0.5))
        if ix1 >= ix0 and iy1 >= iy0:
            self.cells[iy0 : iy1 + 1, ix0 : ix1 + 1] = True

    def fill_circle(self, cx: float, cy: float, r: float) -> None:
        """Occupy every cell whose center is within ``r`` of (cx, cy)."""
        res = self.resolution
        ox, oy = self.origin
        ix0 = max(0, int(math.floor((cx - r - ox) / res)))
        ix1 = min(self.width - 1, int(math.ceil((cx + r - ox) / res)))
        iy0 = max(0, int(math.floor((cy - r - oy) / res)))
        iy1 = min(self.height - 1, int(math.ceil((cy + r - oy) / res)))
        if ix1 < ix0 or iy1 < iy0:
            return
        xs = ox + (np.arange(ix0, ix1 + 1) + 0.5) * res
        ys = oy + (np.arange(iy0, iy1 + 1) + 0.5) * res
        mask = (xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2 <= r * r
        self.cells[iy0 : iy1 + 1, ix0 : ix1 + 1] |= mask


@dataclass(frozen=True)
class DepthCameraModel:
    """Sampling model for the candidate-direction front end.

    Directions are sampled every ``angular_step`` across
    [-half_fov, +half_fov]; a direction is walkable when a corridor of
    half-width ``corridor_halfwidth`` is clear for ``clear_depth``.
    """

    half_fov: float = math.radians(30.0)
    max_depth: float = 4.0
    clear_depth: float = 1.5
    corridor_halfwidth: float = 0.35
    angular_step: float = math.radians(5.0)

    def __post_init__(self):
        for name in ("half_fov", "max_depth", "clear_depth", "corridor_halfwidth", "angular_step"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.angular_step < self.half_fov:
            raise ValueError("angular_step must be smaller than half_fov")

    @property
    def sample_angles(self) -> tuple[float, ...]:
        n = int(math.floor(self.half_fov / self.angular_step + 1e-9))
        return tuple(k * self.angular_step for k in range(-n, n + 1))


@dataclass(frozen=True)
class PoseNoiseModel:
    """Zero-mean Gaussian perturbation of the true pose, keyed by (seed, tick)."""

    position_sigma: float = 0.03
    heading_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.position_sigma < 0 or self.heading_sigma < 0:
            raise ValueError("noise sigmas must be non-negative")


def ray_cast(grid: OccupancyGrid, origin, angle: float, max_range: float) -> float:
    """Distance along a ray to the first occupied cell.

    Walks the grid cell by cell (no sampling skip), so walls one cell
    thick are never tunneled through. Returns ``max_range`` when the ray
    stays clear and 0.0 when the origin is already inside an occupied
    cell. Cells outside the grid count as occupied.
    """
    if not max_range > 0:
        raise ValueError("max_range must be positive")
    x0, y0 = float(origin[0]), float(origin[1])
    res = grid.resolution
    ox, oy = grid.origin
    ix, iy = grid.cell_of(x0, y0)
    if grid.occupied_cell(ix, iy):
        return 0.0
    dx, dy = math.cos(angle), math.sin(angle)

    if dx > 1e-15:
        step_x, t_max_x = 1, ((ox + (ix + 1) * res) - x0) / dx
        t_delta_x = res / dx
    elif dx < -1e-15:
        step_x, t_max_x = -1, ((ox + ix * res) - x0) / dx
        t_delta_x = -res / dx
    else:
        step_x, t_max_x, t_delta_x = 0, math.inf, math.inf
    if dy > 1e-15:
        step_y, t_max_y = 1, ((oy + (iy + 1) * res) - y0) / dy
        t_delta_y = res / dy
    elif dy < -1e-15:
        step_y, t_max_y = -1, ((oy + iy * res) - y0) / dy
        t_delta_y = -res / dy
    else:
        step_y, t_max_y, t_delta_y = 0, math.inf, math.inf

    while True:
        if t_max_x <= t_max_y:
            t = t_max_x
            ix += step_x
            t_max_x += t_delta_x
        else:
            t = t_max_y
            iy += step_y
            t_max_y += t_delta_y
        if t >= max_range:
            return max_range
        if grid.occupied_cell(ix, iy):
            return t


def ray_cast_batch(grid: OccupancyGrid, origins, angles, max_range: float) -> np.ndarray:
    """Cast many rays at once; equivalent to :func:`ray_cast` per ray.

    Enumerates every grid-line crossing of each ray (exact cell walk,
    vectorized), samples the midpoint of each crossed interval, and
    returns the entry distance of the first occupied cell.
    """
    if not max_range > 0:
        raise ValueError("max_range must be positive")
    origins = np.atleast_2d(np.asarray(origins, dtype=float))
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    n = len(angles)
    res = grid.resolution
    ox, oy = grid.origin
    dx = np.cos(angles)
    dy = np.sin(angles)
    k = int(math.ceil(max_range / res)) + 1
    steps = np.arange(1, k + 1) * res

    # t-values of the x- and y-gridline crossings of every ray, padded
    # with the range cap; sorting yields the visited-cell intervals.
    ts = np.full((n, 2 * k + 2), max_range)
    for col, (p0, d, o) in enumerate(((origins[:, 0], dx, ox), (origins[:, 1], dy, oy))):
        moving = np.abs(d) > 1e-15
        if moving.any():
            pm, dm = p0[moving], d[moving]
            inv = 1.0 / np.abs(dm)
            back = (pm - o) % res  # distance back to the previous gridline
            first = np.where(dm > 0, res - back, back) * inv
            cand = first[:, None] + (steps[None, :] - res) * inv[:, None]
            block = ts[:, 1 + col * k : 1 + (col + 1) * k]
            block[moving] = np.minimum(cand, max_range)
    ts[:, 0] = 0.0
    ts.sort(axis=1)
    t0, t1 = ts[:, :-1], ts[:, 1:]
    mid = 0.5 * (t0 + t1)
    ix = np.floor((origins[:, 0, None] + mid * dx[:, None] - ox) / res).astype(np.int64)
    iy = np.floor((origins[:, 1, None] + mid * dy[:, None] - oy) / res).astype(np.int64)
    inside = (ix >= 0) & (iy >= 0) & (ix < grid.width) & (iy < grid.height)
    occupied = ~inside
    occupied[inside] = grid.cells[iy[inside], ix[inside]]
    hit = occupied & ((t1 - t0) > 1e-12)
    first_hit = hit.argmax(axis=1)
    rows = np.arange(n)
    return np.where(hit[rows, first_hit], t0[rows, first_hit], max_range)


def _corridor_rays(pose: Pose, cam: DepthCameraModel):
    """Ray fan for the corridor test: center plus both corridor edges."""
    rel = cam.sample_angles
    bearings = pose.heading + np.asarray(rel)
    perp = np.column_stack([-np.sin(bearings), np.cos(bearings)])
    base = pose.position
    origins = np.concatenate(
        [
            np.broadcast_to(base, perp.shape),
            base + perp * cam.corridor_halfwidth,
            base - perp * cam.corridor_halfwidth,
        ]
    )
    return rel, origins, np.tile(bearings, 3)


def _ultra_rays(pose: Pose):
    bearings = pose.heading + np.radians(ULTRA_CONE_DEG)
    origins = np.broadcast_to(pose.position, (len(bearings), 2))
    return origins, bearings


def candidate_directions(grid: OccupancyGrid, pose: Pose, cam: DepthCameraModel) -> list[float]:
    """Obstacle-free directions relative to the current heading.

    A sampled direction qualifies when three parallel rays (center and
    both corridor edges) all stay clear for ``clear_depth``.
    """
    rel, origins, angles = _corridor_rays(pose, cam)
    dists = ray_cast_batch(grid, origins, angles, cam.clear_depth)
    clear = (dists.reshape(3, len(rel)) >= cam.clear_depth - 1e-9).all(axis=0)
    return [t for t, ok in zip(rel, clear) if ok]


def ultrasonic_reading(grid: OccupancyGrid, pose: Pose) -> float:
    """Minimum range over the ultrasonic cone, clamped to the sensor span.

    A clear cone reports the sensor maximum (nothing detected).
    """
    origins, bearings = _ultra_rays(pose)
    dists = ray_cast_batch(grid, origins, bearings, ULTRA_MAX)
    return max(float(dists.min()), ULTRA_MIN)


def sense(grid: OccupancyGrid, pose: Pose, cam: DepthCameraModel) -> tuple[list[float], float]:
    """Candidate directions and ultrasonic reading from one fused ray sweep.

    Exactly equivalent to calling :func:`candidate_directions` and
    :func:`ultrasonic_reading` separately; exists as the one per-tick
    entry point of the simulator's hot path.
    """
    return candidate_directions(grid, pose, cam), ultrasonic_reading(grid, pose)


def noisy_pose(true_pose: Pose, noise: PoseNoiseModel, tick: int) -> Pose:
    """Gaussian-perturbed pose from a stream derived from (seed, tick)."""
    if noise.position_sigma == 0.0 and noise.heading_sigma == 0.0:
        return true_pose
    rng = np.random.default_rng((int(noise.seed), int(tick), 0))
    dx, dy = rng.normal(0.0, noise.position_sigma, size=2)
    dh = rng.normal(0.0, noise.heading_sigma)
    return Pose(true_pose.x + dx, true_pose.y + dy, true_pose.heading + dh)


@dataclass(frozen=True)
class DynamicObstacle:
    """A shape whose anchor point loops along fixed waypoints at a set speed."""

    shape: dict
    waypoints: np.ndarray
    speed: float

    def position_at(self, t: float) -> np.ndarray:
        wp = self.waypoints
        if len(wp) == 1 or self.speed == 0.0:
            return wp[0]
        loop = np.vstack([wp, wp[0]])
        seg = np.linalg.norm(np.diff(loop, axis=0), axis=1)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        total = cum[-1]
        s = (self.speed * t) % total
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(seg) - 1)
        frac = (s - cum[i]) / seg[i]
        return loop[i] + frac * (loop[i + 1] - loop[i])


class Environment:
    """Static occupancy plus moving obstacles, queryable at any sim time."""

    def __init__(self, base: OccupancyGrid, dynamics: list[DynamicObstacle] | None = None):
        self.base = base
        self.dynamics = list(dynamics or [])
        self._scratch = base.copy() if self.dynamics else None

    def grid_at(self, t: float) -> OccupancyGrid:
        """Occupancy at sim time ``t``; static environments return the base."""
        if not self.dynamics:
            return self.base
        scene = self._scratch
        np.copyto(scene.cells, self.base.cells)
        for dyn in self.dynamics:
            _stamp(scene, dyn.shape, dyn.position_at(t))
        return scene

    @classmethod
    def from_doc(cls, doc: dict) -> "Environment":
        """Build from an environment document (see the map/env JSON schemas)."""
        if not isinstance(doc, dict):
            raise EnvFormatError("environment document must be a JSON object")
        for key in ("resolution", "width", "height"):
            if key not in doc:
                raise EnvFormatError(f"environment: missing {key!r}")
        try:
            resolution = float(doc["resolution"])
            width = int(doc["width"])
            height = int(doc["height"])
        except (TypeError, ValueError):
            raise EnvFormatError(
                "environment: 'resolution', 'width', 'height' must be numbers"
            ) from None
        origin = doc.get("origin", [0.0, 0.0])
        if not (isinstance(origin, list) and len(origin) == 2):
            raise EnvFormatError("environment: 'origin' must be an [x, y] pair")
        try:
            grid = OccupancyGrid(resolution, width, height, (float(origin[0]), float(origin[1])))
        except ValueError as exc:
            raise EnvFormatError(f"environment: {exc}") from None

        dynamics: list[DynamicObstacle] = []
        obstacles = doc.get("obstacles", [])
        if not isinstance(obstacles, list):
            raise EnvFormatError("environment: 'obstacles' must be a list")
        for k, ob in enumerate(obstacles):
            ctx = f"obstacles[{k}]"
            if not isinstance(ob, dict) or "type" not in ob:
                raise EnvFormatError(f"{ctx}: must be an object with a 'type'")
            shape = _parse_shape(ob, ctx)
            if "waypoints" in ob:
                try:
                    wp = np.asarray(ob["waypoints"], dtype=float).reshape(-1, 2)
                except (TypeError, ValueError):
                    raise EnvFormatError(f"{ctx}: 'waypoints' must be [x, y] pairs") from None
                if len(wp) == 0:
                    raise EnvFormatError(f"{ctx}: 'waypoints' must not be empty")
                speed = ob.get("speed", 0.0)
                if isinstance(speed, bool) or not isinstance(speed, (int, float)) or speed < 0:
                    raise EnvFormatError(f"{ctx}: 'speed' must be a non-negative number")
                dynamics.append(DynamicObstacle(shape, wp, float(speed)))
            else:
                _stamp(grid, shape, None)
        return cls(grid, dynamics)


def _parse_shape(ob: dict, ctx: str) -> dict:
    kind = ob["type"]
    if kind == "rect":
        fields = ("x", "y", "w", "h")
    elif kind == "circle":
        fields = ("x", "y", "r")
    else:
        raise EnvFormatError(f"{ctx}: unknown obstacle type {kind!r}")
    shape = {"type": kind}
    moving = "waypoints" in ob
    for f in fields:
        if f in ("x", "y") and moving:
            # Anchor comes from the waypoint loop; x/y are optional then.
            shape[f] = float(ob.get(f, 0.0))
            continue
        if f not in ob:
            raise EnvFormatError(f"{ctx}: missing {f!r}")
        v = ob[f]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise EnvFormatError(f"{ctx}: {f!r} must be a number")
        shape[f] = float(v)
    return shape


def _stamp(grid: OccupancyGrid, shape: dict, anchor) -> None:
    """Rasterize a shape; ``anchor`` recenters it (for moving obstacles)."""
    if shape["type"] == "rect":
        if anchor is None:
            grid.fill_rect(shape["x"], shape["y"], shape["w"], shape["h"])
        else:
            grid.fill_rect(
                anchor[0] - shape["w"] / 2, anchor[1] - shape["h"] / 2, shape["w"], shape["h"]
            )
    else:
        cx, cy = (shape["x"], shape["y"]) if anchor is None else (anchor[0], anchor[1])
        grid.fill_circle(cx, cy, shape["r"])
