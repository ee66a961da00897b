"""Planar geometry primitives: bearings, relative angles, and polylines.

Conventions used across the package: the global frame is x-east/y-north,
global bearings live in [0, 2*pi), and relative angles live in (-pi, pi]
with positive meaning counterclockwise (a turn to the left).
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi

# Consecutive polyline vertices closer than this are treated as coincident.
COINCIDENT_EPS = 1e-6

# Vertices whose turn angle is at most this are treated as collinear when
# resampling; sharper vertices are corners and are always preserved.
CORNER_EPS = 1e-6


def normalize_global(raw: float) -> float:
    """Wrap an angle to the global bearing range [0, 2*pi).

    Parameters
    ----------
    raw : float
        Angle in radians; any finite value.

    Returns
    -------
    float
        The equivalent angle in [0, 2*pi).
    """
    raw = float(raw)
    if not math.isfinite(raw):
        raise ValueError(f"angle must be finite, got {raw!r}")
    a = raw % TWO_PI
    if a >= TWO_PI:
        # Tiny negative inputs can wrap to exactly 2*pi in floating point.
        a -= TWO_PI
    return a


def angular_diff(a: float, b: float) -> float:
    """Signed minimal rotation taking bearing ``b`` onto bearing ``a``.

    The result is in (-pi, pi] (the exact half-turn tie resolves to +pi),
    and its absolute value is the geodesic distance on the circle.
    """
    d = (float(a) - float(b)) % TWO_PI
    if d > math.pi:
        d -= TWO_PI
    return d


def expected_angle(current, sub_goal) -> float:
    """Global bearing from ``current`` toward ``sub_goal``, in [0, 2*pi).

    Raises
    ------
    ValueError
        If the two points coincide (the direction is undefined).
    """
    dx = float(sub_goal[0]) - float(current[0])
    dy = float(sub_goal[1]) - float(current[1])
    if dx == 0.0 and dy == 0.0:
        raise ValueError("direction to a coincident point is undefined")
    return normalize_global(math.atan2(dy, dx))


class Polyline:
    """Ordered chain of 2-D vertices with cached cumulative arc length.

    The vertex array is made read-only on construction, so a Polyline can be
    shared freely between threads.
    """

    __slots__ = ("points", "_cumdist")

    def __init__(self, points):
        pts = np.array(points, dtype=float, copy=True)
        if pts.ndim == 1 and pts.size == 2:
            pts = pts.reshape(1, 2)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("polyline requires an (N, 2) array with N >= 1")
        if not np.isfinite(pts).all():
            raise ValueError("polyline coordinates must be finite")
        if len(pts) > 1:
            seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            if seg.min() < COINCIDENT_EPS:
                raise ValueError(
                    f"consecutive vertices closer than {COINCIDENT_EPS} m"
                )
        pts.setflags(write=False)
        self.points = pts
        self._cumdist = None

    @property
    def cumdist(self) -> np.ndarray:
        """Cumulative arc length at each vertex; cumdist[0] == 0."""
        if self._cumdist is None:
            seg = np.linalg.norm(np.diff(self.points, axis=0), axis=1)
            cd = np.concatenate(([0.0], np.cumsum(seg)))
            cd.setflags(write=False)
            self._cumdist = cd
        return self._cumdist

    @property
    def length(self) -> float:
        return float(self.cumdist[-1])

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, idx):
        return self.points[idx]

    def __repr__(self) -> str:
        return f"Polyline({len(self.points)} pts, {self.length:.3f} m)"


def arc_length(line: Polyline, i: int, j: int) -> float:
    """Arc length along ``line`` between vertex indices ``i`` and ``j``.

    Requires 0 <= i <= j < len(line); returns 0 when i == j.
    """
    n = len(line)
    i, j = int(i), int(j)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for {n} vertices")
    if i > j:
        raise ValueError(f"start index {i} exceeds end index {j}")
    cd = line.cumdist
    return float(cd[j] - cd[i])


def _turn_angle(a, b, c) -> float:
    """Unsigned angle in [0, pi] between segments a->b and b->c."""
    in_bearing = math.atan2(b[1] - a[1], b[0] - a[0])
    out_bearing = math.atan2(c[1] - b[1], c[0] - b[0])
    return abs(angular_diff(out_bearing, in_bearing))


def resample(line: Polyline, spacing: float) -> Polyline:
    """Redistribute vertices so consecutive spacing never exceeds ``spacing``.

    Endpoints and every corner (turn angle above ``CORNER_EPS``) are kept
    exactly; straight runs are subdivided evenly. Collinear pass-through
    vertices are dropped, so the output never gains arc length.
    """
    if not spacing > 0.0:
        raise ValueError(f"spacing must be positive, got {spacing!r}")
    pts = line.points
    n = len(pts)
    if n == 1:
        return line

    anchors = [0]
    for k in range(1, n - 1):
        if _turn_angle(pts[k - 1], pts[k], pts[k + 1]) > CORNER_EPS:
            anchors.append(k)
    anchors.append(n - 1)

    out = [pts[anchors[0]]]
    for a, b in zip(anchors[:-1], anchors[1:]):
        start, end = pts[a], pts[b]
        chord = end - start
        clen = float(np.hypot(chord[0], chord[1]))
        pieces = max(1, math.ceil(clen / spacing - 1e-12))
        for m in range(1, pieces):
            out.append(start + chord * (m / pieces))
        out.append(end)
    return Polyline(np.vstack(out))
