"""Configuration bundle for simulation runs, loadable from JSON."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from .route_following import FollowerConfig
from .sensors import DepthCameraModel, PoseNoiseModel

DEFAULT_TIMEOUT = 120.0
DEFAULT_PATH_SPACING = 0.25


class ConfigError(ValueError):
    """A configuration document is malformed."""


@dataclass(frozen=True)
class WalkerModel:
    """Simulated user dynamics.

    speed: forward pace while walking.
    max_turn_rate: cap on commanded heading change per second.
    dt: simulation tick.
    compliance_noise: std of the heading actually walked vs. commanded.
    scan_rate: in-place rotation rate while guidance says stop.
    """

    speed: float = 0.8
    max_turn_rate: float = math.pi / 2
    dt: float = 0.1
    compliance_noise: float = 0.05
    scan_rate: float = math.pi / 4

    def __post_init__(self):
        for name in ("speed", "max_turn_rate", "dt", "scan_rate"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.compliance_noise < 0.0:
            raise ValueError("compliance_noise must be non-negative")


@dataclass(frozen=True)
class SimulationConfig:
    follower: FollowerConfig = field(default_factory=FollowerConfig)
    walker: WalkerModel = field(default_factory=WalkerModel)
    camera: DepthCameraModel = field(default_factory=DepthCameraModel)
    noise: PoseNoiseModel = field(default_factory=PoseNoiseModel)
    path_spacing: float = DEFAULT_PATH_SPACING
    timeout: float = DEFAULT_TIMEOUT


_SECTIONS = {
    "follower": FollowerConfig,
    "walker": WalkerModel,
    "camera": DepthCameraModel,
    "noise": PoseNoiseModel,
}


def _build_section(cls, raw: dict, ctx: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(raw) - names
    if unknown:
        raise ConfigError(f"{ctx}: unknown field {sorted(unknown)[0]!r}")
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{ctx}: {key!r} must be a number")
    try:
        return cls(**raw)
    except ValueError as exc:
        raise ConfigError(f"{ctx}: {exc}") from None


def load_config(doc: dict | None) -> SimulationConfig:
    """Build a SimulationConfig from a JSON document; absent fields default."""
    if doc is None:
        return SimulationConfig()
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    known = set(_SECTIONS) | {"path_spacing", "timeout"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"config: unknown section {sorted(unknown)[0]!r}")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        raw = doc.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError(f"config: {name!r} must be an object")
        kwargs[name] = _build_section(cls, raw, name)
    for scalar in ("path_spacing", "timeout"):
        if scalar in doc:
            v = doc[scalar]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"config: {scalar!r} must be a positive number")
            kwargs[scalar] = float(v)
    return SimulationConfig(**kwargs)
