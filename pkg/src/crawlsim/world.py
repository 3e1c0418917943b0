"""Planar arena layer: pose kinematics, cone proximity sensing, collision.

The body dynamics are one-dimensional; this layer reduces each gait to a
per-cycle pose increment (forward step, heading change) and adds the two
head-mounted distance sensors as ray-cast cones against the arena.
Lengths are millimeters, angles radians unless suffixed ``_deg``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .gait import GaitKind, LocomotionMode


def normalize_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r = math.pi
    return r


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float


@dataclass(frozen=True)
class Rect:
    x: float
    y: float
    w: float
    h: float


@dataclass(frozen=True)
class Arena:
    """Rectangular arena [0, w] x [0, h] with circle and rectangle obstacles."""

    width: float = 2000.0
    height: float = 1000.0
    obstacles: tuple = ()
    substrate: str = "coarse"

    def __post_init__(self):
        if self.substrate not in ("coarse", "fine"):
            raise ValueError("substrate must be 'coarse' or 'fine'")
        for ob in self.obstacles:
            if isinstance(ob, Circle):
                if ob.r <= 0:
                    raise ValueError("circle radius must be positive")
                inside = (0 <= ob.cx - ob.r and ob.cx + ob.r <= self.width
                          and 0 <= ob.cy - ob.r and ob.cy + ob.r <= self.height)
            elif isinstance(ob, Rect):
                inside = (0 <= ob.x and ob.x + ob.w <= self.width
                          and 0 <= ob.y and ob.y + ob.h <= self.height)
            else:
                raise TypeError(f"unsupported obstacle: {ob!r}")
            if not inside:
                raise ValueError(f"obstacle {ob} extends outside the arena bounds")

    @classmethod
    def from_dict(cls, doc: dict) -> "Arena":
        obstacles = []
        for ob in doc.get("obstacles", []):
            if ob["type"] == "circle":
                obstacles.append(Circle(ob["cx"], ob["cy"], ob["r"]))
            elif ob["type"] == "rect":
                obstacles.append(Rect(ob["x"], ob["y"], ob["w"], ob["h"]))
            else:
                raise ValueError(f"unknown obstacle type: {ob['type']!r}")
        return cls(
            width=doc["bounds"]["w"],
            height=doc["bounds"]["h"],
            obstacles=tuple(obstacles),
            substrate=doc.get("substrate", "coarse"),
        )

    def to_dict(self) -> dict:
        obstacles = []
        for ob in self.obstacles:
            if isinstance(ob, Circle):
                obstacles.append({"type": "circle", "cx": ob.cx, "cy": ob.cy, "r": ob.r})
            else:
                obstacles.append({"type": "rect", "x": ob.x, "y": ob.y, "w": ob.w, "h": ob.h})
        return {
            "bounds": {"w": self.width, "h": self.height},
            "obstacles": obstacles,
            "substrate": self.substrate,
        }

    @classmethod
    def load(cls, path) -> "Arena":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)


@dataclass(frozen=True)
class SensorParams:
    """Time-of-flight cone sensors mounted 60 degrees off the heading."""

    range_min: float = 10.0
    range_max: float = 600.0
    fov_deg: float = 20.0
    mount_offset_deg: float = 60.0
    rays_per_cone: int = 7
    noise_mm: float = 0.0

    def __post_init__(self):
        if not (0 < self.range_min < self.range_max):
            raise ValueError("need 0 < range_min < range_max")
        if self.fov_deg <= 0:
            raise ValueError("fov must be positive")
        if self.rays_per_cone < 1:
            raise ValueError("need at least one ray per cone")


@dataclass(frozen=True)
class PlanarParams:
    """Per-cycle pose increments for the steering gaits.

    ``turn_rate_deg`` is uncalibrated plumbing (degrees of heading per
    actuation cycle). The maximum bend angles of the four chambers are kept
    as reference constants only.
    """

    turn_rate_deg: float = 8.0
    winding_ratio: float = 0.6
    turn_ds_fraction: float = 0.2
    bend_deg: dict = field(default_factory=lambda: {
        "ar": 55.0, "al": 63.0, "pr": 57.0, "pl": 49.0,
    })

    def __post_init__(self):
        if self.turn_rate_deg <= 0:
            raise ValueError("turn_rate must be positive")


@dataclass(frozen=True)
class SensorReading:
    d_l: float
    d_r: float
    hit_l: bool
    hit_r: bool


_LEFT_KINDS = (GaitKind.TURN_LEFT, GaitKind.WINDING1_LEFT, GaitKind.WINDING2_LEFT)


def cycle_outcome(mode: LocomotionMode, plant_speed: float, f_hz: float,
                  planar: PlanarParams) -> tuple[float, float]:
    """Pose increment (ds mm, dpsi rad) for one completed actuation cycle.

    ``plant_speed`` is the 1-D steady speed (m/s) of a matching plant run;
    a positive dpsi turns left (counterclockwise).
    """
    rect_ds = plant_speed * 1000.0 / f_hz
    turn_rad = math.radians(planar.turn_rate_deg)
    kind = mode.kind
    if kind is GaitKind.IDLE:
        return 0.0, 0.0
    if kind is GaitKind.RECTILINEAR:
        return rect_ds, 0.0
    sign = 1.0 if kind in _LEFT_KINDS else -1.0
    if kind in (GaitKind.TURN_LEFT, GaitKind.TURN_RIGHT):
        return planar.turn_ds_fraction * rect_ds, sign * turn_rad
    return planar.winding_ratio * rect_ds, sign * 0.5 * turn_rad


def advance_pose(pose: Pose, ds: float, dpsi: float) -> Pose:
    """Advance ``ds`` mm along the mean heading while turning by ``dpsi``."""
    mid = pose.heading + 0.5 * dpsi
    return Pose(
        x=pose.x + ds * math.cos(mid),
        y=pose.y + ds * math.sin(mid),
        heading=normalize_angle(pose.heading + dpsi),
    )


def _ray_circle(px, py, dx, dy, ob: Circle) -> float:
    ox, oy = px - ob.cx, py - ob.cy
    b = dx * ox + dy * oy
    c = ox * ox + oy * oy - ob.r * ob.r
    disc = b * b - c
    if disc < 0.0:
        return math.inf
    root = math.sqrt(disc)
    t = -b - root
    if t >= 0.0:
        return t
    t = -b + root
    if t >= 0.0:
        return 0.0
    return math.inf


def _ray_rect(px, py, dx, dy, ob: Rect) -> float:
    t_near, t_far = -math.inf, math.inf
    for p, d, lo, hi in ((px, dx, ob.x, ob.x + ob.w), (py, dy, ob.y, ob.y + ob.h)):
        if d == 0.0:
            if p < lo or p > hi:
                return math.inf
        else:
            t1, t2 = (lo - p) / d, (hi - p) / d
            if t1 > t2:
                t1, t2 = t2, t1
            t_near = max(t_near, t1)
            t_far = min(t_far, t2)
    if t_near > t_far or t_far < 0.0:
        return math.inf
    return max(t_near, 0.0)


def _ray_bounds(px, py, dx, dy, arena: Arena) -> float:
    """Distance to the arena walls from inside."""
    best = math.inf
    if dx > 0.0:
        best = min(best, (arena.width - px) / dx)
    elif dx < 0.0:
        best = min(best, -px / dx)
    if dy > 0.0:
        best = min(best, (arena.height - py) / dy)
    elif dy < 0.0:
        best = min(best, -py / dy)
    return max(best, 0.0)


def _cast_cone(pose: Pose, axis: float, arena: Arena, sp: SensorParams) -> float:
    """Minimum hit distance over the cone's rays (mm, inf when nothing hit)."""
    half = math.radians(sp.fov_deg) / 2.0
    n = sp.rays_per_cone
    best = math.inf
    for i in range(n):
        ang = axis - half + (2.0 * half * i / (n - 1) if n > 1 else half)
        dx, dy = math.cos(ang), math.sin(ang)
        t = _ray_bounds(pose.x, pose.y, dx, dy, arena)
        for ob in arena.obstacles:
            if isinstance(ob, Circle):
                t = min(t, _ray_circle(pose.x, pose.y, dx, dy, ob))
            else:
                t = min(t, _ray_rect(pose.x, pose.y, dx, dy, ob))
        best = min(best, t)
    return best


def sense(pose: Pose, arena: Arena, sp: SensorParams, rng=None) -> SensorReading:
    """Left/right cone readings clamped to the sensor range.

    Hits beyond ``range_max`` read as ``range_max`` with the hit flag
    false. Optional uniform noise of ``+/- noise_mm`` is drawn from ``rng``.
    """
    offset = math.radians(sp.mount_offset_deg)
    readings = []
    flags = []
    for axis in (pose.heading + offset, pose.heading - offset):
        dist = _cast_cone(pose, axis, arena, sp)
        if rng is not None and sp.noise_mm > 0.0 and math.isfinite(dist):
            dist += rng.uniform(-sp.noise_mm, sp.noise_mm)
        if dist > sp.range_max:
            readings.append(sp.range_max)
            flags.append(False)
        else:
            readings.append(max(dist, sp.range_min))
            flags.append(True)
    return SensorReading(d_l=readings[0], d_r=readings[1],
                         hit_l=flags[0], hit_r=flags[1])


def _point_rect_dist(px, py, ob: Rect) -> float:
    dx = max(ob.x - px, 0.0, px - (ob.x + ob.w))
    dy = max(ob.y - py, 0.0, py - (ob.y + ob.h))
    return math.hypot(dx, dy)


def collide(pose: Pose, footprint_radius: float, arena: Arena) -> bool:
    """True when the footprint disc touches any obstacle or exits the bounds."""
    if footprint_radius <= 0:
        raise ValueError("footprint radius must be positive")
    r = footprint_radius
    if (pose.x - r <= 0.0 or pose.x + r >= arena.width
            or pose.y - r <= 0.0 or pose.y + r >= arena.height):
        return True
    for ob in arena.obstacles:
        if isinstance(ob, Circle):
            if math.hypot(pose.x - ob.cx, pose.y - ob.cy) <= ob.r + r:
                return True
        else:
            if _point_rect_dist(pose.x, pose.y, ob) <= r:
                return True
    return False
