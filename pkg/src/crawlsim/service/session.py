"""Tick-driven session engine binding oscillator, gait, plant, world, teleop.

One engine owns all mutable session state. Per tick it steps the CPG,
extracts current and delayed region labels, derives the valve command from
the active gait, advances the pneumatic segment states, reads the
proximity sensors, arbitrates the operator command against them, and emits
a snapshot. Gait and frequency switches engage at the next positive-going
zero crossing of the first oscillator output; the pose advances once per
completed actuation cycle using cached 1-D plant speeds.

Sim time is decoupled from wall time: callers pace ticks themselves (the
WebSocket server paces to the wall clock, experiments run flat out).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, fields, replace

from .. import plant as plantmod
from ..gait import IDLE, GaitKind, LocomotionMode, ValveCommand, valve_table
from ..kernels import _pure as pure_kernels
from ..oscillator import (
    CpgParams,
    CpgState,
    DelayLine,
    Region,
    WARMUP_S,
    calibrate,
    classify_region,
    step,
)
from ..plant import PlantParams, PneumaticParams
from ..teleop import Alert, TeleopConfig, TeleopDecision, UserCommand, arbitrate
from ..world import (
    Arena,
    PlanarParams,
    Pose,
    SensorParams,
    advance_pose,
    collide,
    cycle_outcome,
    sense,
)
from . import protocol


class ConfigError(ValueError):
    """Session configuration violates a component invariant."""


@dataclass(frozen=True)
class SessionConfig:
    tick_rate: float = 50.0
    drive_mode: str = "analytic"
    seed: int = 0
    footprint_radius_mm: float = 40.0
    start_pose: Pose | None = None
    arena: Arena = field(default_factory=Arena)
    plant: PlantParams = field(default_factory=PlantParams)
    pneumatic: PneumaticParams = field(default_factory=PneumaticParams)
    planar: PlanarParams = field(default_factory=PlanarParams)
    sensors: SensorParams = field(default_factory=SensorParams)
    teleop: TeleopConfig = field(default_factory=TeleopConfig)
    cpg_w0: float = 1.3
    cpg_w1: float = 0.1
    initial_command: UserCommand = field(default_factory=UserCommand)
    calibration_path: str | None = None

    def __post_init__(self):
        if self.drive_mode not in ("analytic", "valve"):
            raise ConfigError("drive_mode must be 'analytic' or 'valve'")
        from ..oscillator import F_MAX_HZ

        if self.tick_rate < 20.0 * F_MAX_HZ:
            raise ConfigError(
                f"tick_rate {self.tick_rate} Hz below 20 samples per period at f_max"
            )
        if self.footprint_radius_mm <= 0:
            raise ConfigError("footprint radius must be positive")
        if self.start_pose is None:
            object.__setattr__(
                self, "start_pose",
                Pose(x=self.arena.width / 2.0, y=self.arena.height / 2.0),
            )

    @property
    def cpg(self) -> CpgParams:
        return CpgParams(w0=self.cpg_w0, w1=self.cpg_w1, tick_rate=self.tick_rate)

    def to_dict(self) -> dict:
        def plain(obj):
            out = {}
            for f in fields(obj):
                v = getattr(obj, f.name)
                out[f.name] = dict(v) if isinstance(v, dict) else v
            return out

        return {
            "tick_rate": self.tick_rate,
            "drive_mode": self.drive_mode,
            "seed": self.seed,
            "footprint_radius_mm": self.footprint_radius_mm,
            "start_pose": protocol.pose_to_dict(self.start_pose),
            "arena": self.arena.to_dict(),
            "plant": plain(self.plant),
            "pneumatic": plain(self.pneumatic),
            "planar": plain(self.planar),
            "sensors": plain(self.sensors),
            "teleop": plain(self.teleop),
            "cpg_w0": self.cpg_w0,
            "cpg_w1": self.cpg_w1,
            "initial_command": protocol.encode_command(self.initial_command),
            "calibration_path": self.calibration_path,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SessionConfig":
        kwargs = {}
        for key in ("tick_rate", "drive_mode", "seed", "footprint_radius_mm",
                    "cpg_w0", "cpg_w1", "calibration_path"):
            if key in doc:
                kwargs[key] = doc[key]
        if "start_pose" in doc:
            p = doc["start_pose"]
            kwargs["start_pose"] = Pose(p["x"], p["y"], p.get("heading", 0.0))
        if "arena" in doc:
            arena = doc["arena"]
            kwargs["arena"] = Arena.from_dict(arena) if isinstance(arena, dict) \
                else Arena.load(arena)
        for key, klass in (("plant", PlantParams), ("pneumatic", PneumaticParams),
                           ("planar", PlanarParams), ("sensors", SensorParams),
                           ("teleop", TeleopConfig)):
            if key in doc:
                kwargs[key] = klass(**doc[key])
        if "initial_command" in doc:
            kwargs["initial_command"] = protocol.decode_command(doc["initial_command"])
        return cls(**kwargs)


@dataclass(frozen=True)
class Snapshot:
    """Per-tick session telemetry; the wire format is a projection of this."""

    tick: int
    t: float
    pose: Pose
    d_l: float
    d_r: float
    hit_l: bool
    hit_r: bool
    valve: ValveCommand
    region: Region | None
    region_shift: Region | None
    p_a: float
    p_p: float
    eps_a: float
    eps_p: float
    mode: LocomotionMode
    alert: Alert
    speed_mm_s: float


@dataclass
class SessionResult:
    status: str
    n_ticks: int
    final_pose: Pose
    snapshot_sha256: str


def _speed_key(drive_mode: str, f_hz: float, n: int) -> tuple:
    return (drive_mode, round(f_hz, 4), n)


class SessionEngine:
    """Owns all mutable session state; advance with :meth:`tick`."""

    def __init__(self, config: SessionConfig, speed_cache: dict | None = None):
        self.config = config
        self.cpg_params = config.cpg
        self.dt = 1.0 / config.tick_rate
        self.rng = random.Random(config.seed)
        self.pose = config.start_pose
        self.command = config.initial_command
        self.active_mode: LocomotionMode = IDLE
        self.pending_mode: LocomotionMode = config.initial_command.mode
        self.active_f = config.initial_command.freq_hz
        self.pending_f = self.active_f
        self._calibration = self._load_calibration(config.calibration_path)
        self.m = self._m_for(self.active_f)
        self.tick_count = 0
        self.status = "running"
        self._speed_cache = speed_cache if speed_cache is not None else {}
        self._cycle_open = False

        # Region history long enough for a 3T/4 delay at the lowest frequency.
        capacity = int(0.8 * config.tick_rate / 0.1) + 4
        self.regions = DelayLine(capacity, default=None)

        # Pneumatic segment state: (pressure kPa, elongation fraction).
        self.seg_a = (0.0, 0.0)
        self.seg_p = (0.0, 0.0)

        # CPG warm-up: discard the first seconds and prefill the region ring.
        self.cpg = CpgState()
        self._prev_o1 = self.cpg.o1
        for _ in range(int(WARMUP_S * config.tick_rate)):
            self.cpg = step(self.cpg, self.cpg_params, self.m)
            self._push_region()

    @staticmethod
    def _load_calibration(path):
        if path is None:
            return {}
        from .experiments import load_calibration

        return {round(f, 4): m for f, m in load_calibration(path).items()}

    def _m_for(self, f_hz: float) -> float:
        """Modulatory input for a frequency: table lookup, else calibration."""
        hit = self._calibration.get(round(f_hz, 4))
        if hit is not None:
            return hit
        return calibrate(f_hz, self.cpg_params)

    def _push_region(self):
        o1, o2 = self.cpg.o1, self.cpg.o2
        if o1 == 0.0 and o2 == 0.0:
            self.regions.push(None)
        else:
            self.regions.push(classify_region(o1, o2))

    def _period(self) -> float:
        return 1.0 / self.active_f

    def _rect_speed(self, f_hz: float, n: int) -> float:
        """Cached 1-D steady speed (m/s) of the matching plant run."""
        key = _speed_key(self.config.drive_mode, f_hz, n)
        if key not in self._speed_cache:
            params = replace(self.config.plant, freq_hz=f_hz).with_shift_index(n)
            duration = 10.0 / f_hz
            if self.config.drive_mode == "valve":
                period = 1.0 / f_hz
                drive = plantmod.PneumaticDrive(
                    self.config.pneumatic, params.l0_mm,
                    plantmod.ValveTimeline.square_wave(f_hz, duration),
                    plantmod.ValveTimeline.square_wave(f_hz, duration, offset_s=n * period / 4.0),
                    f_hz,
                )
            else:
                drive = plantmod.AnalyticDrive(params)
            traj = plantmod.simulate(params, drive=drive, duration=duration)
            self._speed_cache[key] = plantmod.steady_speed(traj)
        return self._speed_cache[key]

    def _plant_speed_for(self, mode: LocomotionMode) -> float:
        if mode.kind is GaitKind.IDLE:
            return 0.0
        if mode.kind is GaitKind.RECTILINEAR:
            return self._rect_speed(self.active_f, mode.n)
        # Steering gaits scale the reference rectilinear gait (quarter shift).
        return self._rect_speed(self.active_f, 1)

    def _speed_estimate_mm_s(self, mode: LocomotionMode) -> float:
        if mode.kind is GaitKind.IDLE:
            return 0.0
        ds, _ = cycle_outcome(mode, self._plant_speed_for(mode), self.active_f,
                              self.config.planar)
        return ds * self.active_f

    def tick(self, command: UserCommand | None = None) -> Snapshot:
        """Advance one control tick; last writer wins on commands."""
        cfg = self.config
        if command is not None:
            self.command = command
            self.pending_f = command.freq_hz

        # Step the oscillator and detect the cycle boundary.
        self._prev_o1 = self.cpg.o1
        self.cpg = step(self.cpg, self.cpg_params, self.m)
        o1 = self.cpg.o1
        crossing = self._prev_o1 < 0.0 <= o1
        self._push_region()

        if crossing:
            if self._cycle_open and self.active_mode.kind is not GaitKind.IDLE:
                ds, dpsi = cycle_outcome(
                    self.active_mode, self._plant_speed_for(self.active_mode),
                    self.active_f, cfg.planar,
                )
                self.pose = advance_pose(self.pose, ds, dpsi)
            # Engage pending gait and frequency at the clean cycle boundary.
            self.active_mode = self.pending_mode
            if self.pending_f != self.active_f:
                self.active_f = self.pending_f
                self.m = self._m_for(self.active_f)
            self._cycle_open = True

        region, _ = self.regions.delayed_ticks(0)
        shift_ticks = int(self.active_mode.shift_index * self._period() / 4.0
                          * cfg.tick_rate)
        region_shift, warm = self.regions.delayed_ticks(shift_ticks)

        if region is None or region_shift is None or not warm:
            valve = ValveCommand()
        else:
            valve = valve_table(self.active_mode, region, region_shift)

        pn = cfg.pneumatic
        self.seg_a = pure_kernels.pneumatic_advance(
            *self.seg_a, valve.anterior_open, self.dt,
            pn.p_max, pn.p_i, pn.p_d, pn.tau_fill, pn.tau_vent)
        self.seg_p = pure_kernels.pneumatic_advance(
            *self.seg_p, valve.posterior_open, self.dt,
            pn.p_max, pn.p_i, pn.p_d, pn.tau_fill, pn.tau_vent)

        reading = sense(self.pose, cfg.arena, cfg.sensors,
                        self.rng if cfg.sensors.noise_mm > 0 else None)
        decision: TeleopDecision = arbitrate(self.command, reading.d_l, reading.d_r,
                                             cfg.teleop)
        self.pending_mode = decision.effective

        if collide(self.pose, cfg.footprint_radius_mm, cfg.arena):
            self.status = "collision"

        self.tick_count += 1
        return Snapshot(
            tick=self.tick_count,
            t=self.tick_count * self.dt,
            pose=self.pose,
            d_l=reading.d_l, d_r=reading.d_r,
            hit_l=reading.hit_l, hit_r=reading.hit_r,
            valve=valve,
            region=region, region_shift=region_shift,
            p_a=self.seg_a[0], p_p=self.seg_p[0],
            eps_a=self.seg_a[1] * pn.eps_a_max, eps_p=self.seg_p[1] * pn.eps_p_max,
            mode=decision.effective,
            alert=decision.alert,
            speed_mm_s=self._speed_estimate_mm_s(decision.effective),
        )


def _as_command_fn(command_source):
    """Normalize a command source to tick -> UserCommand | None."""
    if command_source is None:
        return lambda tick: None
    if callable(command_source):
        return command_source
    table = dict(command_source if isinstance(command_source, dict)
                 else list(command_source))
    return table.get


def run_session(config: SessionConfig, command_source=None, sink=None,
                duration_s: float = 60.0, stop_on_collision: bool = True,
                speed_cache: dict | None = None) -> SessionResult:
    """Run a headless session; returns status and the snapshot-stream hash.

    ``command_source`` may be a mapping/iterable of (tick, command) pairs or
    a callable; ``sink`` receives every snapshot. The SHA-256 digest covers
    the canonical JSON of all full snapshots, making determinism checkable
    by hash comparison.
    """
    engine = SessionEngine(config, speed_cache=speed_cache)
    get_command = _as_command_fn(command_source)
    n_ticks = int(round(duration_s * config.tick_rate))
    digest = hashlib.sha256()
    for i in range(n_ticks):
        snap = engine.tick(get_command(i))
        digest.update(protocol.canonical_json(protocol.full_snapshot(snap)).encode())
        digest.update(b"\n")
        if sink is not None:
            sink(snap)
        if stop_on_collision and engine.status == "collision":
            break
    return SessionResult(
        status=engine.status,
        n_ticks=engine.tick_count,
        final_pose=engine.pose,
        snapshot_sha256=digest.hexdigest(),
    )
