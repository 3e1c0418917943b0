"""Scripted three-obstacle navigation course.

A fixed arena plus a deterministic scripted operator that drive the robot
from the left side of the arena to the right past three obstacles with no
UI attached. The operator mostly follows the steering suggestions; in one
stretch it deliberately ignores them and holds a lane that grazes a
wall-mounted obstacle, so the forced-override band engages at least once.
Used by the end-to-end tests and the ``nav-demo`` experiment subcommand.
"""

from __future__ import annotations

from ..teleop import Alert, CommandKind, UserCommand
from ..world import Arena, Circle, Pose, Rect, normalize_angle
from .session import SessionConfig

GOAL_X_MM = 1750.0
COURSE_DURATION_S = 300.0
CRUISE_FREQ_HZ = 0.5
CRUISE_PHASE_N = 1


def course_arena() -> Arena:
    return Arena(
        width=2000.0,
        height=900.0,
        substrate="coarse",
        obstacles=(
            Circle(cx=650.0, cy=280.0, r=60.0),
            Circle(cx=1050.0, cy=630.0, r=60.0),
            Rect(x=1300.0, y=490.0, w=120.0, h=410.0),
        ),
    )


def course_config(drive_mode: str = "analytic") -> SessionConfig:
    return SessionConfig(
        drive_mode=drive_mode,
        arena=course_arena(),
        start_pose=Pose(x=150.0, y=450.0, heading=0.0),
        footprint_radius_mm=25.0,
        initial_command=UserCommand(kind=CommandKind.STOP, phase_n=CRUISE_PHASE_N,
                                    freq_hz=CRUISE_FREQ_HZ),
    )


class CourseOperator:
    """Deterministic stand-in for the human operator.

    Steers toward a target lane, obeys the steering suggestions from the
    assistance layer, and ignores them inside one x-window so the robot
    closes on the wall-mounted obstacle until the override fires. Wire it
    up as ``run_session(cfg, op.command, sink=op.observe)``.
    """

    def __init__(self, y_lane: float = 450.0, ignore_window=(1180.0, 1500.0),
                 lane_gain: float = 1.0 / 250.0, suggest_bias: float = 0.25,
                 heading_band: float = 0.08):
        self.y_lane = y_lane
        self.ignore_window = ignore_window
        self.lane_gain = lane_gain
        self.suggest_bias = suggest_bias
        self.heading_band = heading_band
        self.last = None
        self._emitted = None

    def observe(self, snap) -> None:
        self.last = snap

    def _desired(self) -> CommandKind:
        snap = self.last
        inattentive = self.ignore_window[0] < snap.pose.x < self.ignore_window[1]
        if snap.pose.x >= GOAL_X_MM:
            return CommandKind.STOP
        lane = 470.0 if inattentive else self.y_lane
        err = lane - snap.pose.y
        desired_heading = max(-0.30, min(0.30, err * self.lane_gain))
        if not inattentive:
            if snap.alert is Alert.SUGGEST_LEFT:
                desired_heading += self.suggest_bias
            elif snap.alert is Alert.SUGGEST_RIGHT:
                desired_heading -= self.suggest_bias
        dh = normalize_angle(snap.pose.heading - desired_heading)
        if dh > self.heading_band:
            return CommandKind.STEER_RIGHT
        if dh < -self.heading_band:
            return CommandKind.STEER_LEFT
        return CommandKind.FORWARD

    def command(self, tick: int) -> UserCommand | None:
        if tick == 0:
            self._emitted = CommandKind.FORWARD
            return UserCommand(kind=CommandKind.FORWARD, phase_n=CRUISE_PHASE_N,
                               freq_hz=CRUISE_FREQ_HZ)
        if self.last is None:
            return None
        kind = self._desired()
        if kind == self._emitted:
            return None
        self._emitted = kind
        return UserCommand(kind=kind, phase_n=CRUISE_PHASE_N, freq_hz=CRUISE_FREQ_HZ)


def course_commands(tick_rate: float = 50.0, duration_s: float = COURSE_DURATION_S,
                    config: SessionConfig | None = None) -> dict:
    """Expand the scripted operator into a fixed {tick: command} table.

    Runs the closed-loop operator once against the course and freezes the
    commands it issued, so callers needing a plain open-loop command stream
    (e.g. recorded sessions) get a bit-reproducible script.
    """
    from .session import run_session

    if config is None:
        config = course_config()
    op = CourseOperator()
    issued = {}

    def capture(tick):
        cmd = op.command(tick)
        if cmd is not None:
            issued[tick] = cmd
        return cmd

    run_session(config, capture, sink=op.observe, duration_s=duration_s)
    return issued
