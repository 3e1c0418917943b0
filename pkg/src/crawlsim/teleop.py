"""Assisted-teleoperation arbitration.

Merges the operator's command with the two proximity readings into the
effective gait plus an operator alert, using three distance bands: full
control above 200 mm, steering suggestions from the differential distance
``delta = d_R - d_L`` between 50 and 200 mm, and a forced turn away from
the obstacle at or below 50 mm.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .gait import IDLE, TURN_LEFT, TURN_RIGHT, LocomotionMode, rectilinear
from .oscillator import F_MAX_HZ, F_MIN_HZ


class CommandKind(Enum):
    FORWARD = "forward"
    STEER_LEFT = "left"
    STEER_RIGHT = "right"
    STOP = "stop"


_MIRROR_CMD = {
    CommandKind.FORWARD: CommandKind.FORWARD,
    CommandKind.STOP: CommandKind.STOP,
    CommandKind.STEER_LEFT: CommandKind.STEER_RIGHT,
    CommandKind.STEER_RIGHT: CommandKind.STEER_LEFT,
}


@dataclass(frozen=True)
class UserCommand:
    """Operator intent: direction plus actuation frequency and phase index."""

    kind: CommandKind = CommandKind.STOP
    phase_n: int = 1
    freq_hz: float = 0.5

    def __post_init__(self):
        if not (F_MIN_HZ <= self.freq_hz <= F_MAX_HZ):
            raise ValueError(f"frequency {self.freq_hz} Hz outside [{F_MIN_HZ}, {F_MAX_HZ}]")
        if self.phase_n not in (0, 1, 2, 3):
            raise ValueError("phase index must be in {0, 1, 2, 3}")

    @property
    def mode(self) -> LocomotionMode:
        if self.kind is CommandKind.FORWARD:
            return rectilinear(self.phase_n)
        if self.kind is CommandKind.STEER_LEFT:
            return TURN_LEFT
        if self.kind is CommandKind.STEER_RIGHT:
            return TURN_RIGHT
        return IDLE

    def mirrored(self) -> "UserCommand":
        return replace(self, kind=_MIRROR_CMD[self.kind])


class Alert(Enum):
    NONE = "none"
    SUGGEST_LEFT = "suggest_left"
    SUGGEST_RIGHT = "suggest_right"
    OVERRIDE_LEFT = "override_left"
    OVERRIDE_RIGHT = "override_right"

    def mirrored(self) -> "Alert":
        return {
            Alert.NONE: Alert.NONE,
            Alert.SUGGEST_LEFT: Alert.SUGGEST_RIGHT,
            Alert.SUGGEST_RIGHT: Alert.SUGGEST_LEFT,
            Alert.OVERRIDE_LEFT: Alert.OVERRIDE_RIGHT,
            Alert.OVERRIDE_RIGHT: Alert.OVERRIDE_LEFT,
        }[self]

    @property
    def is_override(self) -> bool:
        return self in (Alert.OVERRIDE_LEFT, Alert.OVERRIDE_RIGHT)


@dataclass(frozen=True)
class TeleopConfig:
    """Distance bands and tie handling; defaults follow the 20 cm / 5 cm rule."""

    full_control_mm: float = 200.0
    override_mm: float = 50.0
    tie_turn: str = "left"
    override_stop: bool = True

    def __post_init__(self):
        if not (0 < self.override_mm < self.full_control_mm):
            raise ValueError("need 0 < override_mm < full_control_mm")
        if self.tie_turn not in ("left", "right"):
            raise ValueError("tie_turn must be 'left' or 'right'")

    def mirrored(self) -> "TeleopConfig":
        return replace(self, tie_turn="right" if self.tie_turn == "left" else "left")


@dataclass(frozen=True)
class TeleopDecision:
    effective: LocomotionMode
    alert: Alert
    delta_mm: float

    def mirrored(self) -> "TeleopDecision":
        return TeleopDecision(
            effective=self.effective.mirrored(),
            alert=self.alert.mirrored(),
            delta_mm=-self.delta_mm,
        )


DEFAULT_TELEOP = TeleopConfig()


def arbitrate(cmd: UserCommand, d_l: float, d_r: float,
              config: TeleopConfig = DEFAULT_TELEOP) -> TeleopDecision:
    """Effective gait and alert for the given command and sensor distances.

    Pure function: above ``full_control_mm`` the operator's command passes
    through; in the middle band a steering suggestion toward the more open
    side is attached (no alert on an exact tie); at or below ``override_mm``
    the command is replaced by a turn toward the larger distance (ties
    resolved by ``config.tie_turn``).
    """
    delta = d_r - d_l
    nearest = min(d_l, d_r)

    if nearest > config.full_control_mm:
        return TeleopDecision(effective=cmd.mode, alert=Alert.NONE, delta_mm=delta)

    if nearest > config.override_mm:
        if delta > 0:
            alert = Alert.SUGGEST_RIGHT
        elif delta < 0:
            alert = Alert.SUGGEST_LEFT
        else:
            alert = Alert.NONE
        return TeleopDecision(effective=cmd.mode, alert=alert, delta_mm=delta)

    if cmd.kind is CommandKind.STOP and not config.override_stop:
        if delta > 0:
            alert = Alert.SUGGEST_RIGHT
        elif delta < 0:
            alert = Alert.SUGGEST_LEFT
        else:
            alert = Alert.NONE
        return TeleopDecision(effective=IDLE, alert=alert, delta_mm=delta)

    if delta > 0:
        turn_right = True
    elif delta < 0:
        turn_right = False
    else:
        turn_right = config.tie_turn == "right"
    return TeleopDecision(
        effective=TURN_RIGHT if turn_right else TURN_LEFT,
        alert=Alert.OVERRIDE_RIGHT if turn_right else Alert.OVERRIDE_LEFT,
        delta_mm=delta,
    )
