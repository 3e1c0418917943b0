"""Gait tables mapping locomotion modes to four-chamber valve commands.

Each mode gates chambers on region labels of two oscillator cycles: the
undelayed cycle and a single delayed copy (quarter-period multiples).
Chambers marked with the half-period set {I, II} are open half the cycle;
{I} alone gives a quarter-period window.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping

from .oscillator import CpgParams, Region, calibrate

HALF_PERIOD = frozenset((Region.I, Region.II))
QUARTER_PERIOD = frozenset((Region.I,))
CHAMBERS = ("ar", "al", "pr", "pl")


class GaitKind(Enum):
    RECTILINEAR = "rectilinear"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    WINDING1_LEFT = "winding1_left"
    WINDING1_RIGHT = "winding1_right"
    WINDING2_LEFT = "winding2_left"
    WINDING2_RIGHT = "winding2_right"
    IDLE = "idle"


_MIRROR = {
    GaitKind.TURN_LEFT: GaitKind.TURN_RIGHT,
    GaitKind.TURN_RIGHT: GaitKind.TURN_LEFT,
    GaitKind.WINDING1_LEFT: GaitKind.WINDING1_RIGHT,
    GaitKind.WINDING1_RIGHT: GaitKind.WINDING1_LEFT,
    GaitKind.WINDING2_LEFT: GaitKind.WINDING2_RIGHT,
    GaitKind.WINDING2_RIGHT: GaitKind.WINDING2_LEFT,
    GaitKind.RECTILINEAR: GaitKind.RECTILINEAR,
    GaitKind.IDLE: GaitKind.IDLE,
}


@dataclass(frozen=True)
class LocomotionMode:
    """A gait selection; ``n`` is the phase-shift index for rectilinear."""

    kind: GaitKind
    n: int = 0

    def __post_init__(self):
        if self.n not in (0, 1, 2, 3):
            raise ValueError("phase index must be in {0, 1, 2, 3}")

    @property
    def shift_index(self) -> int:
        """Quarter-period index of this mode's single delayed cycle."""
        if self.kind is GaitKind.RECTILINEAR:
            return self.n
        if self.kind in (GaitKind.TURN_LEFT, GaitKind.TURN_RIGHT):
            return 2
        if self.kind is GaitKind.IDLE:
            return 0
        return 1

    def mirrored(self) -> "LocomotionMode":
        return replace(self, kind=_MIRROR[self.kind])


IDLE = LocomotionMode(GaitKind.IDLE)
TURN_LEFT = LocomotionMode(GaitKind.TURN_LEFT)
TURN_RIGHT = LocomotionMode(GaitKind.TURN_RIGHT)
WINDING1_LEFT = LocomotionMode(GaitKind.WINDING1_LEFT)
WINDING1_RIGHT = LocomotionMode(GaitKind.WINDING1_RIGHT)
WINDING2_LEFT = LocomotionMode(GaitKind.WINDING2_LEFT)
WINDING2_RIGHT = LocomotionMode(GaitKind.WINDING2_RIGHT)


def rectilinear(n: int) -> LocomotionMode:
    return LocomotionMode(GaitKind.RECTILINEAR, n)


@dataclass(frozen=True)
class ValveCommand:
    """On/off state of the four chamber valves."""

    c_ar: bool = False
    c_al: bool = False
    c_pr: bool = False
    c_pl: bool = False

    def swap_lr(self) -> "ValveCommand":
        return ValveCommand(c_ar=self.c_al, c_al=self.c_ar, c_pr=self.c_pl, c_pl=self.c_pr)

    @property
    def anterior_open(self) -> bool:
        return self.c_ar or self.c_al

    @property
    def posterior_open(self) -> bool:
        return self.c_pr or self.c_pl

    def as_dict(self) -> dict:
        return {"ar": self.c_ar, "al": self.c_al, "pr": self.c_pr, "pl": self.c_pl}


def valve_table(mode: LocomotionMode, r0: Region, r_shift: Region) -> ValveCommand:
    """Chamber command for the current and delayed region labels.

    ``r0`` is the region of the undelayed cycle, ``r_shift`` the region of
    the cycle delayed by ``mode.shift_index`` quarter periods.
    """
    kind = mode.kind
    if kind is GaitKind.IDLE:
        return ValveCommand()
    on0 = r0 in HALF_PERIOD
    if kind is GaitKind.RECTILINEAR:
        on_s = r_shift in HALF_PERIOD
        return ValveCommand(c_ar=on0, c_al=on0, c_pr=on_s, c_pl=on_s)
    if kind is GaitKind.TURN_RIGHT:
        on_s = r_shift in QUARTER_PERIOD
        return ValveCommand(c_ar=on0, c_pl=on0, c_al=on_s, c_pr=on_s)
    if kind is GaitKind.TURN_LEFT:
        on_s = r_shift in QUARTER_PERIOD
        return ValveCommand(c_al=on0, c_pr=on0, c_ar=on_s, c_pl=on_s)
    on_s = r_shift in HALF_PERIOD
    if kind is GaitKind.WINDING1_RIGHT:
        return ValveCommand(c_pr=on0, c_pl=on0, c_ar=on_s, c_al=False)
    if kind is GaitKind.WINDING1_LEFT:
        return ValveCommand(c_pr=on0, c_pl=on0, c_al=on_s, c_ar=False)
    if kind is GaitKind.WINDING2_LEFT:
        return ValveCommand(c_ar=on0, c_al=on0, c_pr=on_s, c_pl=False)
    if kind is GaitKind.WINDING2_RIGHT:
        return ValveCommand(c_ar=on0, c_al=on0, c_pl=on_s, c_pr=False)
    raise ValueError(f"unhandled gait kind: {kind}")


@dataclass(frozen=True)
class GaitProgram:
    """Per-chamber (region set, shift index) assignments plus the CPG input."""

    mode: LocomotionMode
    f_hz: float
    m: float
    chambers: Mapping[str, tuple[frozenset, int]]

    def chamber_on(self, chamber: str, region_at_shift) -> bool:
        """Whether ``chamber`` is open given the region of its shifted cycle."""
        regions, _ = self.chambers[chamber]
        return region_at_shift in regions


def _chamber_map(mode: LocomotionMode) -> dict[str, tuple[frozenset, int]]:
    empty = frozenset()
    kind = mode.kind
    if kind is GaitKind.IDLE:
        return {c: (empty, 0) for c in CHAMBERS}
    if kind is GaitKind.RECTILINEAR:
        return {
            "ar": (HALF_PERIOD, 0),
            "al": (HALF_PERIOD, 0),
            "pr": (HALF_PERIOD, mode.n),
            "pl": (HALF_PERIOD, mode.n),
        }
    if kind is GaitKind.TURN_RIGHT:
        return {
            "ar": (HALF_PERIOD, 0),
            "pl": (HALF_PERIOD, 0),
            "al": (QUARTER_PERIOD, 2),
            "pr": (QUARTER_PERIOD, 2),
        }
    if kind is GaitKind.TURN_LEFT:
        return {
            "al": (HALF_PERIOD, 0),
            "pr": (HALF_PERIOD, 0),
            "ar": (QUARTER_PERIOD, 2),
            "pl": (QUARTER_PERIOD, 2),
        }
    if kind is GaitKind.WINDING1_RIGHT:
        return {
            "pr": (HALF_PERIOD, 0),
            "pl": (HALF_PERIOD, 0),
            "ar": (HALF_PERIOD, 1),
            "al": (empty, 0),
        }
    if kind is GaitKind.WINDING1_LEFT:
        return {
            "pr": (HALF_PERIOD, 0),
            "pl": (HALF_PERIOD, 0),
            "al": (HALF_PERIOD, 1),
            "ar": (empty, 0),
        }
    if kind is GaitKind.WINDING2_LEFT:
        return {
            "ar": (HALF_PERIOD, 0),
            "al": (HALF_PERIOD, 0),
            "pr": (HALF_PERIOD, 1),
            "pl": (empty, 0),
        }
    if kind is GaitKind.WINDING2_RIGHT:
        return {
            "ar": (HALF_PERIOD, 0),
            "al": (HALF_PERIOD, 0),
            "pl": (HALF_PERIOD, 1),
            "pr": (empty, 0),
        }
    raise ValueError(f"unhandled gait kind: {kind}")


def plan(mode: LocomotionMode, f_hz: float, params: CpgParams | None = None) -> GaitProgram:
    """Gait program for ``mode`` at frequency ``f_hz``, ready for the tick loop.

    Calibration errors from the oscillator propagate unchanged.
    """
    if params is None:
        params = CpgParams()
    if mode.kind is GaitKind.IDLE:
        return GaitProgram(mode=mode, f_hz=f_hz, m=0.0, chambers=_chamber_map(mode))
    m = calibrate(f_hz, params)
    return GaitProgram(mode=mode, f_hz=f_hz, m=m, chambers=_chamber_map(mode))
