"""JSON wire protocol shared by the WebSocket server, recordings and the HMI.

Client to server::

    {"type": "command", "mode": "forward|left|right|stop",
     "phase_n": 0..3, "freq_hz": 0.1..1.5}

Server to client (at most 20 Hz)::

    {"type": "snapshot", "tick": int, "t": s,
     "pose": {"x": mm, "y": mm, "psi": rad},
     "sensors": {"dl": mm, "dr": mm, "hit_l": bool, "hit_r": bool},
     "valves": {"ar": bool, "al": bool, "pr": bool, "pl": bool},
     "alert": str, "mode": str, "speed": mm/s}

The handshake carries the protocol version, tick rate and the arena.
Recordings store a superset of the wire snapshot (regions, pressures,
elongations) so replays can be compared field for field.
"""

from __future__ import annotations

import json

from ..gait import GaitKind, LocomotionMode
from ..teleop import CommandKind, UserCommand
from ..world import Arena, Pose

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    """Malformed or out-of-contract message."""


def canonical_json(obj) -> str:
    """Compact, key-stable JSON used for hashing and recordings."""
    return json.dumps(obj, separators=(",", ":"), sort_keys=True, allow_nan=False)


def mode_to_str(mode: LocomotionMode) -> str:
    if mode.kind is GaitKind.RECTILINEAR:
        return f"rectilinear_{mode.n}"
    return mode.kind.value


def mode_from_str(s: str) -> LocomotionMode:
    if s.startswith("rectilinear_"):
        return LocomotionMode(GaitKind.RECTILINEAR, int(s.rsplit("_", 1)[1]))
    try:
        return LocomotionMode(GaitKind(s))
    except ValueError as exc:
        raise ProtocolError(f"unknown mode: {s!r}") from exc


def encode_hello(arena: Arena, tick_rate: float) -> dict:
    return {
        "type": "hello",
        "version": PROTOCOL_VERSION,
        "tick_rate": tick_rate,
        "arena": arena.to_dict(),
    }


def decode_command(doc: dict) -> UserCommand:
    if doc.get("type") != "command":
        raise ProtocolError(f"expected a command message, got {doc.get('type')!r}")
    try:
        kind = CommandKind(doc["mode"])
    except (KeyError, ValueError) as exc:
        raise ProtocolError(f"bad command mode: {doc.get('mode')!r}") from exc
    try:
        return UserCommand(
            kind=kind,
            phase_n=int(doc.get("phase_n", 1)),
            freq_hz=float(doc.get("freq_hz", 0.5)),
        )
    except (TypeError, ValueError) as exc:
        raise ProtocolError(str(exc)) from exc


def encode_command(cmd: UserCommand) -> dict:
    return {
        "type": "command",
        "mode": cmd.kind.value,
        "phase_n": cmd.phase_n,
        "freq_hz": cmd.freq_hz,
    }


def wire_snapshot(snap) -> dict:
    """Projection of a snapshot onto the wire schema."""
    return {
        "type": "snapshot",
        "tick": snap.tick,
        "t": snap.t,
        "pose": {"x": snap.pose.x, "y": snap.pose.y, "psi": snap.pose.heading},
        "sensors": {
            "dl": snap.d_l, "dr": snap.d_r,
            "hit_l": snap.hit_l, "hit_r": snap.hit_r,
        },
        "valves": snap.valve.as_dict(),
        "alert": snap.alert.value,
        "mode": mode_to_str(snap.mode),
        "speed": snap.speed_mm_s,
    }


def full_snapshot(snap) -> dict:
    """Recording schema: the wire fields plus internals."""
    doc = wire_snapshot(snap)
    doc["region"] = int(snap.region) if snap.region is not None else None
    doc["region_shift"] = int(snap.region_shift) if snap.region_shift is not None else None
    doc["p_a"] = snap.p_a
    doc["p_p"] = snap.p_p
    doc["eps_a"] = snap.eps_a
    doc["eps_p"] = snap.eps_p
    return doc


def pose_to_dict(pose: Pose) -> dict:
    return {"x": pose.x, "y": pose.y, "heading": pose.heading}


def pose_from_dict(doc: dict) -> Pose:
    return Pose(x=doc["x"], y=doc["y"], heading=doc["heading"])
