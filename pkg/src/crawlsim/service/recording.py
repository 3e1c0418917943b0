"""Session recording and deterministic replay.

A record is a JSONL file: a header line with the protocol version and the
full session configuration, one line per injected command, one line per
snapshot, and a footer with the run status and the SHA-256 of the snapshot
stream. Replaying re-runs the engine from the recorded configuration and
command stream; because sessions are deterministic the replayed stream
hash must equal the recorded one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from . import protocol
from .session import SessionConfig, SessionEngine


class RecordVersionError(RuntimeError):
    """Record written by an incompatible protocol version."""


class RecordChecksumError(RuntimeError):
    """Snapshot stream does not match the recorded checksum."""


class RecordFormatError(ValueError):
    """Structurally invalid record file."""


@dataclass
class SessionRecord:
    config: SessionConfig
    commands: dict
    snapshots: list
    status: str
    duration_s: float
    sha256: str

    @property
    def n_ticks(self) -> int:
        return len(self.snapshots)


def record_session(config: SessionConfig, command_source, path,
                   duration_s: float = 60.0, stop_on_collision: bool = True) -> str:
    """Run a session and persist it; returns the snapshot-stream hash."""
    engine = SessionEngine(config)
    if callable(command_source):
        get_command = command_source
        table = {}
    else:
        table = dict(command_source if isinstance(command_source, dict)
                     else list(command_source))
        get_command = table.get

    digest = hashlib.sha256()
    n_ticks = int(round(duration_s * config.tick_rate))
    with open(path, "w") as fh:
        fh.write(protocol.canonical_json({
            "type": "header",
            "version": protocol.PROTOCOL_VERSION,
            "duration_s": duration_s,
            "config": config.to_dict(),
        }) + "\n")
        for i in range(n_ticks):
            cmd = get_command(i)
            if cmd is not None:
                fh.write(protocol.canonical_json({
                    "type": "command", "tick": i, **protocol.encode_command(cmd),
                }) + "\n")
            snap = engine.tick(cmd)
            line = protocol.canonical_json(protocol.full_snapshot(snap))
            digest.update(line.encode())
            digest.update(b"\n")
            fh.write(line + "\n")
            if stop_on_collision and engine.status == "collision":
                break
        fh.write(protocol.canonical_json({
            "type": "end",
            "status": engine.status,
            "n_ticks": engine.tick_count,
            "sha256": digest.hexdigest(),
        }) + "\n")
    return digest.hexdigest()


def read_record(path) -> SessionRecord:
    """Parse and verify a record file (version and checksum)."""
    header = None
    footer = None
    commands = {}
    snapshots = []
    digest = hashlib.sha256()
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            kind = doc.get("type")
            if kind == "header":
                if doc.get("version") != protocol.PROTOCOL_VERSION:
                    raise RecordVersionError(
                        f"record version {doc.get('version')} != "
                        f"{protocol.PROTOCOL_VERSION}"
                    )
                header = doc
            elif kind == "command":
                commands[doc["tick"]] = protocol.decode_command(doc)
            elif kind == "snapshot":
                snapshots.append(doc)
                digest.update(protocol.canonical_json(doc).encode())
                digest.update(b"\n")
            elif kind == "end":
                footer = doc
            else:
                raise RecordFormatError(f"unknown record line type: {kind!r}")
    if header is None or footer is None:
        raise RecordFormatError("record is missing its header or footer")
    if digest.hexdigest() != footer["sha256"]:
        raise RecordChecksumError("snapshot stream does not match the checksum")
    return SessionRecord(
        config=SessionConfig.from_dict(header["config"]),
        commands=commands,
        snapshots=snapshots,
        status=footer["status"],
        duration_s=header["duration_s"],
        sha256=footer["sha256"],
    )


def replay(record: SessionRecord, sink=None) -> str:
    """Re-run the recorded session; returns the replayed stream hash.

    The result is bit-identical to the recorded stream for a valid record:
    the hash equals ``record.sha256``.
    """
    engine = SessionEngine(record.config)
    digest = hashlib.sha256()
    for i in range(record.n_ticks):
        snap = engine.tick(record.commands.get(i))
        line = protocol.canonical_json(protocol.full_snapshot(snap))
        digest.update(line.encode())
        digest.update(b"\n")
        if sink is not None:
            sink(snap)
    return digest.hexdigest()
