"""WebSocket teleoperation server.

One simulation task owns the session engine and paces ticks to the wall
clock; client connections push decoded commands into a queue that the
simulation drains once per tick (last writer wins), and snapshots fan out
to all clients at no more than 20 Hz. The handshake message carries the
protocol version, tick rate and arena so clients can draw the scene before
the first snapshot.
"""

from __future__ import annotations

import asyncio
import json
import logging
import math

from websockets.asyncio.server import broadcast, serve

from . import protocol
from .session import SessionConfig, SessionEngine

logger = logging.getLogger(__name__)

BROADCAST_HZ = 20.0


class TeleopServer:
    def __init__(self, config: SessionConfig, host: str = "127.0.0.1",
                 port: int = 8765, record_path=None):
        self.config = config
        self.host = host
        self.port = port
        self.record_path = record_path
        self.connections = set()
        self.commands: asyncio.Queue = asyncio.Queue()
        self.engine = SessionEngine(config)
        self._stop = asyncio.Event()

    async def _handle(self, connection):
        self.connections.add(connection)
        try:
            await connection.send(json.dumps(
                protocol.encode_hello(self.config.arena, self.config.tick_rate)))
            async for message in connection:
                try:
                    cmd = protocol.decode_command(json.loads(message))
                except (json.JSONDecodeError, protocol.ProtocolError) as exc:
                    await connection.send(json.dumps(
                        {"type": "error", "message": str(exc)}))
                    continue
                self.commands.put_nowait(cmd)
        finally:
            self.connections.discard(connection)

    def _drain_commands(self):
        cmd = None
        while True:
            try:
                cmd = self.commands.get_nowait()
            except asyncio.QueueEmpty:
                return cmd

    async def _run_sim(self):
        dt = 1.0 / self.config.tick_rate
        # ceil keeps the broadcast rate at or below BROADCAST_HZ
        every = max(1, math.ceil(self.config.tick_rate / BROADCAST_HZ))
        loop = asyncio.get_running_loop()
        t0 = loop.time()
        record = open(self.record_path, "w") if self.record_path else None
        if record:
            record.write(protocol.canonical_json({
                "type": "header",
                "version": protocol.PROTOCOL_VERSION,
                "duration_s": None,
                "config": self.config.to_dict(),
            }) + "\n")
        try:
            while not self._stop.is_set():
                cmd = self._drain_commands()
                snap = self.engine.tick(cmd)
                if record:
                    if cmd is not None:
                        record.write(protocol.canonical_json({
                            "type": "command", "tick": snap.tick - 1,
                            **protocol.encode_command(cmd)}) + "\n")
                    record.write(protocol.canonical_json(
                        protocol.full_snapshot(snap)) + "\n")
                if snap.tick % every == 0:
                    broadcast(self.connections, json.dumps(protocol.wire_snapshot(snap)))
                if self.engine.status == "collision":
                    broadcast(self.connections, json.dumps(
                        {"type": "status", "status": "collision", "tick": snap.tick}))
                    logger.info("collision at tick %d; simulation halted", snap.tick)
                    break
                # Pace to the wall clock; fall behind silently if overloaded.
                target = t0 + snap.tick * dt
                delay = target - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)
        finally:
            if record:
                record.write(protocol.canonical_json({
                    "type": "end", "status": self.engine.status,
                    "n_ticks": self.engine.tick_count, "sha256": None}) + "\n")
                record.close()

    def stop(self):
        self._stop.set()

    async def run(self):
        """Serve until cancelled (or the simulation halts on collision)."""
        async with serve(self._handle, self.host, self.port):
            logger.info("teleop server listening on ws://%s:%d", self.host, self.port)
            await self._run_sim()


def serve_forever(config: SessionConfig, host: str = "127.0.0.1", port: int = 8765,
                  record_path=None):
    server = TeleopServer(config, host=host, port=port, record_path=record_path)
    try:
        asyncio.run(server.run())
    except KeyboardInterrupt:
        pass
