"""Tick-driven session engine, wire protocol, recording, experiments, CLI."""

from .session import SessionConfig, SessionEngine, Snapshot, run_session

__all__ = ["SessionConfig", "SessionEngine", "Snapshot", "run_session"]
