"""Command-line interface.

Subcommands::

    crawlsim simulate --duration 20 --phase 1 --freq 0.5 --out traj.csv
    crawlsim serve --port 8765 --arena arena.json
    crawlsim experiment phase-sweep|freq-sweep|force-corr|nav-demo --out F
    crawlsim calibrate --freqs 0.25,0.5,1.0,1.5 --out table.json
    crawlsim replay --record session.jsonl [--verify] [--out csv]
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .. import plant as plantmod
from ..oscillator import CpgParams
from ..world import Arena
from . import demo, experiments, protocol, recording
from .session import SessionConfig, run_session


def _load_config(path, arena_path=None) -> SessionConfig:
    if path:
        with open(path) as fh:
            config = SessionConfig.from_dict(json.load(fh))
    else:
        config = SessionConfig()
    if arena_path:
        from dataclasses import replace

        config = replace(config, arena=Arena.load(arena_path))
    return config


def _cmd_simulate(args):
    config = _load_config(args.config)
    params = config.plant.with_shift_index(args.phase)
    from dataclasses import replace

    params = replace(params, freq_hz=args.freq)
    if args.drive == "valve":
        period = 1.0 / args.freq
        drive = plantmod.PneumaticDrive(
            config.pneumatic, params.l0_mm,
            plantmod.ValveTimeline.square_wave(args.freq, args.duration),
            plantmod.ValveTimeline.square_wave(args.freq, args.duration,
                                               offset_s=args.phase * period / 4.0),
            args.freq,
        )
    else:
        drive = plantmod.AnalyticDrive(params)
    traj = plantmod.simulate(params, drive=drive, duration=args.duration)
    traj.to_csv(args.out)
    speed = plantmod.steady_speed(traj) if args.duration >= 10 / args.freq else None
    print(f"wrote {args.out} ({len(traj.ts)} samples, backend={traj.backend})")
    if speed is not None:
        print(f"steady speed: {speed * 1000:.3f} mm/s")
    return 0


def _cmd_serve(args):
    from .server import serve_forever

    config = _load_config(args.config, args.arena)
    serve_forever(config, host=args.host, port=args.port, record_path=args.record)
    return 0


def _cmd_experiment(args):
    config = _load_config(args.config)
    if args.which == "phase-sweep":
        rows = experiments.phase_sweep(config.plant, out_csv=args.out)
        for row in rows:
            print(f"phi = {row['phi_n']}T/4: {row['speed_mm_per_s']:8.3f} mm/s")
    elif args.which == "freq-sweep":
        result = experiments.frequency_sweep(config.plant, config.pneumatic,
                                             drive=args.drive, out_csv=args.out)
        for row in result["rows"]:
            note = "" if row["folds_open"] else "  (below fold-opening elongation)"
            print(f"f = {row['f_hz']:.2f} Hz: {row['speed_mm_per_s']:8.3f} mm/s, "
                  f"peak elongation {row['peak_eps'] * 100:.0f}%{note}")
        print(f"interior maximum: {result['interior_max']}")
    elif args.which == "force-corr":
        result = experiments.force_correlation(config.plant, out_csv=args.out)
        for row in result["rows"]:
            print(f"phi = {row['phi_n']}T/4: {row['speed_mm_per_s']:8.3f} mm/s, "
                  f"peak force {row['mean_top10_tension_n']:.4f} N")
        r = result["pearson_r"]
        print(f"Pearson r: {'N/A' if r is None else f'{r:.3f}'}")
    elif args.which == "nav-demo":
        config = demo.course_config()
        snapshots = []
        result = run_session(config, demo.course_commands(config.tick_rate),
                             sink=snapshots.append,
                             duration_s=demo.COURSE_DURATION_S)
        alerts = [s.alert.value for s in snapshots]
        print(f"status: {result.status}, ticks: {result.n_ticks}")
        print(f"final pose: x={result.final_pose.x:.0f} mm, "
              f"y={result.final_pose.y:.0f} mm")
        print(f"alerts seen: {sorted(set(alerts))}")
        print(f"stream sha256: {result.snapshot_sha256}")
        if args.out:
            with open(args.out, "w") as fh:
                for snap in snapshots:
                    fh.write(protocol.canonical_json(protocol.full_snapshot(snap)) + "\n")
    return 0


def _cmd_calibrate(args):
    freqs = [float(tok) for tok in args.freqs.split(",") if tok]
    entries = experiments.calibration_table(freqs, CpgParams(), path=args.out)
    for entry in entries:
        print(f"f = {entry['f_hz']:.3f} Hz -> m = {entry['m']:.6f}")
    if args.out:
        print(f"wrote {args.out}")
    return 0


def _cmd_replay(args):
    record = recording.read_record(args.record)
    t0 = time.time()
    snapshots = []
    digest = recording.replay(record, sink=snapshots.append if args.out else None)
    wall = time.time() - t0
    print(f"replayed {record.n_ticks} ticks in {wall:.2f}s "
          f"({record.duration_s}s of sim time)")
    if args.verify:
        if digest == record.sha256:
            print("hash match: replay is bit-identical to the record")
        else:
            print("HASH MISMATCH: replay diverged from the record")
            return 1
    if args.out:
        with open(args.out, "w") as fh:
            for snap in snapshots:
                fh.write(protocol.canonical_json(protocol.full_snapshot(snap)) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crawlsim",
                                 description="Crawling soft robot simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the body dynamics to CSV")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--duration", type=float, default=20.0)
    p.add_argument("--phase", type=int, default=1, choices=(0, 1, 2, 3))
    p.add_argument("--freq", type=float, default=0.5)
    p.add_argument("--drive", choices=("analytic", "valve"), default="analytic")
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("serve", help="run the WebSocket teleoperation server")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--arena", help="arena JSON (overrides the config's arena)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--record", help="record the live session to this JSONL file")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("experiment", help="run a headless experiment")
    p.add_argument("which", choices=("phase-sweep", "freq-sweep", "force-corr",
                                     "nav-demo"))
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--drive", choices=("analytic", "valve"), default="valve",
                   help="drive model for freq-sweep")
    p.add_argument("--out", help="output CSV / JSONL path")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("calibrate", help="build a frequency calibration table")
    p.add_argument("--freqs", required=True, help="comma-separated Hz list")
    p.add_argument("--out", help="JSON table path")
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("replay", help="re-run a recorded session")
    p.add_argument("--record", required=True, help="session record JSONL")
    p.add_argument("--verify", action="store_true",
                   help="check the replay hash against the record")
    p.add_argument("--out", help="write replayed snapshots to this JSONL file")
    p.set_defaults(fn=_cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
