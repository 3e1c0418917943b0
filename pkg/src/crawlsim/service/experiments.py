"""Headless experiment harness: parameter sweeps, force correlation, calibration.

Each experiment is a plain function returning row dicts (and writing CSV
when asked) so results are reproducible bit for bit across runs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import replace

import numpy as np

from .. import plant as plantmod
from ..oscillator import CpgParams, calibrate, find_peaks, measure_frequency, run_series, WARMUP_S
from ..plant import PlantParams, PneumaticParams

DEFAULT_FREQS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)

# Measured performance of the physical robot, kept for reference only: the
# desk-scale model reproduces orderings and correlations, not these values.
HARDWARE_REFERENCE = {
    "v_max_fine_mm_s": 6.33,
    "v_max_coarse_mm_s": 10.83,
    "f_max_fine_n": 0.215,
    "f_max_coarse_n": 0.262,
    "r_speed_force_fine": 0.77,
    "r_speed_force_coarse": 0.86,
}


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames)
        w.writeheader()
        for row in rows:
            w.writerow(row)


def pearson_r(xs, ys):
    """Pearson correlation, or None when either sample is degenerate."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or xs.std() < 1e-12 or ys.std() < 1e-12:
        return None
    return float(np.corrcoef(xs, ys)[0, 1])


def mean_top_peaks(series, k: int = 10) -> float:
    """Mean of the k largest prominent peaks of a force history."""
    x = np.asarray(series, dtype=float)
    rng = float(x.max() - x.min())
    if rng <= 0.0:
        return 0.0
    peaks = find_peaks(x, 0.1 * rng)
    if not peaks:
        return 0.0
    values = sorted((x[p] for p in peaks), reverse=True)
    return float(np.mean(values[:k]))


def phase_sweep(params: PlantParams | None = None, f_hz: float = 0.5,
                shifts=(0, 1, 2, 3), duration: float = 20.0,
                rel_tol: float = 1e-6, out_csv=None) -> list[dict]:
    """Steady speed per phase-shift index under the analytic drive."""
    if params is None:
        params = PlantParams()
    params = replace(params, freq_hz=f_hz)
    rows = []
    for n in shifts:
        traj = plantmod.simulate(params.with_shift_index(n), duration=duration,
                                 rel_tol=rel_tol)
        speed = plantmod.steady_speed(traj)
        rows.append({"phi_n": n, "speed_mm_per_s": speed * 1000.0})
    if out_csv:
        _write_csv(out_csv, ["phi_n", "speed_mm_per_s"], rows)
    return rows


def frequency_sweep(params: PlantParams | None = None,
                    pneu: PneumaticParams | None = None,
                    freqs=DEFAULT_FREQS, n_shift: int = 1,
                    drive: str = "valve", out_csv=None) -> dict:
    """Speed versus actuation frequency at a quarter-period shift.

    Under the valve drive the fill/vent lags attenuate the stroke at high
    frequency, so the sweep is checked for an interior maximum; under the
    analytic drive (amplitude independent of f) that check does not apply
    and is reported as ``"n/a"``.
    """
    if params is None:
        params = PlantParams()
    if pneu is None:
        pneu = PneumaticParams()
    rows = []
    for f in freqs:
        p = replace(params, freq_hz=f).with_shift_index(n_shift)
        duration = 10.0 / f
        if drive == "valve":
            period = 1.0 / f
            drv = plantmod.PneumaticDrive(
                pneu, p.l0_mm,
                plantmod.ValveTimeline.square_wave(f, duration),
                plantmod.ValveTimeline.square_wave(f, duration, offset_s=n_shift * period / 4.0),
                f,
            )
        elif drive == "analytic":
            drv = plantmod.AnalyticDrive(p)
        else:
            raise ValueError(f"unknown drive: {drive!r}")
        traj = plantmod.simulate(p, drive=drv, duration=duration)
        half = len(traj.ts) // 2
        peak_eps = float(max(traj.la_mm[half:].max(), traj.lp_mm[half:].max())
                         / p.l0_mm - 1.0)
        rows.append({
            "f_hz": f,
            "speed_mm_per_s": plantmod.steady_speed(traj) * 1000.0,
            "peak_eps": peak_eps,
            # below the fold-opening elongation the skin never engages
            "folds_open": peak_eps >= pneu.eps_min,
        })

    if drive == "valve" and len(rows) >= 3:
        speeds = [r["speed_mm_per_s"] for r in rows]
        i_max = int(np.argmax(speeds))
        interior_max = "yes" if 0 < i_max < len(speeds) - 1 else "no"
    else:
        interior_max = "n/a"

    if out_csv:
        _write_csv(out_csv, ["f_hz", "speed_mm_per_s", "peak_eps", "folds_open"], rows)
    return {"rows": rows, "interior_max": interior_max, "drive": drive}


def force_correlation(params: PlantParams | None = None, shifts=(0, 1, 2, 3),
                      f_hz: float = 0.5, tether_k: float = 200.0,
                      duration: float = 30.0, out_csv=None) -> dict:
    """Free-crawl speed versus tethered peak pulling force per phase shift.

    Returns the per-shift rows plus the Pearson correlation between steady
    speeds and the mean of the ten dominant tension peaks (None when the
    statistics are degenerate, e.g. a single shift or frictionless body).
    """
    if params is None:
        params = PlantParams()
    params = replace(params, freq_hz=f_hz)
    speeds = []
    forces = []
    rows = []
    for n in shifts:
        p = params.with_shift_index(n)
        free = plantmod.simulate(p, duration=max(duration, 10.0 / f_hz))
        speed = plantmod.steady_speed(free)
        tethered = plantmod.tether_force(p, duration=duration, tether_k=tether_k)
        peak = mean_top_peaks(tethered.tension, 10)
        speeds.append(speed)
        forces.append(peak)
        rows.append({
            "phi_n": n,
            "speed_mm_per_s": speed * 1000.0,
            "mean_top10_tension_n": peak,
        })
    r = pearson_r(speeds, forces) if len(shifts) > 1 else None
    if out_csv:
        _write_csv(out_csv, ["phi_n", "speed_mm_per_s", "mean_top10_tension_n"], rows)
    return {"rows": rows, "pearson_r": r}


def calibration_table(freqs, params: CpgParams | None = None, path=None) -> list[dict]:
    """Calibrate each frequency and optionally persist the (f, m) table."""
    if params is None:
        params = CpgParams()
    entries = [{"f_hz": float(f), "m": calibrate(f, params)} for f in freqs]
    if path:
        with open(path, "w") as fh:
            json.dump({
                "version": 1,
                "tick_rate": params.tick_rate,
                "w0": params.w0,
                "w1": params.w1,
                "entries": entries,
            }, fh, indent=2)
    return entries


def load_calibration(path) -> dict:
    """Load a persisted calibration table as a {f_hz: m} mapping."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported calibration table version: {doc.get('version')}")
    return {e["f_hz"]: e["m"] for e in doc["entries"]}


def remeasure_calibration(table: dict, params: CpgParams | None = None) -> dict:
    """Measured frequency for each table entry, keyed by the target frequency."""
    if params is None:
        params = CpgParams()
    out = {}
    for f_hz, m in table.items():
        n_warm = int(WARMUP_S * params.tick_rate)
        n_meas = int(max(30.0, 14.0 / f_hz) * params.tick_rate)
        o1, _, state = run_series(params, m, n_warm)
        o1, _, _ = run_series(params, m, n_meas, state)
        out[f_hz] = measure_frequency(o1, params.tick_rate)
    return out
