#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the reference 20 s trajectory (adaptive integrator) and the fixed-step
RK4 oracle on both backends and prints wall-clock times plus the speedup.

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from crawlsim.kernels import _pure, get_backend
from crawlsim.plant import (
    AnalyticDrive,
    PlantParams,
    PlantState,
    PneumaticDrive,
    PneumaticParams,
    ValveTimeline,
    _phys_vector,
)


def _args_for(drive, params, duration):
    const, bp_a, bp_p = drive.kernel_args()
    phys = _phys_vector(params, 0.0, 0.0)
    y0 = PlantState.rest(params).as_vector()
    n = int(duration * 100 * params.freq_hz)
    ts = np.linspace(0.0, duration, n + 1)
    return y0, ts, phys, drive.kind, const, bp_a, bp_p


def bench(backend, drive, params, duration, repeats, method, dt=1e-4):
    y0, ts, phys, kind, const, bp_a, bp_p = _args_for(drive, params, duration)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        if method == "adaptive":
            _, n_steps, _, status = backend.integrate_adaptive(
                y0, ts, phys, kind, const,
                bp_a[0], bp_a[1], bp_a[2], bp_a[3],
                bp_p[0], bp_p[1], bp_p[2], bp_p[3],
                1e-6, 1e-9, 1e-8, float(ts[1] - ts[0]),
            )
            assert status == 0
        else:
            _, n_steps = backend.integrate_rk4(
                y0, ts, phys, kind, const,
                bp_a[0], bp_a[1], bp_a[2], bp_a[3],
                bp_p[0], bp_p[1], bp_p[2], bp_p[3],
                dt,
            )
        best = min(best, time.perf_counter() - t0)
    return best, n_steps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    try:
        compiled = get_backend("compiled")
    except ImportError:
        print("compiled backend not built; run: python setup.py build_ext --inplace")
        return

    params = PlantParams().with_shift_index(1)
    pneu = PneumaticParams()
    f = params.freq_hz
    analytic = AnalyticDrive(params)
    valve = PneumaticDrive(
        pneu, params.l0_mm,
        ValveTimeline.square_wave(f, 20.0),
        ValveTimeline.square_wave(f, 20.0, offset_s=0.5),
        f,
    )

    cases = [
        ("adaptive / analytic drive, 20 s", analytic, "adaptive"),
        ("adaptive / valve drive, 20 s", valve, "adaptive"),
        ("RK4 oracle dt=1e-4, 20 s", analytic, "rk4"),
    ]

    print(f"{'case':<34} {'pure':>10} {'compiled':>10} {'speedup':>9} {'steps':>8}")
    for label, drive, method in cases:
        t_pure, n = bench(_pure, drive, params, 20.0, args.repeats, method)
        t_core, _ = bench(compiled, drive, params, 20.0, args.repeats, method)
        print(f"{label:<34} {t_pure * 1e3:>8.1f}ms {t_core * 1e3:>8.1f}ms "
              f"{t_pure / t_core:>8.1f}x {n:>8}")


if __name__ == "__main__":
    main()
