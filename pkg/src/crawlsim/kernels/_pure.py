"""Pure-Python reference kernels for the three-node crawler plant.

The compiled backend (``_core.pyx``) mirrors this module operation for
operation; tests assert that both produce the same trajectories. Keep the
two in sync when touching the physics.

State vector layout: ``y = [x_p, x_m, x_a, v_p, v_m, v_a]`` (SI units).

Physics parameter vector ``phys``::

    0  l0        undeformed link length (m)
    1  span      elongation span used for friction interpolation (m)
    2  k         link spring constant (N/m)
    3  m_p       posterior node mass (kg)
    4  m_m       middle node mass (kg)
    5  m_a       anterior node mass (kg)
    6  g         gravity (m/s^2)
    7  sigma     sign-smoothing factor, sign(v) ~ tanh(sigma*v)
    8  mu_f1     forward friction coefficient at L = l0
    9  mu_f2     forward friction coefficient at L = l0 + span
    10 mu_b1     backward friction coefficient at L = l0
    11 mu_b2     backward friction coefficient at L = l0 + span
    12 tether_k  unilateral tether stiffness (N/m), 0 disables
    13 anchor    tether anchor x-position (m)

Drive constants ``drive_const``:

* analytic: ``[l0, amp, omega, phi]`` with
  ``L_A = l0 + amp/2 * (1 - cos(omega*t))`` and
  ``L_P = l0 + amp/2 * (1 - cos(omega*t - phi))`` (posterior lags).
* pneumatic: ``[l0, p_max, p_i, p_d, tau_fill, tau_vent, eps_a, eps_p]``
  plus per-segment breakpoint arrays carrying the exact pressure /
  elongation-fraction state at each valve event.
"""

from __future__ import annotations

import math

import numpy as np

DRIVE_ANALYTIC = 0
DRIVE_PNEUMATIC = 1

STATUS_OK = 0
STATUS_STIFF = 1
STATUS_RUNAWAY = 2

_MAX_STEPS = 50_000_000

# Dormand-Prince 5(4) tableau.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
)
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = (
    35.0 / 384.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
# b - b_hat, for the embedded 4th-order error estimate.
_D1, _D3, _D4, _D5, _D6, _D7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def _pneumatic_state(t, bp_t, bp_open, bp_p, bp_frac, p_max, p_i, p_d, tau_fill, tau_vent):
    """Pressure and elongation fraction of one segment at time ``t``.

    ``bp_*`` hold the exact state at each valve-event breakpoint; within a
    piece the pressure follows a first-order exponential and the fraction
    follows the hysteretic opening law.
    """
    n = len(bp_t)
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if bp_t[mid] <= t:
            lo = mid
        else:
            hi = mid - 1
    dt = t - bp_t[lo]
    p0 = bp_p[lo]
    frac0 = bp_frac[lo]
    if bp_open[lo]:
        p = p_max + (p0 - p_max) * math.exp(-dt / tau_fill)
        lin = (p - p_i) / (p_max - p_i)
        if lin < 0.0:
            lin = 0.0
        elif lin > 1.0:
            lin = 1.0
        frac = frac0 if frac0 > lin else lin
    else:
        p = p0 * math.exp(-dt / tau_vent)
        cap = p0 if p0 < p_d else p_d
        if cap <= 0.0:
            frac = 0.0
        else:
            ratio = p / cap
            if ratio > 1.0:
                ratio = 1.0
            frac = frac0 * ratio
    return p, frac


def pneumatic_advance(p0, frac0, is_open, dt, p_max, p_i, p_d, tau_fill, tau_vent):
    """Advance one segment's (pressure, fraction) over ``dt`` with a fixed valve state."""
    return _pneumatic_state(
        dt, [0.0], [1 if is_open else 0], [p0], [frac0], p_max, p_i, p_d, tau_fill, tau_vent
    )


def eval_drive(t, drive_kind, drive_const, bp_a, bp_p):
    """Link rest lengths ``(L_A, L_P)`` in meters at time ``t``."""
    if drive_kind == DRIVE_ANALYTIC:
        l0, amp, omega, phi = drive_const[0], drive_const[1], drive_const[2], drive_const[3]
        la = l0 + 0.5 * amp * (1.0 - math.cos(omega * t))
        lp = l0 + 0.5 * amp * (1.0 - math.cos(omega * t - phi))
        return la, lp
    l0 = drive_const[0]
    p_max, p_i, p_d = drive_const[1], drive_const[2], drive_const[3]
    tau_fill, tau_vent = drive_const[4], drive_const[5]
    eps_a, eps_p = drive_const[6], drive_const[7]
    _, frac_a = _pneumatic_state(
        t, bp_a[0], bp_a[1], bp_a[2], bp_a[3], p_max, p_i, p_d, tau_fill, tau_vent
    )
    _, frac_p = _pneumatic_state(
        t, bp_p[0], bp_p[1], bp_p[2], bp_p[3], p_max, p_i, p_d, tau_fill, tau_vent
    )
    return l0 * (1.0 + eps_a * frac_a), l0 * (1.0 + eps_p * frac_p)


def _friction(v, length, mass, l0, span, g, sigma, mu_f1, mu_f2, mu_b1, mu_b2):
    s = (length - l0) / span
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    if v > 0.0:
        mu = mu_f1 + (mu_f2 - mu_f1) * s
    else:
        mu = mu_b1 + (mu_b2 - mu_b1) * s
    return -mu * mass * g * math.tanh(sigma * v)


def eval_rhs(t, y, phys, drive_kind, drive_const, bp_a, bp_p):
    """Time derivative of the plant state (list of 6 floats)."""
    l0, span, k = phys[0], phys[1], phys[2]
    m_p, m_m, m_a = phys[3], phys[4], phys[5]
    g, sigma = phys[6], phys[7]
    mu_f1, mu_f2, mu_b1, mu_b2 = phys[8], phys[9], phys[10], phys[11]
    tether_k, anchor = phys[12], phys[13]

    la, lp = eval_drive(t, drive_kind, drive_const, bp_a, bp_p)
    x_p, x_m, x_a, v_p, v_m, v_a = y[0], y[1], y[2], y[3], y[4], y[5]

    f_pm = k * (x_m - x_p - lp)
    f_ma = k * (x_a - x_m - la)

    f_p = _friction(v_p, lp, m_p, l0, span, g, sigma, mu_f1, mu_f2, mu_b1, mu_b2)
    f_m = _friction(v_m, 0.5 * (la + lp), m_m, l0, span, g, sigma, mu_f1, mu_f2, mu_b1, mu_b2)
    f_a = _friction(v_a, la, m_a, l0, span, g, sigma, mu_f1, mu_f2, mu_b1, mu_b2)

    if tether_k > 0.0 and x_p > anchor:
        f_p -= tether_k * (x_p - anchor)

    return [
        v_p,
        v_m,
        v_a,
        (f_p + f_pm) / m_p,
        (f_m - f_pm + f_ma) / m_m,
        (f_a - f_ma) / m_a,
    ]


def _as_bp(bp_t, bp_open, bp_p, bp_frac):
    return (
        [float(v) for v in bp_t],
        [int(v) for v in bp_open],
        [float(v) for v in bp_p],
        [float(v) for v in bp_frac],
    )


def integrate_adaptive(
    y0,
    sample_ts,
    phys,
    drive_kind,
    drive_const,
    bp_t_a,
    bp_open_a,
    bp_p_a,
    bp_frac_a,
    bp_t_p,
    bp_open_p,
    bp_p_p,
    bp_frac_p,
    rtol,
    atol,
    min_step,
    max_step,
):
    """Adaptive Dormand-Prince 5(4) integration sampled at ``sample_ts``.

    Steps are clipped so every sample time is hit exactly. Returns
    ``(Y, n_steps, n_rejected, status)`` where ``Y[i]`` is the state at
    ``sample_ts[i]``.
    """
    phys = [float(v) for v in phys]
    drive_const = [float(v) for v in drive_const]
    bp_a = _as_bp(bp_t_a, bp_open_a, bp_p_a, bp_frac_a)
    bp_p = _as_bp(bp_t_p, bp_open_p, bp_p_p, bp_frac_p)
    ts = [float(v) for v in sample_ts]
    n_out = len(ts)
    out = np.empty((n_out, 6))

    y = [float(v) for v in y0]
    t = 0.0
    i_s = 0
    if ts[0] <= 0.0:
        out[0] = y
        i_s = 1

    h = min(1e-3, max_step)
    n_steps = 0
    n_rejected = 0
    k1 = eval_rhs(t, y, phys, drive_kind, drive_const, bp_a, bp_p)

    while i_s < n_out:
        target = ts[i_s]
        clipped = False
        h_step = h
        # 1.01 lookahead so an unclipped step cannot strand t one ulp
        # before the target (which would force an absurdly small step).
        if t + 1.01 * h_step >= target:
            h_step = target - t
            clipped = True
        if h_step < min_step:
            return out, n_steps, n_rejected, STATUS_STIFF
        if n_steps + n_rejected > _MAX_STEPS:
            return out, n_steps, n_rejected, STATUS_RUNAWAY

        hh = h_step
        y2 = [y[i] + hh * _A21 * k1[i] for i in range(6)]
        k2 = eval_rhs(t + _C2 * hh, y2, phys, drive_kind, drive_const, bp_a, bp_p)
        y3 = [y[i] + hh * (_A31 * k1[i] + _A32 * k2[i]) for i in range(6)]
        k3 = eval_rhs(t + _C3 * hh, y3, phys, drive_kind, drive_const, bp_a, bp_p)
        y4 = [y[i] + hh * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i]) for i in range(6)]
        k4 = eval_rhs(t + _C4 * hh, y4, phys, drive_kind, drive_const, bp_a, bp_p)
        y5 = [
            y[i] + hh * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            for i in range(6)
        ]
        k5 = eval_rhs(t + _C5 * hh, y5, phys, drive_kind, drive_const, bp_a, bp_p)
        y6 = [
            y[i]
            + hh * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i])
            for i in range(6)
        ]
        k6 = eval_rhs(t + hh, y6, phys, drive_kind, drive_const, bp_a, bp_p)
        y_new = [
            y[i] + hh * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i])
            for i in range(6)
        ]
        k7 = eval_rhs(t + hh, y_new, phys, drive_kind, drive_const, bp_a, bp_p)

        err = 0.0
        for i in range(6):
            e = hh * (
                _D1 * k1[i]
                + _D3 * k3[i]
                + _D4 * k4[i]
                + _D5 * k5[i]
                + _D6 * k6[i]
                + _D7 * k7[i]
            )
            ay, ayn = abs(y[i]), abs(y_new[i])
            sc = atol + rtol * (ay if ay > ayn else ayn)
            r = e / sc
            err += r * r
        err = math.sqrt(err / 6.0)

        if err <= 1.0:
            n_steps += 1
            t = target if clipped else t + hh
            y = y_new
            k1 = k7
            if clipped and t >= target:
                out[i_s] = y
                i_s += 1
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(max_step, hh * factor)
        else:
            n_rejected += 1
            h = hh * max(0.1, 0.9 * err ** -0.2)

    return out, n_steps, n_rejected, STATUS_OK


def integrate_rk4(
    y0,
    sample_ts,
    phys,
    drive_kind,
    drive_const,
    bp_t_a,
    bp_open_a,
    bp_p_a,
    bp_frac_a,
    bp_t_p,
    bp_open_p,
    bp_p_p,
    bp_frac_p,
    dt,
):
    """Fixed-step classical 4th-order Runge-Kutta, sampled at ``sample_ts``.

    Sample times must be (close to) integer multiples of ``dt``; the step
    count to each sample is rounded. Serves as the independent oracle for
    the adaptive integrator.
    """
    phys = [float(v) for v in phys]
    drive_const = [float(v) for v in drive_const]
    bp_a = _as_bp(bp_t_a, bp_open_a, bp_p_a, bp_frac_a)
    bp_p = _as_bp(bp_t_p, bp_open_p, bp_p_p, bp_frac_p)
    ts = [float(v) for v in sample_ts]
    n_out = len(ts)
    out = np.empty((n_out, 6))

    y = [float(v) for v in y0]
    n_done = 0
    i_s = 0
    if ts[0] <= 0.0:
        out[0] = y
        i_s = 1

    half = 0.5 * dt
    sixth = dt / 6.0
    n_steps = 0
    while i_s < n_out:
        n_target = int(round(ts[i_s] / dt))
        while n_done < n_target:
            t = n_done * dt
            k1 = eval_rhs(t, y, phys, drive_kind, drive_const, bp_a, bp_p)
            ya = [y[i] + half * k1[i] for i in range(6)]
            k2 = eval_rhs(t + half, ya, phys, drive_kind, drive_const, bp_a, bp_p)
            yb = [y[i] + half * k2[i] for i in range(6)]
            k3 = eval_rhs(t + half, yb, phys, drive_kind, drive_const, bp_a, bp_p)
            yc = [y[i] + dt * k3[i] for i in range(6)]
            k4 = eval_rhs(t + dt, yc, phys, drive_kind, drive_const, bp_a, bp_p)
            y = [y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(6)]
            n_done += 1
            n_steps += 1
        out[i_s] = y
        i_s += 1

    return out, n_steps
