# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the three-node crawler plant.

Mirrors crawlsim.kernels._pure operation for operation; see that module
for the parameter layout. Keep both backends in sync.
"""

from libc.math cimport cos, exp, sqrt, tanh

import numpy as np

DRIVE_ANALYTIC = 0
DRIVE_PNEUMATIC = 1

STATUS_OK = 0
STATUS_STIFF = 1
STATUS_RUNAWAY = 2

DEF MAX_STEPS = 50_000_000

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double D1 = 71.0 / 57600.0, D3 = -71.0 / 16695.0, D4 = 71.0 / 1920.0
cdef double D5 = -17253.0 / 339200.0, D6 = 22.0 / 525.0, D7 = -1.0 / 40.0


cdef struct Pneu:
    double p_max, p_i, p_d, tau_fill, tau_vent


cdef double _seg_frac(double t, const double[::1] bp_t, const long[::1] bp_open,
                      const double[::1] bp_p, const double[::1] bp_frac,
                      Pneu* pn) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = bp_t.shape[0] - 1, mid
    cdef double dt, p0, frac0, p, lin, cap, ratio
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
        p = pn.p_max + (p0 - pn.p_max) * exp(-dt / pn.tau_fill)
        lin = (p - pn.p_i) / (pn.p_max - pn.p_i)
        if lin < 0.0:
            lin = 0.0
        elif lin > 1.0:
            lin = 1.0
        return frac0 if frac0 > lin else lin
    p = p0 * exp(-dt / pn.tau_vent)
    cap = p0 if p0 < pn.p_d else pn.p_d
    if cap <= 0.0:
        return 0.0
    ratio = p / cap
    if ratio > 1.0:
        ratio = 1.0
    return frac0 * ratio


cdef struct Ctx:
    double l0, span, k, m_p, m_m, m_a, g, sigma
    double mu_f1, mu_f2, mu_b1, mu_b2, tether_k, anchor
    int drive_kind
    # analytic
    double d_l0, amp, omega, phi
    # pneumatic
    Pneu pn
    double eps_a, eps_p


cdef inline double _friction(double v, double length, double mass, Ctx* c) noexcept nogil:
    cdef double s = (length - c.l0) / c.span
    cdef double mu
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    if v > 0.0:
        mu = c.mu_f1 + (c.mu_f2 - c.mu_f1) * s
    else:
        mu = c.mu_b1 + (c.mu_b2 - c.mu_b1) * s
    return -mu * mass * c.g * tanh(c.sigma * v)


cdef void _rhs(double t, const double* y, double* dy, Ctx* c,
               const double[::1] bt_a, const long[::1] bo_a,
               const double[::1] bp_a, const double[::1] bf_a,
               const double[::1] bt_p, const long[::1] bo_p,
               const double[::1] bp_p, const double[::1] bf_p) noexcept nogil:
    cdef double la, lp, f_pm, f_ma, f_p, f_m, f_a
    if c.drive_kind == 0:
        la = c.d_l0 + 0.5 * c.amp * (1.0 - cos(c.omega * t))
        lp = c.d_l0 + 0.5 * c.amp * (1.0 - cos(c.omega * t - c.phi))
    else:
        la = c.d_l0 * (1.0 + c.eps_a * _seg_frac(t, bt_a, bo_a, bp_a, bf_a, &c.pn))
        lp = c.d_l0 * (1.0 + c.eps_p * _seg_frac(t, bt_p, bo_p, bp_p, bf_p, &c.pn))

    f_pm = c.k * (y[1] - y[0] - lp)
    f_ma = c.k * (y[2] - y[1] - la)

    f_p = _friction(y[3], lp, c.m_p, c)
    f_m = _friction(y[4], 0.5 * (la + lp), c.m_m, c)
    f_a = _friction(y[5], la, c.m_a, c)

    if c.tether_k > 0.0 and y[0] > c.anchor:
        f_p -= c.tether_k * (y[0] - c.anchor)

    dy[0] = y[3]
    dy[1] = y[4]
    dy[2] = y[5]
    dy[3] = (f_p + f_pm) / c.m_p
    dy[4] = (f_m - f_pm + f_ma) / c.m_m
    dy[5] = (f_a - f_ma) / c.m_a


cdef Ctx _make_ctx(const double[::1] phys, int drive_kind, const double[::1] drive_const):
    cdef Ctx c
    c.l0 = phys[0]; c.span = phys[1]; c.k = phys[2]
    c.m_p = phys[3]; c.m_m = phys[4]; c.m_a = phys[5]
    c.g = phys[6]; c.sigma = phys[7]
    c.mu_f1 = phys[8]; c.mu_f2 = phys[9]; c.mu_b1 = phys[10]; c.mu_b2 = phys[11]
    c.tether_k = phys[12]; c.anchor = phys[13]
    c.drive_kind = drive_kind
    if drive_kind == 0:
        c.d_l0 = drive_const[0]; c.amp = drive_const[1]
        c.omega = drive_const[2]; c.phi = drive_const[3]
        c.pn.p_max = 1.0; c.pn.p_i = 0.0; c.pn.p_d = 0.0
        c.pn.tau_fill = 1.0; c.pn.tau_vent = 1.0
        c.eps_a = 0.0; c.eps_p = 0.0
    else:
        c.d_l0 = drive_const[0]
        c.pn.p_max = drive_const[1]; c.pn.p_i = drive_const[2]; c.pn.p_d = drive_const[3]
        c.pn.tau_fill = drive_const[4]; c.pn.tau_vent = drive_const[5]
        c.eps_a = drive_const[6]; c.eps_p = drive_const[7]
        c.amp = 0.0; c.omega = 0.0; c.phi = 0.0
    return c


def eval_drive(double t, int drive_kind, drive_const, bp_a, bp_p):
    """Link rest lengths (L_A, L_P) in meters at time t."""
    cdef double[::1] dc = np.ascontiguousarray(drive_const, dtype=np.float64)
    cdef Ctx c = _make_ctx(np.zeros(14), drive_kind, dc)
    cdef double la, lp
    if drive_kind == 0:
        la = c.d_l0 + 0.5 * c.amp * (1.0 - cos(c.omega * t))
        lp = c.d_l0 + 0.5 * c.amp * (1.0 - cos(c.omega * t - c.phi))
        return la, lp
    bt_a = np.ascontiguousarray(bp_a[0], dtype=np.float64)
    bo_a = np.ascontiguousarray(bp_a[1], dtype=np.int64)
    bpp_a = np.ascontiguousarray(bp_a[2], dtype=np.float64)
    bf_a = np.ascontiguousarray(bp_a[3], dtype=np.float64)
    bt_p = np.ascontiguousarray(bp_p[0], dtype=np.float64)
    bo_p = np.ascontiguousarray(bp_p[1], dtype=np.int64)
    bpp_p = np.ascontiguousarray(bp_p[2], dtype=np.float64)
    bf_p = np.ascontiguousarray(bp_p[3], dtype=np.float64)
    la = c.d_l0 * (1.0 + c.eps_a * _seg_frac(t, bt_a, bo_a, bpp_a, bf_a, &c.pn))
    lp = c.d_l0 * (1.0 + c.eps_p * _seg_frac(t, bt_p, bo_p, bpp_p, bf_p, &c.pn))
    return la, lp


def eval_rhs(double t, y, phys, int drive_kind, drive_const, bp_a, bp_p):
    """Time derivative of the plant state (list of 6 floats)."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] ph = np.ascontiguousarray(phys, dtype=np.float64)
    cdef double[::1] dc = np.ascontiguousarray(drive_const, dtype=np.float64)
    cdef double[::1] bt_a = np.ascontiguousarray(bp_a[0], dtype=np.float64)
    cdef long[::1] bo_a = np.ascontiguousarray(bp_a[1], dtype=np.int64)
    cdef double[::1] bpp_a = np.ascontiguousarray(bp_a[2], dtype=np.float64)
    cdef double[::1] bf_a = np.ascontiguousarray(bp_a[3], dtype=np.float64)
    cdef double[::1] bt_p = np.ascontiguousarray(bp_p[0], dtype=np.float64)
    cdef long[::1] bo_p = np.ascontiguousarray(bp_p[1], dtype=np.int64)
    cdef double[::1] bpp_p = np.ascontiguousarray(bp_p[2], dtype=np.float64)
    cdef double[::1] bf_p = np.ascontiguousarray(bp_p[3], dtype=np.float64)
    cdef Ctx c = _make_ctx(ph, drive_kind, dc)
    cdef double yy[6]
    cdef double dy[6]
    cdef int i
    for i in range(6):
        yy[i] = yv[i]
    _rhs(t, yy, dy, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
    return [dy[0], dy[1], dy[2], dy[3], dy[4], dy[5]]


def integrate_adaptive(
    y0,
    sample_ts,
    phys,
    int drive_kind,
    drive_const,
    bp_t_a, bp_open_a, bp_p_a, bp_frac_a,
    bp_t_p, bp_open_p, bp_p_p, bp_frac_p,
    double rtol,
    double atol,
    double min_step,
    double max_step,
):
    """Adaptive Dormand-Prince 5(4) integration sampled at ``sample_ts``."""
    cdef double[::1] ph = np.ascontiguousarray(phys, dtype=np.float64)
    cdef double[::1] dc = np.ascontiguousarray(drive_const, dtype=np.float64)
    cdef double[::1] bt_a = np.ascontiguousarray(bp_t_a, dtype=np.float64)
    cdef long[::1] bo_a = np.ascontiguousarray(bp_open_a, dtype=np.int64)
    cdef double[::1] bpp_a = np.ascontiguousarray(bp_p_a, dtype=np.float64)
    cdef double[::1] bf_a = np.ascontiguousarray(bp_frac_a, dtype=np.float64)
    cdef double[::1] bt_p = np.ascontiguousarray(bp_t_p, dtype=np.float64)
    cdef long[::1] bo_p = np.ascontiguousarray(bp_open_p, dtype=np.int64)
    cdef double[::1] bpp_p = np.ascontiguousarray(bp_p_p, dtype=np.float64)
    cdef double[::1] bf_p = np.ascontiguousarray(bp_frac_p, dtype=np.float64)
    cdef double[::1] ts = np.ascontiguousarray(sample_ts, dtype=np.float64)
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)

    cdef Ctx c = _make_ctx(ph, drive_kind, dc)
    cdef Py_ssize_t n_out = ts.shape[0]
    out_arr = np.empty((n_out, 6))
    cdef double[:, ::1] out = out_arr

    cdef double y[6]
    cdef double y_new[6]
    cdef double ytmp[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double k5[6]
    cdef double k6[6]
    cdef double k7[6]
    cdef double t = 0.0, h, hh, target, err, e, sc, ay, ayn, r, factor
    cdef Py_ssize_t i_s = 0, i
    cdef long n_steps = 0, n_rejected = 0
    cdef bint clipped

    for i in range(6):
        y[i] = y0v[i]
    if ts[0] <= 0.0:
        for i in range(6):
            out[0, i] = y[i]
        i_s = 1

    h = 1e-3 if 1e-3 < max_step else max_step
    _rhs(t, y, k1, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)

    while i_s < n_out:
        target = ts[i_s]
        clipped = False
        hh = h
        # 1.01 lookahead so an unclipped step cannot strand t one ulp
        # before the target (which would force an absurdly small step).
        if t + 1.01 * hh >= target:
            hh = target - t
            clipped = True
        if hh < min_step:
            return out_arr, n_steps, n_rejected, STATUS_STIFF
        if n_steps + n_rejected > MAX_STEPS:
            return out_arr, n_steps, n_rejected, STATUS_RUNAWAY

        for i in range(6):
            ytmp[i] = y[i] + hh * A21 * k1[i]
        _rhs(t + C2 * hh, ytmp, k2, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
        for i in range(6):
            ytmp[i] = y[i] + hh * (A31 * k1[i] + A32 * k2[i])
        _rhs(t + C3 * hh, ytmp, k3, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
        for i in range(6):
            ytmp[i] = y[i] + hh * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(t + C4 * hh, ytmp, k4, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
        for i in range(6):
            ytmp[i] = y[i] + hh * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(t + C5 * hh, ytmp, k5, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
        for i in range(6):
            ytmp[i] = y[i] + hh * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                   + A64 * k4[i] + A65 * k5[i])
        _rhs(t + hh, ytmp, k6, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
        for i in range(6):
            y_new[i] = y[i] + hh * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                    + B5 * k5[i] + B6 * k6[i])
        _rhs(t + hh, y_new, k7, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)

        err = 0.0
        for i in range(6):
            e = hh * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i]
                      + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            ay = y[i] if y[i] >= 0.0 else -y[i]
            ayn = y_new[i] if y_new[i] >= 0.0 else -y_new[i]
            sc = atol + rtol * (ay if ay > ayn else ayn)
            r = e / sc
            err += r * r
        err = sqrt(err / 6.0)

        if err <= 1.0:
            n_steps += 1
            t = target if clipped else t + hh
            for i in range(6):
                y[i] = y_new[i]
                k1[i] = k7[i]
            if clipped and t >= target:
                for i in range(6):
                    out[i_s, i] = y[i]
                i_s += 1
            if err == 0.0:
                factor = 5.0
            else:
                factor = 0.9 * err ** -0.2
                if factor > 5.0:
                    factor = 5.0
                elif factor < 0.2:
                    factor = 0.2
            h = hh * factor
            if h > max_step:
                h = max_step
        else:
            n_rejected += 1
            factor = 0.9 * err ** -0.2
            if factor < 0.1:
                factor = 0.1
            h = hh * factor

    return out_arr, n_steps, n_rejected, STATUS_OK


def integrate_rk4(
    y0,
    sample_ts,
    phys,
    int drive_kind,
    drive_const,
    bp_t_a, bp_open_a, bp_p_a, bp_frac_a,
    bp_t_p, bp_open_p, bp_p_p, bp_frac_p,
    double dt,
):
    """Fixed-step classical RK4 oracle, sampled at ``sample_ts``."""
    cdef double[::1] ph = np.ascontiguousarray(phys, dtype=np.float64)
    cdef double[::1] dc = np.ascontiguousarray(drive_const, dtype=np.float64)
    cdef double[::1] bt_a = np.ascontiguousarray(bp_t_a, dtype=np.float64)
    cdef long[::1] bo_a = np.ascontiguousarray(bp_open_a, dtype=np.int64)
    cdef double[::1] bpp_a = np.ascontiguousarray(bp_p_a, dtype=np.float64)
    cdef double[::1] bf_a = np.ascontiguousarray(bp_frac_a, dtype=np.float64)
    cdef double[::1] bt_p = np.ascontiguousarray(bp_t_p, dtype=np.float64)
    cdef long[::1] bo_p = np.ascontiguousarray(bp_open_p, dtype=np.int64)
    cdef double[::1] bpp_p = np.ascontiguousarray(bp_p_p, dtype=np.float64)
    cdef double[::1] bf_p = np.ascontiguousarray(bp_frac_p, dtype=np.float64)
    cdef double[::1] ts = np.ascontiguousarray(sample_ts, dtype=np.float64)
    cdef double[::1] y0v = np.ascontiguousarray(y0, dtype=np.float64)

    cdef Ctx c = _make_ctx(ph, drive_kind, dc)
    cdef Py_ssize_t n_out = ts.shape[0]
    out_arr = np.empty((n_out, 6))
    cdef double[:, ::1] out = out_arr

    cdef double y[6]
    cdef double ytmp[6]
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double t, half = 0.5 * dt, sixth = dt / 6.0
    cdef Py_ssize_t i_s = 0, i
    cdef long n_done = 0, n_target, n_steps = 0

    for i in range(6):
        y[i] = y0v[i]
    if ts[0] <= 0.0:
        for i in range(6):
            out[0, i] = y[i]
        i_s = 1

    while i_s < n_out:
        n_target = <long> (ts[i_s] / dt + 0.5)
        while n_done < n_target:
            t = n_done * dt
            _rhs(t, y, k1, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
            for i in range(6):
                ytmp[i] = y[i] + half * k1[i]
            _rhs(t + half, ytmp, k2, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
            for i in range(6):
                ytmp[i] = y[i] + half * k2[i]
            _rhs(t + half, ytmp, k3, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
            for i in range(6):
                ytmp[i] = y[i] + dt * k3[i]
            _rhs(t + dt, ytmp, k4, &c, bt_a, bo_a, bpp_a, bf_a, bt_p, bo_p, bpp_p, bf_p)
            for i in range(6):
                y[i] = y[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            n_done += 1
            n_steps += 1
        for i in range(6):
            out[i_s, i] = y[i]
        i_s += 1

    return out_arr, n_steps
