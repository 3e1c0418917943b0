"""Three-node crawler dynamics with elongation-dependent asymmetric friction.

Two masses-on-a-line links elongate periodically (analytic cosine drive or
a valve-driven pneumatic drive with fill/vent lags and opening hysteresis);
direction-dependent Coulomb friction, smoothed with tanh, rectifies the
oscillation into net motion. Integration runs through the kernel backends
(compiled or pure Python); a fixed-step RK4 oracle is available for
cross-checking the adaptive integrator.

Unit conventions: lengths in the parameter records are millimeters (as are
``link_lengths`` / ``friction_coeffs`` arguments), node state is SI
(meters, seconds). The posterior link lags the anterior by the phase
shift: ``L_P(t) = L0 + A/2 * (1 - cos(2*pi*f*t - phi))``.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels

logger = logging.getLogger(__name__)

MIN_STEP_S = 1e-8


class StiffnessError(RuntimeError):
    """Adaptive step size collapsed below the minimum step."""


class TrajectoryTooShort(ValueError):
    """Trajectory spans fewer actuation cycles than the estimator needs."""


@dataclass(frozen=True)
class PlantParams:
    """Body parameters; lengths in mm, masses in kg, stiffness in N/m."""

    l0_mm: float = 100.0
    amp_mm: float = 30.0
    freq_hz: float = 0.5
    phi_rad: float = 0.0
    k: float = 100.0
    m_p: float = 0.060
    m_m: float = 0.060
    m_a: float = 0.060
    mu_f1: float = 0.15
    mu_f2: float = 0.20
    mu_b1: float = 0.50
    mu_b2: float = 0.20
    g: float = 9.81
    sigma: float = 50.0

    def __post_init__(self):
        for name in ("l0_mm", "amp_mm", "freq_hz", "k", "m_p", "m_m", "m_a", "g", "sigma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("mu_f1", "mu_f2", "mu_b1", "mu_b2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def period_s(self) -> float:
        return 1.0 / self.freq_hz

    @property
    def l0_m(self) -> float:
        return self.l0_mm * 1e-3

    @property
    def amp_m(self) -> float:
        return self.amp_mm * 1e-3

    def with_shift_index(self, n: int) -> "PlantParams":
        """Copy with the phase shift set to n quarter periods."""
        if n not in (0, 1, 2, 3):
            raise ValueError("shift index must be in {0, 1, 2, 3}")
        return replace(self, phi_rad=n * math.pi / 2.0)


@dataclass(frozen=True)
class PneumaticParams:
    """Valve-drive constants; pressures in kPa, elongations as fractions of L0."""

    p_max: float = 140.0
    p_i: float = 60.0
    p_d: float = 50.0
    eps_a_max: float = 0.60
    eps_p_max: float = 0.74
    eps_min: float = 0.15
    tau_fill: float = 0.50
    tau_vent: float = 0.15

    def __post_init__(self):
        if not (0 < self.p_d < self.p_i < self.p_max):
            raise ValueError("pressure thresholds must satisfy 0 < p_d < p_i < p_max")
        if not (0 < self.eps_min < min(self.eps_a_max, self.eps_p_max)):
            raise ValueError("eps_min must sit below both segment maxima")
        if self.tau_fill <= 0 or self.tau_vent <= 0:
            raise ValueError("time constants must be positive")


@dataclass(frozen=True)
class PlantState:
    """Node positions (m) and velocities (m/s) at time t (s)."""

    x_p: float
    x_m: float
    x_a: float
    v_p: float = 0.0
    v_m: float = 0.0
    v_a: float = 0.0
    t: float = 0.0

    @classmethod
    def rest(cls, params: PlantParams) -> "PlantState":
        """Nodes at rest with undeformed spacing."""
        l0 = params.l0_m
        return cls(x_p=0.0, x_m=l0, x_a=2.0 * l0)

    def as_vector(self) -> list[float]:
        return [self.x_p, self.x_m, self.x_a, self.v_p, self.v_m, self.v_a]


_EMPTY = np.empty(0)
_EMPTY_I = np.empty(0, dtype=np.int64)


class AnalyticDrive:
    """Closed-form link lengths from the plant parameters."""

    kind = kernels.DRIVE_ANALYTIC

    def __init__(self, params: PlantParams):
        self.params = params
        self.freq_hz = params.freq_hz

    def kernel_args(self):
        p = self.params
        const = np.array([p.l0_m, p.amp_m, 2.0 * math.pi * p.freq_hz, p.phi_rad])
        return const, (_EMPTY, _EMPTY_I, _EMPTY, _EMPTY), (_EMPTY, _EMPTY_I, _EMPTY, _EMPTY)

    def lengths_mm(self, t):
        p = self.params
        wt = 2.0 * math.pi * p.freq_hz * np.asarray(t, dtype=float)
        la = p.l0_mm + 0.5 * p.amp_mm * (1.0 - np.cos(wt))
        lp = p.l0_mm + 0.5 * p.amp_mm * (1.0 - np.cos(wt - p.phi_rad))
        return la, lp

    @property
    def max_length_mm(self) -> float:
        return self.params.l0_mm + self.params.amp_mm


class ValveTimeline:
    """Open/close events for one segment's valves; closed before the first event."""

    def __init__(self, events):
        cleaned = []
        state = False
        last_t = -math.inf
        for t, is_open in events:
            if t < last_t:
                raise ValueError("valve events must be time-ordered")
            last_t = t
            is_open = bool(is_open)
            if is_open != state:
                cleaned.append((float(t), is_open))
                state = is_open
        self.events = cleaned

    @classmethod
    def square_wave(cls, freq_hz: float, duration_s: float, offset_s: float = 0.0,
                    duty: float = 0.5) -> "ValveTimeline":
        """Open during [c*T + offset, c*T + offset + duty*T) for each cycle c."""
        period = 1.0 / freq_hz
        events = []
        c = int(math.floor((-offset_s) / period)) - 1
        while True:
            t_open = c * period + offset_s
            t_close = t_open + duty * period
            if t_open > duration_s + period:
                break
            if t_close > 0.0:
                events.append((max(0.0, t_open), True))
                events.append((t_close, False))
            c += 1
        return cls(events)

    def is_open(self, t: float) -> bool:
        state = False
        for et, es in self.events:
            if et > t:
                break
            state = es
        return state


class PneumaticDrive:
    """Valve-driven link lengths with first-order fill/vent and fold hysteresis.

    Pressure relaxes toward the supply while any of a segment's chambers is
    open and vents toward zero otherwise. Elongation fraction follows
    ``(p - p_i)/(p_max - p_i)`` (clamped) while inflating, holds until the
    pressure drops below ``p_d``, then ramps down proportionally to ``p/p_d``.
    """

    kind = kernels.DRIVE_PNEUMATIC

    def __init__(self, pneu: PneumaticParams, l0_mm: float, timeline_a: ValveTimeline,
                 timeline_p: ValveTimeline, freq_hz: float):
        self.pneu = pneu
        self.l0_mm = l0_mm
        self.freq_hz = freq_hz
        self.timeline_a = timeline_a
        self.timeline_p = timeline_p
        self._bp_a = self._precompute(timeline_a)
        self._bp_p = self._precompute(timeline_p)

    def _precompute(self, timeline: ValveTimeline):
        pn = self.pneu
        times = [0.0]
        opens = [False]
        for t, is_open in timeline.events:
            if t == 0.0:
                opens[0] = is_open
            else:
                times.append(t)
                opens.append(is_open)
        ps = [0.0]
        fracs = [0.0]
        for i in range(1, len(times)):
            p, frac = kernels._pure.pneumatic_advance(
                ps[-1], fracs[-1], opens[i - 1], times[i] - times[i - 1],
                pn.p_max, pn.p_i, pn.p_d, pn.tau_fill, pn.tau_vent,
            )
            ps.append(p)
            fracs.append(frac)
        return (
            np.asarray(times),
            np.asarray([1 if o else 0 for o in opens], dtype=np.int64),
            np.asarray(ps),
            np.asarray(fracs),
        )

    def kernel_args(self):
        pn = self.pneu
        const = np.array([
            self.l0_mm * 1e-3, pn.p_max, pn.p_i, pn.p_d,
            pn.tau_fill, pn.tau_vent, pn.eps_a_max, pn.eps_p_max,
        ])
        return const, self._bp_a, self._bp_p

    def segment_state(self, t: float):
        """((p_a, frac_a), (p_p, frac_p)) at time t."""
        pn = self.pneu
        out = []
        for bp in (self._bp_a, self._bp_p):
            i = max(0, int(np.searchsorted(bp[0], t, side="right")) - 1)
            p, frac = kernels._pure.pneumatic_advance(
                bp[2][i], bp[3][i], bool(bp[1][i]), t - bp[0][i],
                pn.p_max, pn.p_i, pn.p_d, pn.tau_fill, pn.tau_vent,
            )
            out.append((p, frac))
        return tuple(out)

    def lengths_mm(self, t):
        scalar = np.isscalar(t)
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        la = np.empty_like(ts)
        lp = np.empty_like(ts)
        for i, ti in enumerate(ts):
            (_, fa), (_, fp) = self.segment_state(float(ti))
            la[i] = self.l0_mm * (1.0 + self.pneu.eps_a_max * fa)
            lp[i] = self.l0_mm * (1.0 + self.pneu.eps_p_max * fp)
        if scalar:
            return float(la[0]), float(lp[0])
        return la, lp

    @property
    def max_length_mm(self) -> float:
        return self.l0_mm * (1.0 + max(self.pneu.eps_a_max, self.pneu.eps_p_max))


def link_lengths(t: float, params: PlantParams) -> tuple[float, float]:
    """Analytic link rest lengths (L_A, L_P) in mm at time t."""
    if t < 0:
        raise ValueError("time must be non-negative")
    la, lp = AnalyticDrive(params).lengths_mm(float(t))
    return float(la), float(lp)


_clamp_warned = False


def friction_coeffs(length_mm: float, params: PlantParams) -> tuple[float, float]:
    """Forward/backward friction coefficients at link length ``length_mm``.

    Interpolates linearly between the endpoints at L0 and L0 + A; lengths
    outside that span are clamped (logged once per process).
    """
    global _clamp_warned
    s = (length_mm - params.l0_mm) / params.amp_mm
    if s < 0.0 or s > 1.0:
        if not _clamp_warned:
            logger.warning(
                "link length %.1f mm outside [%g, %g] mm; friction clamped to endpoint",
                length_mm, params.l0_mm, params.l0_mm + params.amp_mm,
            )
            _clamp_warned = True
        s = min(1.0, max(0.0, s))
    mu_f = params.mu_f1 + (params.mu_f2 - params.mu_f1) * s
    mu_b = params.mu_b1 + (params.mu_b2 - params.mu_b1) * s
    return mu_f, mu_b


def friction_force(mass: float, mu_f: float, mu_b: float, v: float,
                   params: PlantParams) -> float:
    """Smoothed direction-dependent Coulomb friction force in N."""
    mu = mu_f if v > 0 else mu_b
    return -mu * mass * params.g * math.tanh(params.sigma * v)


def _phys_vector(params: PlantParams, tether_k: float, tether_anchor: float):
    return np.array([
        params.l0_m, params.amp_m, params.k,
        params.m_p, params.m_m, params.m_a,
        params.g, params.sigma,
        params.mu_f1, params.mu_f2, params.mu_b1, params.mu_b2,
        tether_k, tether_anchor,
    ])


def rhs(state: PlantState, t: float, params: PlantParams, drive=None,
        tether_k: float = 0.0, tether_anchor: float = 0.0):
    """Time derivatives (dx..., dv...) of the plant state."""
    if drive is None:
        drive = AnalyticDrive(params)
    const, bp_a, bp_p = drive.kernel_args()
    phys = _phys_vector(params, tether_k, tether_anchor)
    return tuple(kernels.eval_rhs(t, state.as_vector(), phys, drive.kind, const, bp_a, bp_p))


@dataclass
class Trajectory:
    """Sampled plant motion plus per-node friction forces and link lengths."""

    ts: np.ndarray
    x: np.ndarray
    v: np.ndarray
    la_mm: np.ndarray
    lp_mm: np.ndarray
    f_fric: np.ndarray
    tension: np.ndarray
    freq_hz: float
    n_steps: int
    n_rejected: int
    rtol: float
    atol: float
    backend: str = field(default_factory=lambda: kernels.BACKEND)

    @property
    def duration(self) -> float:
        return float(self.ts[-1] - self.ts[0])

    def state_at(self, i: int) -> PlantState:
        return PlantState(*self.x[i], *self.v[i], t=float(self.ts[i]))

    def mean_position(self, i: int) -> float:
        return float(self.x[i].mean())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([
                "t", "x_P", "x_M", "x_A", "v_P", "v_M", "v_A",
                "L_A", "L_P", "F_fric_P", "F_fric_M", "F_fric_A", "tension",
            ])
            for i in range(len(self.ts)):
                w.writerow([
                    f"{self.ts[i]:.6f}",
                    *(f"{val:.9f}" for val in self.x[i]),
                    *(f"{val:.9f}" for val in self.v[i]),
                    f"{self.la_mm[i]:.6f}", f"{self.lp_mm[i]:.6f}",
                    *(f"{val:.9f}" for val in self.f_fric[i]),
                    f"{self.tension[i]:.9f}",
                ])


def _friction_forces(params: PlantParams, v: np.ndarray, la_mm: np.ndarray,
                     lp_mm: np.ndarray) -> np.ndarray:
    """Vectorized per-node friction forces at the sample points."""
    lm_mm = 0.5 * (la_mm + lp_mm)
    out = np.empty_like(v)
    for col, (length, mass) in enumerate(
        ((lp_mm, params.m_p), (lm_mm, params.m_m), (la_mm, params.m_a))
    ):
        s = np.clip((length - params.l0_mm) / params.amp_mm, 0.0, 1.0)
        mu_f = params.mu_f1 + (params.mu_f2 - params.mu_f1) * s
        mu_b = params.mu_b1 + (params.mu_b2 - params.mu_b1) * s
        mu = np.where(v[:, col] > 0, mu_f, mu_b)
        out[:, col] = -mu * mass * params.g * np.tanh(params.sigma * v[:, col])
    return out


def simulate(
    params: PlantParams,
    drive=None,
    duration: float = 20.0,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-9,
    samples_per_cycle: int = 100,
    tether_k: float = 0.0,
    initial_state: PlantState | None = None,
    method: str = "adaptive",
    dt: float = 1e-4,
) -> Trajectory:
    """Integrate the plant over ``duration`` seconds.

    ``method`` selects the adaptive Dormand-Prince integrator (default) or
    the fixed-step RK4 oracle (``"rk4"`` with step ``dt``). Output is
    sampled at ``samples_per_cycle`` points per actuation period (at least
    100). Raises :class:`StiffnessError` if the adaptive step collapses
    below 1e-8 s.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    if drive is None:
        drive = AnalyticDrive(params)
    if initial_state is None:
        initial_state = PlantState.rest(params)

    spc = max(100, samples_per_cycle)
    period = 1.0 / drive.freq_hz
    n_samples = max(1, int(round(duration * spc / period)))
    ts = np.linspace(0.0, duration, n_samples + 1)

    if drive.max_length_mm > params.l0_mm + params.amp_mm + 1e-9:
        logger.info(
            "drive reaches %.1f mm, beyond the %.1f mm friction span; "
            "coefficients clamp at the far endpoint",
            drive.max_length_mm, params.l0_mm + params.amp_mm,
        )

    anchor = initial_state.x_p
    phys = _phys_vector(params, tether_k, anchor)
    const, bp_a, bp_p = drive.kernel_args()
    y0 = initial_state.as_vector()

    if method == "adaptive":
        y, n_steps, n_rejected, status = kernels.integrate_adaptive(
            y0, ts, phys, drive.kind, const,
            bp_a[0], bp_a[1], bp_a[2], bp_a[3],
            bp_p[0], bp_p[1], bp_p[2], bp_p[3],
            rel_tol, abs_tol, MIN_STEP_S, float(ts[1] - ts[0]),
        )
        if status == kernels.STATUS_STIFF:
            raise StiffnessError(f"step size collapsed below {MIN_STEP_S} s")
        if status != kernels.STATUS_OK:
            raise RuntimeError("integration exceeded the step budget")
    elif method == "rk4":
        y, n_steps = kernels.integrate_rk4(
            y0, ts, phys, drive.kind, const,
            bp_a[0], bp_a[1], bp_a[2], bp_a[3],
            bp_p[0], bp_p[1], bp_p[2], bp_p[3],
            dt,
        )
        n_rejected = 0
    else:
        raise ValueError(f"unknown method: {method!r}")

    la_mm, lp_mm = drive.lengths_mm(ts)
    x = y[:, :3]
    v = y[:, 3:]
    f_fric = _friction_forces(params, v, np.asarray(la_mm), np.asarray(lp_mm))
    tension = tether_k * np.maximum(0.0, x[:, 0] - anchor)

    return Trajectory(
        ts=ts, x=x, v=v,
        la_mm=np.asarray(la_mm), lp_mm=np.asarray(lp_mm),
        f_fric=f_fric, tension=tension,
        freq_hz=drive.freq_hz, n_steps=int(n_steps), n_rejected=int(n_rejected),
        rtol=rel_tol, atol=abs_tol,
    )


def steady_speed(traj: Trajectory, freq_hz: float | None = None) -> float:
    """Mean body speed over the last five actuation cycles, in m/s.

    Requires at least ten cycles of trajectory; raises
    :class:`TrajectoryTooShort` otherwise.
    """
    f = traj.freq_hz if freq_hz is None else freq_hz
    period = 1.0 / f
    if traj.duration < 10.0 * period - 1e-9:
        raise TrajectoryTooShort(
            f"trajectory spans {traj.duration / period:.2f} cycles, need 10"
        )
    t_end = float(traj.ts[-1])
    t_ref = t_end - 5.0 * period
    i_ref = int(np.argmin(np.abs(traj.ts - t_ref)))
    x_ref = float(traj.x[i_ref].mean())
    dt_ref = t_end - float(traj.ts[i_ref])
    return (traj.mean_position(len(traj.ts) - 1) - x_ref) / dt_ref


def valve_to_lengths(timeline_a: ValveTimeline, timeline_p: ValveTimeline,
                     pneu: PneumaticParams, t: float, l0_mm: float = 100.0,
                     freq_hz: float = 0.5) -> tuple[float, float]:
    """Link lengths (mm) at time t under the valve-driven pneumatic model."""
    drive = PneumaticDrive(pneu, l0_mm, timeline_a, timeline_p, freq_hz)
    return drive.lengths_mm(float(t))


def tether_force(
    params: PlantParams,
    drive=None,
    duration: float = 20.0,
    tether_k: float = 200.0,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-9,
) -> Trajectory:
    """Simulate with a unilateral tether anchored at the posterior start.

    The tether pulls the posterior node back with ``tether_k * max(0,
    x_P - x_P(0))``; the returned trajectory's ``tension`` field is the
    force history a load cell at the anchor would record.
    """
    return simulate(params, drive=drive, duration=duration,
                    rel_tol=rel_tol, abs_tol=abs_tol, tether_k=tether_k)
