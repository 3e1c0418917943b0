"""Discrete-time two-neuron oscillator driving the crawler's gait.

The map is

    a1' =  w0*tanh(a1) + (w1 + m)*tanh(a2)
    a2' = -(w1 + m)*tanh(a1) + w0*tanh(a2)

with outputs ``o_i = tanh(a_i)``. The modulatory input ``m`` sets the
oscillation frequency; ``calibrate`` inverts that relationship by bisection
on the measured frequency. One output period is split into four temporal
regions (I..IV) used to gate valve on/off windows, and ``DelayLine``
provides the quarter-period-delayed copies of those signals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache

import numpy as np

F_MIN_HZ = 0.1
F_MAX_HZ = 1.5
WARMUP_S = 2.0

_M_LO = 1e-4
_M_HI = 1.0
_M_TOL = 1e-5
_PROMINENCE_FRACTION = 0.1


class InsufficientPeaks(RuntimeError):
    """Too few peaks in the series to estimate a frequency."""


class FrequencyOutOfRange(ValueError):
    """Requested frequency outside the supported [0.1, 1.5] Hz band."""


class CalibrationError(RuntimeError):
    """Bisection on the modulatory input failed to reach the target."""


class DegenerateOutput(ValueError):
    """Both oscillator outputs are exactly zero; no region is defined."""


@dataclass(frozen=True)
class CpgParams:
    """Static oscillator weights and the control-loop tick rate."""

    w0: float = 1.3
    w1: float = 0.1
    tick_rate: float = 50.0

    def __post_init__(self):
        if self.w0 <= 0:
            raise ValueError("w0 must be positive")
        if self.tick_rate <= 0:
            raise ValueError("tick_rate must be positive")


@dataclass(frozen=True)
class CpgState:
    a1: float = 0.01
    a2: float = 0.0
    t: int = 0

    @property
    def o1(self) -> float:
        return math.tanh(self.a1)

    @property
    def o2(self) -> float:
        return math.tanh(self.a2)


class Region(IntEnum):
    I = 1
    II = 2
    III = 3
    IV = 4


@dataclass(frozen=True)
class PhaseShift:
    """Quarter-period delay: n*T/4 seconds with n in {0, 1, 2, 3}."""

    n: int
    period_s: float

    def __post_init__(self):
        if self.n not in (0, 1, 2, 3):
            raise ValueError("phase shift index must be in {0, 1, 2, 3}")
        if self.period_s <= 0:
            raise ValueError("period must be positive")

    @property
    def delay_s(self) -> float:
        return self.n * self.period_s / 4.0

    def delay_ticks(self, tick_rate: float) -> int:
        return int(self.delay_s * tick_rate)


def step(state: CpgState, params: CpgParams, m: float) -> CpgState:
    """Advance the oscillator one tick."""
    o1 = math.tanh(state.a1)
    o2 = math.tanh(state.a2)
    c = params.w1 + m
    return CpgState(
        a1=params.w0 * o1 + c * o2,
        a2=-c * o1 + params.w0 * o2,
        t=state.t + 1,
    )


def run_series(
    params: CpgParams, m: float, n_ticks: int, state: CpgState | None = None
) -> tuple[np.ndarray, np.ndarray, CpgState]:
    """Iterate the map ``n_ticks`` times; returns (o1, o2, final state)."""
    if state is None:
        state = CpgState()
    a1, a2, t = state.a1, state.a2, state.t
    w0 = params.w0
    c = params.w1 + m
    o1s = np.empty(n_ticks)
    o2s = np.empty(n_ticks)
    tanh = math.tanh
    for i in range(n_ticks):
        o1 = tanh(a1)
        o2 = tanh(a2)
        a1 = w0 * o1 + c * o2
        a2 = -c * o1 + w0 * o2
        o1s[i] = tanh(a1)
        o2s[i] = tanh(a2)
    return o1s, o2s, CpgState(a1=a1, a2=a2, t=t + n_ticks)


def find_peaks(series: np.ndarray, min_prominence: float) -> list[int]:
    """Indices of local maxima with at least ``min_prominence``.

    Prominence of a peak is its height above the higher of the two minima
    separating it from the nearest greater values on each side (or the
    array edges).
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    peaks = []
    i = 1
    while i < n - 1:
        if x[i] > x[i - 1]:
            j = i
            while j + 1 < n and x[j + 1] == x[i]:
                j += 1
            if j + 1 < n and x[j + 1] < x[i]:
                peaks.append(i)
            i = j + 1
        else:
            i += 1

    kept = []
    for p in peaks:
        left_min = x[p]
        j = p - 1
        while j >= 0 and x[j] <= x[p]:
            if x[j] < left_min:
                left_min = x[j]
            j -= 1
        right_min = x[p]
        j = p + 1
        while j < n and x[j] <= x[p]:
            if x[j] < right_min:
                right_min = x[j]
            j += 1
        if x[p] - max(left_min, right_min) >= min_prominence:
            kept.append(p)
    return kept


def measure_frequency(series: np.ndarray, tick_rate: float) -> float:
    """Frequency from the mean gap of the last ten inter-peak intervals.

    Raises :class:`InsufficientPeaks` when fewer than 11 peaks are found.
    """
    x = np.asarray(series, dtype=float)
    rng = float(x.max() - x.min()) if len(x) else 0.0
    if rng <= 0.0:
        raise InsufficientPeaks("series has no detectable peaks")
    peaks = find_peaks(x, _PROMINENCE_FRACTION * rng)
    if len(peaks) < 11:
        raise InsufficientPeaks(f"found {len(peaks)} peaks, need at least 11")
    gaps = np.diff(peaks[-11:])
    return tick_rate / float(gaps.mean())


def _measure_at(params: CpgParams, m: float, f_hint: float) -> float:
    """Steady-state frequency at modulatory input ``m``; 0.0 if no cycle shows."""
    window_s = max(30.0, 18.0 / f_hint)
    n_warm = int(WARMUP_S * params.tick_rate)
    n_meas = int(window_s * params.tick_rate)
    o1, _, state = run_series(params, m, n_warm)
    o1, _, _ = run_series(params, m, n_meas, state)
    try:
        return measure_frequency(o1, params.tick_rate)
    except InsufficientPeaks:
        return 0.0


@lru_cache(maxsize=256)
def _calibrate_cached(f_target: float, w0: float, w1: float, tick_rate: float) -> float:
    params = CpgParams(w0=w0, w1=w1, tick_rate=tick_rate)
    m_lo, m_hi = _M_LO, _M_HI
    f_lo = _measure_at(params, m_lo, f_target)
    f_hi = _measure_at(params, m_hi, f_target)
    if not (f_lo <= f_target <= f_hi):
        raise CalibrationError(
            f"target {f_target} Hz outside achievable range [{f_lo:.3f}, {f_hi:.3f}] Hz"
        )
    while m_hi - m_lo > _M_TOL:
        mid = 0.5 * (m_lo + m_hi)
        if _measure_at(params, mid, f_target) < f_target:
            m_lo = mid
        else:
            m_hi = mid
    m = 0.5 * (m_lo + m_hi)
    f_check = _measure_at(params, m, f_target)
    if abs(f_check - f_target) > 0.01 * f_target:
        raise CalibrationError(
            f"bisection landed at {f_check:.4f} Hz for target {f_target} Hz"
        )
    return m


def calibrate(f_target: float, params: CpgParams) -> float:
    """Modulatory input whose measured closed-loop frequency is ``f_target``.

    Raises :class:`FrequencyOutOfRange` outside [0.1, 1.5] Hz and
    :class:`CalibrationError` if bisection cannot land within 1 percent.
    """
    if not (F_MIN_HZ <= f_target <= F_MAX_HZ):
        raise FrequencyOutOfRange(
            f"{f_target} Hz outside [{F_MIN_HZ}, {F_MAX_HZ}] Hz"
        )
    return _calibrate_cached(float(f_target), params.w0, params.w1, params.tick_rate)


def classify_region(o1: float, o2: float) -> Region:
    """Sign-quadrant of the outputs, labeled in temporal order.

    Labels are anchored at the positive-going zero crossing of ``o1``:
    region I opens there and I..IV are visited in that order over one
    period. Boundary samples belong to the region being entered.
    """
    if o1 == 0.0 and o2 == 0.0:
        raise DegenerateOutput("both outputs are zero")
    if o1 >= 0.0 and o2 > 0.0:
        return Region.I
    if o1 > 0.0 and o2 <= 0.0:
        return Region.II
    if o1 <= 0.0 and o2 < 0.0:
        return Region.III
    return Region.IV


class DelayLine:
    """Ring buffer giving access to samples a fixed number of ticks back.

    Reads before enough history has accumulated return the ``default``
    value with ``warm=False`` so callers can hold outputs off during
    warm-up.
    """

    def __init__(self, capacity: int, default=False):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        self._buf = [default] * capacity
        self._default = default
        self._n = 0
        self._head = 0

    def push(self, value) -> None:
        self._buf[self._head] = value
        self._head = (self._head + 1) % len(self._buf)
        self._n = min(self._n + 1, len(self._buf))

    def delayed_ticks(self, ticks: int):
        """Sample recorded ``ticks`` ago (0 = most recent push) plus warm flag."""
        if ticks < 0 or ticks >= len(self._buf):
            raise ValueError(f"delay of {ticks} ticks exceeds capacity {len(self._buf)}")
        if self._n == 0 or ticks > self._n - 1:
            return self._default, False
        idx = (self._head - 1 - ticks) % len(self._buf)
        return self._buf[idx], True

    def delayed(self, shift: PhaseShift, tick_rate: float):
        """Sample from ``floor(n*T/4*tick_rate)`` ticks ago plus warm flag."""
        return self.delayed_ticks(shift.delay_ticks(tick_rate))
