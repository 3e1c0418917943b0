import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crawlsim import oscillator as osc
from crawlsim.oscillator import (
    CalibrationError,
    CpgParams,
    CpgState,
    DelayLine,
    DegenerateOutput,
    FrequencyOutOfRange,
    InsufficientPeaks,
    PhaseShift,
    Region,
    calibrate,
    classify_region,
    find_peaks,
    measure_frequency,
    run_series,
    step,
)

PARAMS = CpgParams()


class TestStep:
    def test_origin_is_fixed_point(self):
        state = CpgState(a1=0.0, a2=0.0)
        for m in (0.0, 0.2, 1.0):
            nxt = step(state, PARAMS, m)
            assert nxt.a1 == 0.0 and nxt.a2 == 0.0
            assert nxt.t == state.t + 1

    def test_hand_evaluated_map(self):
        # tanh(0.1) = 0.0996680; a1' = 1.4*tanh(0.1), a2' = 1.2*tanh(0.1)
        nxt = step(CpgState(a1=0.1, a2=0.1), CpgParams(w0=1.3, w1=0.1), m=0.0)
        assert nxt.a1 == pytest.approx(0.139535, abs=1e-6)
        assert nxt.a2 == pytest.approx(0.119602, abs=1e-6)

    def test_oscillation_persists_at_paper_weights(self):
        o1, o2, _ = run_series(PARAMS, m=0.05, n_ticks=10_000,
                               state=CpgState(a1=0.01, a2=0.0))
        assert np.all(np.abs(o1) < 1.0) and np.all(np.abs(o2) < 1.0)
        tail = o1[-2000:]
        assert tail.max() - tail.min() > 0.5

    @given(
        a1=st.floats(-50, 50, allow_nan=False),
        a2=st.floats(-50, 50, allow_nan=False),
        m=st.floats(0.0, 1.0),
    )
    def test_outputs_bounded(self, a1, a2, m):
        nxt = step(CpgState(a1=a1, a2=a2), PARAMS, m)
        assert abs(math.tanh(nxt.a1)) < 1.0
        assert abs(math.tanh(nxt.a2)) < 1.0
        assert abs(nxt.a1) <= PARAMS.w0 + abs(PARAMS.w1 + m)


class TestMeasureFrequency:
    def test_synthetic_sinusoid(self):
        t = np.arange(0, 30.0, 1 / 50.0)
        series = np.sin(2 * np.pi * 0.5 * t)
        assert measure_frequency(series, 50.0) == pytest.approx(0.5, abs=0.01)

    def test_constant_zero_series(self):
        with pytest.raises(InsufficientPeaks):
            measure_frequency(np.zeros(5000), 50.0)

    def test_too_few_peaks(self):
        t = np.arange(0, 10.0, 1 / 50.0)  # 5 peaks at 0.5 Hz
        with pytest.raises(InsufficientPeaks):
            measure_frequency(np.sin(2 * np.pi * 0.5 * t), 50.0)

    def test_closed_loop_at_one_hz(self):
        m = calibrate(1.0, PARAMS)
        _, _, state = run_series(PARAMS, m, int(2.0 * PARAMS.tick_rate))
        o1, _, _ = run_series(PARAMS, m, int(20.0 * PARAMS.tick_rate), state)
        assert measure_frequency(o1, PARAMS.tick_rate) == pytest.approx(1.0, abs=0.02)


class TestFindPeaks:
    def test_rejects_low_prominence_ripple(self):
        t = np.arange(0, 20.0, 0.02)
        series = np.sin(2 * np.pi * 0.5 * t) + 0.02 * np.sin(2 * np.pi * 7.3 * t)
        rng = series.max() - series.min()
        peaks = find_peaks(series, 0.1 * rng)
        gaps = np.diff(peaks)
        assert len(peaks) == 10
        assert np.all(np.abs(gaps - 100) <= 3)

    def test_plateau_counts_once(self):
        series = np.array([0.0, 1.0, 1.0, 1.0, 0.0, 2.0, 0.0])
        peaks = find_peaks(series, 0.5)
        assert peaks == [1, 5]


class TestCalibrate:
    def test_out_of_range(self):
        with pytest.raises(FrequencyOutOfRange):
            calibrate(2.0, PARAMS)
        with pytest.raises(FrequencyOutOfRange):
            calibrate(0.05, PARAMS)

    def test_half_hertz_round_trip(self):
        m = calibrate(0.5, PARAMS)
        _, _, state = run_series(PARAMS, m, int(2.0 * PARAMS.tick_rate))
        o1, _, _ = run_series(PARAMS, m, int(40.0 * PARAMS.tick_rate), state)
        assert measure_frequency(o1, PARAMS.tick_rate) == pytest.approx(0.5, abs=0.005)

    def test_monotone_in_frequency(self):
        assert calibrate(1.0, PARAMS) > calibrate(0.25, PARAMS)

    def test_full_band_endpoints(self):
        assert calibrate(0.1, PARAMS) < calibrate(1.5, PARAMS)

    def test_below_oscillation_onset_decays_to_fixed_point(self):
        """Small modulatory inputs produce no cycle at the 50 Hz tick rate;
        the bisection treats that as frequency zero and still brackets."""
        o1, _, _ = run_series(PARAMS, m=0.01, n_ticks=30_000)
        tail = o1[-5000:]
        assert tail.max() - tail.min() < 0.01
        with pytest.raises(InsufficientPeaks):
            measure_frequency(o1[5000:], PARAMS.tick_rate)


class TestClassifyRegion:
    def test_degenerate_origin(self):
        with pytest.raises(DegenerateOutput):
            classify_region(0.0, 0.0)

    def test_quadrants(self):
        assert classify_region(0.5, 0.5) is Region.I
        assert classify_region(0.5, -0.5) is Region.II
        assert classify_region(-0.5, -0.5) is Region.III
        assert classify_region(-0.5, 0.5) is Region.IV
        # boundaries belong to the region being entered (clockwise orbit)
        assert classify_region(0.0, 0.7) is Region.I
        assert classify_region(0.7, 0.0) is Region.II
        assert classify_region(0.0, -0.7) is Region.III
        assert classify_region(-0.7, 0.0) is Region.IV

    @staticmethod
    def _steady_period_labels(f_target=0.5):
        m = calibrate(f_target, PARAMS)
        _, _, state = run_series(PARAMS, m, int(10.0 * PARAMS.tick_rate))
        o1, o2, _ = run_series(PARAMS, m, int(6.0 * PARAMS.tick_rate), state)
        crossings = [i for i in range(1, len(o1)) if o1[i - 1] < 0.0 <= o1[i]]
        i0, i1 = crossings[0], crossings[1]
        return [classify_region(o1[i], o2[i]) for i in range(i0, i1)]

    def test_labels_quarter_the_period(self):
        labels = self._steady_period_labels()
        period = len(labels)
        quarter = period / 4.0
        for region in Region:
            count = sum(1 for r in labels if r is region)
            assert abs(count - quarter) <= 1.0, (region, count, quarter)

    def test_labels_cycle_in_order(self):
        labels = self._steady_period_labels()
        transitions = {(a, b) for a, b in zip(labels, labels[1:]) if a is not b}
        allowed = {(Region.I, Region.II), (Region.II, Region.III),
                   (Region.III, Region.IV), (Region.IV, Region.I)}
        assert transitions <= allowed
        assert len(transitions) == 3  # I opens the window, IV->I wraps it
        assert labels[0] is Region.I


class TestDelayLine:
    def test_zero_shift_is_identity(self):
        line = DelayLine(16)
        line.push(True)
        value, warm = line.delayed(PhaseShift(0, period_s=2.0), 50.0)
        assert value is True and warm

    def test_shift_arithmetic(self):
        # n=2, T=2 s, 50 Hz ticks -> 50 ticks back
        assert PhaseShift(2, period_s=2.0).delay_ticks(50.0) == 50
        line = DelayLine(128)
        for i in range(100):
            line.push(i)
        value, warm = line.delayed(PhaseShift(2, period_s=2.0), 50.0)
        assert warm and value == 49

    def test_underfilled_returns_default(self):
        line = DelayLine(64, default=False)
        line.push(True)
        value, warm = line.delayed_ticks(10)
        assert value is False and not warm

    def test_full_period_shift_is_identity_on_periodic_signal(self):
        period_ticks = 100  # T=2 s at 50 Hz
        signal = [(i // 50) % 2 == 0 for i in range(period_ticks)]
        line = DelayLine(256)
        outputs = []
        for rep in range(3):
            for i, v in enumerate(signal):
                line.push(v)
                if rep == 2:
                    quarter = PhaseShift(1, period_s=2.0).delay_ticks(50.0)
                    delayed4 = line.delayed_ticks(4 * quarter)[0]
                    outputs.append((v, delayed4))
        assert all(now == past for now, past in outputs)

    def test_capacity_guard(self):
        line = DelayLine(8)
        with pytest.raises(ValueError):
            line.delayed_ticks(8)


class TestPhaseShift:
    def test_valid_indices_only(self):
        with pytest.raises(ValueError):
            PhaseShift(4, period_s=2.0)

    def test_delay_seconds(self):
        assert PhaseShift(3, period_s=2.0).delay_s == pytest.approx(1.5)
