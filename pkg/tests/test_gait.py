import itertools

import pytest

from crawlsim import gait
from crawlsim.gait import (
    CHAMBERS,
    GaitKind,
    HALF_PERIOD,
    IDLE,
    LocomotionMode,
    QUARTER_PERIOD,
    TURN_LEFT,
    TURN_RIGHT,
    WINDING1_LEFT,
    WINDING1_RIGHT,
    WINDING2_LEFT,
    WINDING2_RIGHT,
    ValveCommand,
    plan,
    rectilinear,
    valve_table,
)
from crawlsim.oscillator import FrequencyOutOfRange, Region

ALL_REGIONS = list(Region)
ALL_MODES = [rectilinear(n) for n in range(4)] + [
    TURN_LEFT, TURN_RIGHT, WINDING1_LEFT, WINDING1_RIGHT,
    WINDING2_LEFT, WINDING2_RIGHT, IDLE,
]


class TestValveTable:
    def test_rectilinear_all_on(self):
        cmd = valve_table(rectilinear(1), Region.I, Region.I)
        assert cmd == ValveCommand(c_ar=True, c_al=True, c_pr=True, c_pl=True)

    def test_rectilinear_all_off(self):
        cmd = valve_table(rectilinear(1), Region.III, Region.IV)
        assert cmd == ValveCommand()

    def test_turn_right_example(self):
        cmd = valve_table(TURN_RIGHT, Region.I, Region.I)
        assert (cmd.c_ar, cmd.c_pl, cmd.c_al, cmd.c_pr) == (True, True, True, True)

    @pytest.mark.parametrize("r0", ALL_REGIONS)
    @pytest.mark.parametrize("rs", ALL_REGIONS)
    def test_rectilinear_table(self, r0, rs):
        for n in range(4):
            cmd = valve_table(rectilinear(n), r0, rs)
            assert cmd.c_ar == cmd.c_al == (r0 in HALF_PERIOD)
            assert cmd.c_pr == cmd.c_pl == (rs in HALF_PERIOD)

    @pytest.mark.parametrize("r0", ALL_REGIONS)
    @pytest.mark.parametrize("rs", ALL_REGIONS)
    def test_turning_tables(self, r0, rs):
        right = valve_table(TURN_RIGHT, r0, rs)
        assert right.c_ar == right.c_pl == (r0 in HALF_PERIOD)
        assert right.c_al == right.c_pr == (rs in QUARTER_PERIOD)
        left = valve_table(TURN_LEFT, r0, rs)
        assert left.c_al == left.c_pr == (r0 in HALF_PERIOD)
        assert left.c_ar == left.c_pl == (rs in QUARTER_PERIOD)

    @pytest.mark.parametrize("r0", ALL_REGIONS)
    @pytest.mark.parametrize("rs", ALL_REGIONS)
    def test_winding_tables(self, r0, rs):
        # Winding I: synchronized posterior pair plus one anterior chamber.
        w1r = valve_table(WINDING1_RIGHT, r0, rs)
        assert w1r.c_pr == w1r.c_pl == (r0 in HALF_PERIOD)
        assert w1r.c_ar == (rs in HALF_PERIOD)
        assert w1r.c_al is False
        # Winding II: synchronized anterior pair plus one posterior chamber;
        # steers opposite the activated posterior chamber.
        w2l = valve_table(WINDING2_LEFT, r0, rs)
        assert w2l.c_ar == w2l.c_al == (r0 in HALF_PERIOD)
        assert w2l.c_pr == (rs in HALF_PERIOD)
        assert w2l.c_pl is False

    def test_idle_all_off(self):
        for r0, rs in itertools.product(ALL_REGIONS, repeat=2):
            assert valve_table(IDLE, r0, rs) == ValveCommand()

    @pytest.mark.parametrize("mode", ALL_MODES)
    def test_mirror_symmetry(self, mode):
        for r0, rs in itertools.product(ALL_REGIONS, repeat=2):
            mirrored = valve_table(mode.mirrored(), r0, rs)
            assert valve_table(mode, r0, rs).swap_lr() == mirrored

    def test_rectilinear_zero_shift_synchronizes_all(self):
        for r in ALL_REGIONS:
            cmd = valve_table(rectilinear(0), r, r)
            assert cmd.c_ar == cmd.c_al == cmd.c_pr == cmd.c_pl


class TestShiftIndex:
    def test_mode_shift_indices(self):
        assert rectilinear(2).shift_index == 2
        assert TURN_LEFT.shift_index == 2
        assert TURN_RIGHT.shift_index == 2
        assert WINDING1_LEFT.shift_index == 1
        assert WINDING2_RIGHT.shift_index == 1
        assert IDLE.shift_index == 0

    def test_phase_index_validated(self):
        with pytest.raises(ValueError):
            LocomotionMode(GaitKind.RECTILINEAR, 5)


class TestPlan:
    def test_rectilinear_zero_shift(self):
        program = plan(rectilinear(0), 0.5)
        for chamber in CHAMBERS:
            regions, shift = program.chambers[chamber]
            assert regions == HALF_PERIOD
            assert shift == 0
        assert program.m > 0

    def test_idle_program_empty(self):
        program = plan(IDLE, 0.5)
        for chamber in CHAMBERS:
            regions, _ = program.chambers[chamber]
            assert regions == frozenset()

    def test_turn_left_assignments(self):
        program = plan(TURN_LEFT, 0.5)
        assert program.chambers["al"] == (HALF_PERIOD, 0)
        assert program.chambers["pr"] == (HALF_PERIOD, 0)
        assert program.chambers["ar"] == (QUARTER_PERIOD, 2)
        assert program.chambers["pl"] == (QUARTER_PERIOD, 2)

    def test_calibration_errors_propagate(self):
        with pytest.raises(FrequencyOutOfRange):
            plan(rectilinear(1), 3.0)

    def test_program_agrees_with_valve_table(self):
        for mode in ALL_MODES:
            program = plan(mode, 0.5)
            for r0, rs in itertools.product(ALL_REGIONS, repeat=2):
                if mode.shift_index == 0 and rs is not r0:
                    continue  # a zero-shift delayed cycle always equals r0
                cmd = valve_table(mode, r0, rs)
                for chamber, on in (("ar", cmd.c_ar), ("al", cmd.c_al),
                                    ("pr", cmd.c_pr), ("pl", cmd.c_pl)):
                    regions, shift = program.chambers[chamber]
                    region_seen = rs if shift else r0
                    assert program.chamber_on(chamber, region_seen) == on, (
                        mode, chamber, r0, rs)


class TestDutyCycle:
    def test_half_and_quarter_windows(self):
        """Chamber on-times over one steady CPG period match the region sets."""
        from crawlsim.oscillator import CpgParams, calibrate, classify_region, run_series

        params = CpgParams()
        m = calibrate(0.5, params)
        _, _, state = run_series(params, m, int(10 * params.tick_rate))
        o1, o2, _ = run_series(params, m, int(6 * params.tick_rate), state)
        crossings = [i for i in range(1, len(o1)) if o1[i - 1] < 0.0 <= o1[i]]
        i0, i1 = crossings[0], crossings[1]
        labels = [classify_region(o1[i], o2[i]) for i in range(i0, i1)]
        period = len(labels)

        half_on = sum(1 for r in labels if r in HALF_PERIOD)
        quarter_on = sum(1 for r in labels if r in QUARTER_PERIOD)
        assert abs(half_on - period / 2) <= 1
        assert abs(quarter_on - period / 4) <= 1
