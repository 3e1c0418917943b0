import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crawlsim.gait import GaitKind, IDLE, TURN_LEFT, TURN_RIGHT, rectilinear
from crawlsim.teleop import (
    Alert,
    CommandKind,
    TeleopConfig,
    UserCommand,
    arbitrate,
)

FWD = UserCommand(kind=CommandKind.FORWARD, phase_n=1, freq_hz=0.5)
STOP = UserCommand(kind=CommandKind.STOP)
CFG = TeleopConfig()

GRID = list(range(20, 601, 20))
ALL_CMDS = [
    UserCommand(kind=k, phase_n=1, freq_hz=0.5)
    for k in (CommandKind.FORWARD, CommandKind.STEER_LEFT,
              CommandKind.STEER_RIGHT, CommandKind.STOP)
]


class TestSpecExamples:
    def test_full_control(self):
        d = arbitrate(FWD, 300.0, 300.0)
        assert d.effective == rectilinear(1)
        assert d.alert is Alert.NONE

    def test_suggestion_band_positive_delta(self):
        d = arbitrate(FWD, 100.0, 150.0)
        assert d.effective == rectilinear(1)
        assert d.delta_mm == pytest.approx(50.0)
        assert d.alert is Alert.SUGGEST_RIGHT

    def test_override_band(self):
        d = arbitrate(FWD, 40.0, 300.0)
        assert d.effective == TURN_RIGHT
        assert d.delta_mm == pytest.approx(260.0)
        assert d.alert is Alert.OVERRIDE_RIGHT


class TestTruthTable:
    def test_three_interval_rules_on_grid(self):
        """Enumerate the full grid against an independent spelling of the rules."""
        for d_l, d_r in itertools.product(GRID, repeat=2):
            decision = arbitrate(FWD, float(d_l), float(d_r), CFG)
            nearest = min(d_l, d_r)
            delta = d_r - d_l
            if nearest > 200:
                assert decision.alert is Alert.NONE
                assert decision.effective == FWD.mode
            elif nearest > 50:
                assert decision.effective == FWD.mode
                if delta > 0:
                    assert decision.alert is Alert.SUGGEST_RIGHT
                elif delta < 0:
                    assert decision.alert is Alert.SUGGEST_LEFT
                else:
                    assert decision.alert is Alert.NONE
            else:
                assert decision.alert.is_override
                if delta > 0:
                    assert decision.effective == TURN_RIGHT
                elif delta < 0:
                    assert decision.effective == TURN_LEFT
                else:
                    assert decision.effective == TURN_LEFT  # configured tie side

    def test_band_boundaries(self):
        # exactly 200 mm falls in the suggestion band
        assert arbitrate(FWD, 200.0, 600.0).alert is Alert.SUGGEST_RIGHT
        # exactly 50 mm falls in the override band
        assert arbitrate(FWD, 50.0, 600.0).alert is Alert.OVERRIDE_RIGHT

    def test_override_invariant(self):
        for d_l, d_r in itertools.product(GRID, repeat=2):
            decision = arbitrate(FWD, float(d_l), float(d_r), CFG)
            if decision.alert.is_override:
                assert min(d_l, d_r) <= CFG.override_mm


class TestMirrorSymmetry:
    def test_exact_mirror_on_grid(self):
        """Mirroring command, readings and tie configuration mirrors the decision."""
        mirrored_cfg = CFG.mirrored()
        for cmd in ALL_CMDS:
            for d_l, d_r in itertools.product(GRID, repeat=2):
                base = arbitrate(cmd, float(d_l), float(d_r), CFG)
                flipped = arbitrate(cmd.mirrored(), float(d_r), float(d_l),
                                    mirrored_cfg)
                assert flipped == base.mirrored(), (cmd.kind, d_l, d_r)

    def test_mirror_without_config_flip_off_ties(self):
        for cmd in ALL_CMDS:
            for d_l, d_r in itertools.product(GRID, repeat=2):
                if d_l == d_r:
                    continue
                base = arbitrate(cmd, float(d_l), float(d_r), CFG)
                flipped = arbitrate(cmd.mirrored(), float(d_r), float(d_l), CFG)
                assert flipped == base.mirrored()


class TestStopSemantics:
    def test_stop_not_overridden_above_override_band(self):
        for d_l, d_r in itertools.product(GRID, repeat=2):
            if min(d_l, d_r) > 50:
                decision = arbitrate(STOP, float(d_l), float(d_r), CFG)
                assert decision.effective == IDLE

    def test_stop_overridden_in_override_band(self):
        decision = arbitrate(STOP, 30.0, 300.0, CFG)
        assert decision.effective == TURN_RIGHT

    def test_stop_override_configurable_off(self):
        cfg = TeleopConfig(override_stop=False)
        decision = arbitrate(STOP, 30.0, 300.0, cfg)
        assert decision.effective == IDLE
        assert decision.alert is Alert.SUGGEST_RIGHT


class TestPurity:
    @given(
        d_l=st.floats(10.0, 600.0),
        d_r=st.floats(10.0, 600.0),
    )
    @settings(max_examples=100)
    def test_repeatable(self, d_l, d_r):
        a = arbitrate(FWD, d_l, d_r, CFG)
        b = arbitrate(FWD, d_l, d_r, CFG)
        assert a == b
        assert a.delta_mm == d_r - d_l


class TestCommandValidation:
    def test_frequency_range(self):
        with pytest.raises(ValueError):
            UserCommand(kind=CommandKind.FORWARD, freq_hz=2.0)

    def test_phase_range(self):
        with pytest.raises(ValueError):
            UserCommand(kind=CommandKind.FORWARD, phase_n=7)

    def test_mode_mapping(self):
        assert UserCommand(kind=CommandKind.FORWARD, phase_n=2).mode == rectilinear(2)
        assert UserCommand(kind=CommandKind.STEER_LEFT).mode == TURN_LEFT
        assert UserCommand(kind=CommandKind.STEER_RIGHT).mode == TURN_RIGHT
        assert UserCommand(kind=CommandKind.STOP).mode.kind is GaitKind.IDLE


class TestConfigValidation:
    def test_threshold_ordering(self):
        with pytest.raises(ValueError):
            TeleopConfig(full_control_mm=40.0, override_mm=50.0)

    def test_tie_side_values(self):
        with pytest.raises(ValueError):
            TeleopConfig(tie_turn="straight")
