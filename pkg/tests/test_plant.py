import csv
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crawlsim import plant as pm
from crawlsim.plant import (
    AnalyticDrive,
    PlantParams,
    PlantState,
    PneumaticDrive,
    PneumaticParams,
    StiffnessError,
    TrajectoryTooShort,
    ValveTimeline,
    friction_coeffs,
    friction_force,
    link_lengths,
    rhs,
    simulate,
    steady_speed,
    tether_force,
    valve_to_lengths,
)

P = PlantParams()


class TestLinkLengths:
    def test_undeformed_at_zero(self):
        assert link_lengths(0.0, P) == (pytest.approx(100.0), pytest.approx(100.0))

    def test_full_extension_at_half_period(self):
        la, lp = link_lengths(1.0, P)  # f=0.5 Hz, cos(pi) = -1
        assert la == pytest.approx(130.0)
        assert lp == pytest.approx(130.0)

    def test_quarter_shift_at_zero(self):
        la, lp = link_lengths(0.0, P.with_shift_index(1))
        assert la == pytest.approx(100.0)
        assert lp == pytest.approx(115.0)  # cos(pi/2) = 0

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            link_lengths(-0.1, P)


class TestFrictionCoeffs:
    def test_folded_endpoint(self):
        assert friction_coeffs(100.0, P) == (pytest.approx(0.15), pytest.approx(0.50))

    def test_extended_endpoint(self):
        assert friction_coeffs(130.0, P) == (pytest.approx(0.20), pytest.approx(0.20))

    def test_midpoint_linearity(self):
        assert friction_coeffs(115.0, P) == (pytest.approx(0.175), pytest.approx(0.35))

    @given(length=st.floats(0.0, 500.0, allow_nan=False))
    def test_clamped_to_endpoint_hull(self, length):
        mu_f, mu_b = friction_coeffs(length, P)
        assert min(P.mu_f1, P.mu_f2) <= mu_f <= max(P.mu_f1, P.mu_f2)
        assert min(P.mu_b1, P.mu_b2) <= mu_b <= max(P.mu_b1, P.mu_b2)


class TestFrictionForce:
    def test_zero_velocity(self):
        assert friction_force(0.06, 0.15, 0.5, 0.0, P) == 0.0

    def test_saturated_forward(self):
        f = friction_force(0.06, 0.15, 0.5, 1.0, P)
        assert f == pytest.approx(-0.0883, abs=1e-4)

    def test_antisymmetry_ratio(self):
        for v in (0.2, 0.5, 1.0):
            forward = friction_force(0.06, 0.15, 0.5, v, P)
            backward = friction_force(0.06, 0.15, 0.5, -v, P)
            assert abs(backward) / abs(forward) == pytest.approx(0.5 / 0.15, rel=1e-6)


class TestRhs:
    def test_zero_force_configuration(self):
        state = PlantState(x_p=0.0, x_m=0.1, x_a=0.2)
        derivs = rhs(state, 0.0, P)
        assert derivs == (0.0,) * 6

    def test_unit_stretch_force(self):
        # x_M - x_P exceeds L_P by 10 mm at k = 100 N/m: 1 N pulling P forward.
        state = PlantState(x_p=0.0, x_m=0.11, x_a=0.21)
        dxp, dxm, dxa, ap, am, aa = rhs(state, 0.0, P)
        assert ap == pytest.approx(1.0 / 0.06)
        assert am == pytest.approx(-1.0 / 0.06)
        assert aa == pytest.approx(0.0)

    @given(
        xs=st.lists(st.floats(-0.05, 0.05), min_size=3, max_size=3),
        vs=st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
        t=st.floats(0.0, 4.0),
    )
    @settings(max_examples=50)
    def test_interaction_forces_cancel(self, xs, vs, t):
        """Internal spring forces contribute nothing to total momentum."""
        frictionless = replace(P, mu_f1=0.0, mu_f2=0.0, mu_b1=0.0, mu_b2=0.0)
        state = PlantState(x_p=xs[0], x_m=0.1 + xs[1], x_a=0.2 + xs[2],
                           v_p=vs[0], v_m=vs[1], v_a=vs[2])
        _, _, _, ap, am, aa = rhs(state, t, frictionless)
        total = frictionless.m_p * ap + frictionless.m_m * am + frictionless.m_a * aa
        assert abs(total) < 1e-9


class TestSimulate:
    def test_reference_run_covers_ten_cycles(self, phase_trajectories):
        traj = phase_trajectories[0]
        assert traj.ts[-1] == pytest.approx(20.0)
        assert traj.la_mm.max() == pytest.approx(130.0, abs=0.01)
        assert traj.la_mm.min() == pytest.approx(100.0, abs=0.01)

    def test_disconnected_nodes_stay_put(self):
        params = replace(P, k=1e-9)
        traj = simulate(params, duration=20.0)
        rest = PlantState.rest(params)
        assert np.max(np.abs(traj.x - [rest.x_p, rest.x_m, rest.x_a])) < 1e-6
        assert abs(steady_speed(traj)) < 1e-8

    def test_adaptive_matches_rk4_oracle(self, fig_params):
        params = fig_params.with_shift_index(1)
        adaptive = simulate(params, duration=20.0)
        oracle = simulate(params, duration=20.0, method="rk4", dt=1e-4)
        assert np.max(np.abs(adaptive.x - oracle.x)) < 0.1e-3

    def test_tolerance_tightening_stable(self, fig_params, phase_trajectories):
        v_ref = steady_speed(phase_trajectories[1])
        tight = simulate(fig_params.with_shift_index(1), duration=20.0, rel_tol=1e-7)
        assert steady_speed(tight) == pytest.approx(v_ref, rel=0.01)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            simulate(P, duration=-1.0)
        with pytest.raises(ValueError):
            simulate(P, duration=1.0, rel_tol=0.0)
        with pytest.raises(ValueError):
            simulate(P, duration=1.0, method="euler")

    def test_stiffness_error_surfaces(self, monkeypatch):
        monkeypatch.setattr(pm, "MIN_STEP_S", 1.0)
        with pytest.raises(StiffnessError):
            simulate(P, duration=20.0)

    def test_energy_conserved_without_friction(self):
        """Constant link lengths, no friction: mechanical energy is conserved.

        The drift stays within the per-step tolerance accumulated over the
        run and shrinks by orders of magnitude when the tolerance tightens.
        """
        params = replace(P, mu_f1=0.0, mu_f2=0.0, mu_b1=0.0, mu_b2=0.0,
                         amp_mm=1e-9)
        start = PlantState(x_p=0.0, x_m=0.105, x_a=0.2)

        def max_drift(rel_tol):
            traj = simulate(params, duration=20.0, initial_state=start,
                            rel_tol=rel_tol)
            l0 = params.l0_m
            kin = 0.5 * (params.m_p * traj.v[:, 0] ** 2
                         + params.m_m * traj.v[:, 1] ** 2
                         + params.m_a * traj.v[:, 2] ** 2)
            pot = 0.5 * params.k * ((traj.x[:, 1] - traj.x[:, 0] - l0) ** 2
                                    + (traj.x[:, 2] - traj.x[:, 1] - l0) ** 2)
            e = kin + pot
            return float(np.max(np.abs(e - e[0])) / e[0]), traj.n_steps

        drift_loose, n_steps = max_drift(1e-6)
        assert drift_loose < 2.0 * n_steps * 1e-6
        drift_tight, _ = max_drift(1e-8)
        assert drift_tight < drift_loose / 10.0

    def test_translation_invariance(self):
        params = P.with_shift_index(1)
        base = simulate(params, duration=4.0, method="rk4", dt=1e-3)
        delta = 1.0
        rest = PlantState.rest(params)
        shifted_start = PlantState(x_p=rest.x_p + delta, x_m=rest.x_m + delta,
                                   x_a=rest.x_a + delta)
        shifted = simulate(params, duration=4.0, method="rk4", dt=1e-3,
                           initial_state=shifted_start)
        assert np.max(np.abs(shifted.x - base.x - delta)) < 1e-9

    def test_mirror_antisymmetry(self, fig_params, phase_trajectories):
        v_fwd = steady_speed(phase_trajectories[0])
        mirrored = replace(fig_params, mu_f1=fig_params.mu_b1, mu_f2=fig_params.mu_b2,
                           mu_b1=fig_params.mu_f1, mu_b2=fig_params.mu_f2)
        v_mir = steady_speed(simulate(mirrored, duration=20.0))
        assert v_mir == pytest.approx(-v_fwd, rel=0.01)

    def test_state_accessor(self, phase_trajectories):
        traj = phase_trajectories[0]
        state = traj.state_at(0)
        assert state == PlantState(x_p=0.0, x_m=0.1, x_a=0.2, t=0.0)
        last = traj.state_at(len(traj.ts) - 1)
        assert last.t == pytest.approx(20.0)

    def test_csv_export(self, tmp_path, phase_trajectories):
        path = tmp_path / "traj.csv"
        phase_trajectories[0].to_csv(path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "x_P", "x_M", "x_A", "v_P", "v_M", "v_A",
                           "L_A", "L_P", "F_fric_P", "F_fric_M", "F_fric_A",
                           "tension"]
        assert len(rows) == len(phase_trajectories[0].ts) + 1
        assert float(rows[1][0]) == 0.0


class TestSteadySpeed:
    def test_phase_ordering(self, phase_trajectories):
        speeds = {n: steady_speed(traj) for n, traj in phase_trajectories.items()}
        assert min(speeds[0], speeds[1]) > max(speeds[2], speeds[3])

    def test_symmetric_friction_null(self, fig_params):
        symmetric = replace(fig_params, mu_b1=fig_params.mu_f1, mu_b2=fig_params.mu_f2)
        traj = simulate(symmetric, duration=20.0)
        bound = 1e-3 * fig_params.l0_m * fig_params.freq_hz
        assert abs(steady_speed(traj)) < bound

    def test_too_short(self, fig_params):
        traj = simulate(fig_params, duration=8.0)
        with pytest.raises(TrajectoryTooShort):
            steady_speed(traj)


class TestPneumatics:
    def test_closed_valves_stay_at_rest(self):
        pneu = PneumaticParams()
        timeline = ValveTimeline([])
        la, lp = valve_to_lengths(timeline, timeline, pneu, t=5.0)
        assert la == pytest.approx(100.0)
        assert lp == pytest.approx(100.0)

    def test_step_response(self):
        pneu = PneumaticParams()
        drive = PneumaticDrive(pneu, 100.0, ValveTimeline([(0.0, True)]),
                               ValveTimeline([]), freq_hz=0.5)
        for t in (0.2, 0.5, 1.0, 2.0):
            (p, _), _ = drive.segment_state(t)
            assert p == pytest.approx(pneu.p_max * (1 - math.exp(-t / pneu.tau_fill)),
                                      rel=1e-9)
        (_, frac), _ = drive.segment_state(5 * pneu.tau_fill)
        expected = (pneu.p_max * (1 - math.exp(-5)) - pneu.p_i) / (pneu.p_max - pneu.p_i)
        assert frac == pytest.approx(expected, abs=1e-6)
        assert frac > 0.98

    def test_no_elongation_below_inflation_threshold(self):
        pneu = PneumaticParams()
        drive = PneumaticDrive(pneu, 100.0, ValveTimeline([(0.0, True)]),
                               ValveTimeline([]), freq_hz=0.5)
        # pressure rises through 55 kPa before reaching p_i = 60 kPa
        t55 = -pneu.tau_fill * math.log(1 - 55.0 / pneu.p_max)
        (p, frac), _ = drive.segment_state(t55)
        assert p == pytest.approx(55.0, rel=1e-9)
        assert frac == 0.0

    def test_hysteresis_holds_until_deflation_threshold(self):
        pneu = PneumaticParams()
        # fill completely for 5 s, then vent
        drive = PneumaticDrive(pneu, 100.0,
                               ValveTimeline([(0.0, True), (5.0, False)]),
                               ValveTimeline([]), freq_hz=0.5)
        (p5, frac5), _ = drive.segment_state(5.0)
        assert frac5 == pytest.approx(1.0, abs=1e-4)
        # above p_d the fraction holds
        t_hold = 5.0 + pneu.tau_vent * math.log(p5 / (pneu.p_d + 5.0))
        (p, frac), _ = drive.segment_state(t_hold)
        assert p > pneu.p_d
        assert frac == pytest.approx(frac5)
        # below p_d it ramps toward zero with pressure
        t_low = 5.0 + pneu.tau_vent * math.log(p5 / 10.0)
        (p, frac), _ = drive.segment_state(t_low)
        assert p == pytest.approx(10.0, rel=1e-9)
        assert frac == pytest.approx(frac5 * 10.0 / pneu.p_d, rel=1e-6)

    def test_continuity_across_valve_events(self):
        pneu = PneumaticParams()
        f = 1.0
        drive = PneumaticDrive(pneu, 100.0,
                               ValveTimeline.square_wave(f, 10.0),
                               ValveTimeline.square_wave(f, 10.0, offset_s=0.25),
                               f)
        ts = np.linspace(0.0, 4.0, 40001)
        la, lp = drive.lengths_mm(ts)
        assert np.max(np.abs(np.diff(la))) < 0.05
        assert np.max(np.abs(np.diff(lp))) < 0.05

    def test_threshold_ordering_validated(self):
        with pytest.raises(ValueError):
            PneumaticParams(p_d=70.0)  # p_d above p_i

    def test_timeline_must_be_ordered(self):
        with pytest.raises(ValueError):
            ValveTimeline([(1.0, True), (0.5, False)])


class TestTether:
    def test_no_drive_no_tension(self, fig_params):
        still = replace(fig_params, amp_mm=1e-9)
        traj = tether_force(still, duration=20.0, tether_k=200.0)
        assert np.max(traj.tension) < 1e-8

    def test_zero_stiffness_matches_free_run(self, fig_params, phase_trajectories):
        traj = tether_force(fig_params.with_shift_index(0), duration=20.0,
                            tether_k=0.0)
        assert np.array_equal(traj.x, phase_trajectories[0].x)
        assert np.all(traj.tension == 0.0)

    def test_tension_is_unilateral(self, fig_params):
        traj = tether_force(fig_params.with_shift_index(1), duration=20.0,
                            tether_k=200.0)
        assert np.all(traj.tension >= 0.0)
        assert traj.tension.max() > 0.0
