"""
Unit Tests for the Operator Model
=================================
"""

import math
import pytest
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.geom import GeometryDomainError, Pose, WorkplaceLayout
from src.interface import ControlSignals, Direction, FeedbackFrame
from src.interface.channels import CONTROL_BOUNDS
from src.operator_model import (
    ALLOWED_TRANSITIONS, EstimatorState, OperatorConfig, Phase, PhaseTimeoutError,
    approach_coordinates, estimate_height_at_arrival, estimator_update, is_monotone,
    operator_init, operator_tick, predicted_reversing_pose, reversal_verdict,
    windowed_slope,
)
from src.operator_model import rules
from src.plant import minimum_turning_radius

R_MIN = minimum_turning_radius(math.radians(35.0), 1.5, 1.5)


def frame(x: float, z: float, theta: float, v: float = 0.0, h: float = 0.0,
          phi: float = 0.0, gamma: float = 0.0,
          direction: Direction = Direction.NEUTRAL) -> FeedbackFrame:
    return FeedbackFrame(pose=Pose(x, z, theta), v=v, engine=800.0, h=h, phi=phi,
                         gamma=gamma, direction=direction)


def assert_valid(u: ControlSignals) -> None:
    for name, (lower, upper) in CONTROL_BOUNDS.items():
        assert lower <= getattr(u, name) <= upper
    assert isinstance(u.direction, Direction)


@pytest.fixture
def config():
    return OperatorConfig()


@pytest.fixture
def fresh(config):
    return operator_init(config)


def in_phase(state, phase: Phase, entry: float = 0.0, **changes):
    return replace(state, phase=phase, phase_entry_time=entry, **changes)


class TestEstimator:
    """Tests for the lifting/driving ratio estimator"""

    def test_linear_lift_gives_slope(self):
        est = EstimatorState(window=1.0, min_samples=10)
        for k in range(20):
            s = 0.05 * k
            est = estimator_update(est, 0.01 * k, s, 0.5 + 0.2 * s, lifting=True)
        assert est.slope == pytest.approx(0.2, rel=1e-9)
        assert est.ready

    def test_slope_zero_until_enough_samples(self):
        est = EstimatorState(window=1.0, min_samples=10)
        for k in range(5):
            est = estimator_update(est, 0.01 * k, 0.05 * k, 0.01 * k, lifting=True)
        assert est.slope == 0.0
        assert not est.ready

    def test_slope_zero_when_not_lifting(self):
        est = EstimatorState(window=1.0, min_samples=2)
        for k in range(20):
            est = estimator_update(est, 0.01 * k, 0.05 * k, 0.01 * k, lifting=False)
        assert est.slope == 0.0

    def test_window_drops_old_samples(self):
        est = EstimatorState(window=1.0, min_samples=2)
        for k in range(300):
            est = estimator_update(est, 0.01 * k, 0.05 * k, 0.0, lifting=True)
        assert all(t >= 2.99 - 1.0 - 1e-9 for t, _, _ in est.samples)
        assert len(est.samples) <= 102

    def test_standstill_has_no_slope(self):
        assert windowed_slope([(0.0, 1.0, 0.0), (0.1, 1.0, 0.5), (0.2, 1.0, 1.0)]) == 0.0

    def test_arrival_height_extrapolation(self):
        assert estimate_height_at_arrival(EstimatorState(slope=0.2), 1.0, 10.0) == pytest.approx(3.0)


class TestOperatorInit:
    """Tests for planning at start-up"""

    def test_equidistant_layout(self, fresh):
        assert fresh.phase is Phase.INIT
        assert fresh.plan.alpha == pytest.approx(math.pi / 4, abs=1e-12)
        assert fresh.estimator.slope == 0.0
        assert fresh.odometer == 0.0

    def test_general_layout(self):
        state = operator_init(OperatorConfig(layout=WorkplaceLayout(20.0, 15.0)))
        assert state.plan.alpha == pytest.approx(0.8867, abs=1e-3)

    @pytest.mark.parametrize("overrides", [
        {"v_safe": 0.0},
        {"line_tol": 0.0},
        {"brake_level": 1.5},
        {"min_samples": 1},
    ])
    def test_invalid_config(self, overrides):
        with pytest.raises(ValueError):
            OperatorConfig(**overrides)


class TestPhaseSequence:
    """Tests for the transition graph"""

    def test_done_is_terminal(self):
        assert ALLOWED_TRANSITIONS[Phase.DONE] == frozenset()

    def test_monotone_sequences(self):
        nominal = [Phase.INIT, Phase.INIT, Phase.TILT_BACK, Phase.LEAVING_BANK,
                   Phase.RETARDATION, Phase.REVERSING, Phase.TOWARD_RECEIVER,
                   Phase.EMPTYING, Phase.DONE]
        assert is_monotone(nominal)
        assert not is_monotone([Phase.INIT, Phase.TILT_BACK, Phase.INIT])
        assert not is_monotone([Phase.INIT, Phase.LEAVING_BANK])

    def test_labels_round_trip(self):
        assert Phase.from_label("2a") is Phase.TURN_LIMITED
        with pytest.raises(ValueError):
            Phase.from_label("7")


class TestInitAndTiltBack:
    """Tests for preparing the bucket at the bank"""

    def test_lifts_to_initial_height(self, fresh):
        state, u = operator_tick(fresh, frame(0.0, 10.0, math.pi), 0.0, 0.01)
        assert state.phase is Phase.INIT
        assert u.lift == 1.0
        assert u.tilt == 0.0
        assert u.direction is Direction.NEUTRAL
        assert u.throttle == pytest.approx(fresh.config.init_throttle)

    def test_moves_on_when_bucket_ready(self, fresh):
        state, u = operator_tick(fresh, frame(0.0, 10.0, math.pi, h=0.5), 2.0, 0.01)
        assert state.phase is Phase.TILT_BACK
        assert state.phase_entry_time == 2.0
        assert u.tilt == 1.0

    def test_tilt_back_until_limit(self, fresh):
        state = in_phase(fresh, Phase.TILT_BACK)
        state, u = operator_tick(state, frame(0.0, 10.0, math.pi, h=0.5, phi=0.4), 1.0, 0.01)
        assert state.phase is Phase.TILT_BACK
        assert u.tilt == 1.0

    def test_leaves_bank_when_tilted(self, fresh, config):
        state = in_phase(fresh, Phase.TILT_BACK)
        fb = frame(0.0, 10.0, math.pi, h=0.5, phi=config.machine.tilt_max)
        state, u = operator_tick(state, fb, 3.0, 0.01)
        assert state.phase is Phase.LEAVING_BANK
        assert u.direction is Direction.REVERSE
        assert u.throttle == 1.0
        assert u.lift == 1.0


class TestLeavingBank:
    """Tests for reversing away from the bank"""

    def test_follows_first_arc_before_aiming(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        state, u = operator_tick(state, frame(3.0, 12.0, math.pi, v=-2.0), 1.0, 0.01)
        assert not state.aim_captured
        assert u.steering < 0.0

    def test_holds_aim_once_captured(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        fb = frame(10.0, 10.0, -0.75 * math.pi, gamma=-0.3)
        state, u = operator_tick(state, fb, 1.0, 0.01)
        assert state.aim_captured
        assert state.phase is Phase.LEAVING_BANK
        assert u.steering > 0.0

    def test_waits_for_receiver(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        state, _ = operator_tick(state, frame(5.0, 20.0, math.pi, h=3.5), 1.0, 0.01)
        assert not state.receiver_passed
        assert state.phase is Phase.LEAVING_BANK

    def test_keeps_reversing_while_bucket_low(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        state, u = operator_tick(state, frame(18.0, 20.0, math.pi, h=1.0), 1.0, 0.01)
        assert state.receiver_passed
        assert state.phase is Phase.LEAVING_BANK
        assert u.throttle == 1.0

    def test_drivable_turn_starts_retardation(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        on_line = frame(18.0, 20.0, math.atan2(-20.0, -18.0), h=3.3)
        state, u = operator_tick(state, on_line, 1.0, 0.01)
        assert state.aim_captured
        assert state.phase is Phase.RETARDATION
        assert u.throttle == 0.0
        assert u.brake > 0.0
        assert u.direction is Direction.REVERSE

    def test_retardation_waits_for_aim(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        state, u = operator_tick(state, frame(18.0, 20.0, math.pi, h=3.3), 1.0, 0.01)
        assert state.receiver_passed
        assert not state.aim_captured
        assert state.phase is Phase.LEAVING_BANK
        assert u.throttle == 1.0

    def test_settles_on_bearing_line_before_retardation(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK, aim_captured=True)
        bearing = math.atan2(-20.0, -18.0)
        state, u = operator_tick(state, frame(18.0, 20.0, bearing + 0.05, h=3.3), 1.0, 0.01)
        assert state.phase is Phase.LEAVING_BANK
        assert u.steering > 0.0

    def test_retardation_waits_for_straight_steering(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK, aim_captured=True)
        on_line = frame(18.0, 20.0, math.atan2(-20.0, -18.0), h=3.3, gamma=-0.1)
        state, _ = operator_tick(state, on_line, 1.0, 0.01)
        assert state.phase is Phase.LEAVING_BANK

    def test_aim_captured_after_overshoot(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        bearing = math.atan2(-20.0, -18.0)
        state, _ = operator_tick(state, frame(18.0, 20.0, bearing + 0.2, h=1.0), 1.0, 0.01)
        assert state.aim_captured

    def test_tight_turn_continues_pattern(self, fresh):
        state = in_phase(fresh, Phase.LEAVING_BANK)
        state, u = operator_tick(state, frame(13.0, 20.0, math.pi, h=3.3), 1.0, 0.01)
        assert state.phase is Phase.TURN_LIMITED
        assert u.throttle == 1.0

    def test_verdict_uses_stopping_distance(self, fresh, config):
        state = replace(in_phase(fresh, Phase.LEAVING_BANK), receiver_passed=True)
        fb = frame(10.0 + 0.9 * R_MIN, 20.0, math.pi, v=-2.0, h=3.3)
        pose, stop = predicted_reversing_pose(config, fb)
        assert stop == pytest.approx(1.0)
        assert pose.x == pytest.approx(fb.pose.x + 1.0)
        assert reversal_verdict(state, fb) is (
            Phase.RETARDATION if pose.x - 10.0 >= R_MIN else Phase.TURN_LIMITED
        )


class TestTurnLimited:
    """Tests for continuing the pattern until the turn is drivable"""

    @pytest.mark.parametrize("factor, expected", [
        (0.9, Phase.TURN_LIMITED),
        (1.1, Phase.RETARDATION),
    ])
    def test_minimum_radius_boundary(self, fresh, factor, expected):
        # On the diagonal through the origin the approach arc has r_c = d / (1 - sin 45deg).
        d = factor * R_MIN * (1.0 - math.sqrt(0.5))
        state = in_phase(fresh, Phase.TURN_LIMITED)
        fb = frame(10.0 + d, 10.0 + d, -0.75 * math.pi, h=3.3)
        state, _ = operator_tick(state, fb, 5.0, 0.01)
        assert state.phase is expected

    def test_drivable_turn_waits_for_bearing_line(self, fresh):
        state = in_phase(fresh, Phase.TURN_LIMITED, aim_captured=True)
        state, u = operator_tick(state, frame(10.0 + 1.1 * R_MIN, 20.0, math.pi, h=3.3), 5.0, 0.01)
        assert state.phase is Phase.TURN_LIMITED
        assert u.direction is Direction.REVERSE


class TestRetardationAndReversing:
    """Tests for braking and the change of travel direction"""

    def test_brakes_until_safe_speed(self, fresh):
        state = in_phase(fresh, Phase.RETARDATION)
        state, u = operator_tick(state, frame(20.0, 20.0, math.pi, v=-1.0, h=3.3), 5.0, 0.01)
        assert state.phase is Phase.RETARDATION
        assert u.throttle == 0.0
        assert u.brake == pytest.approx(fresh.config.brake_level)

    def test_reversing_pose_recorded_at_safe_speed(self, fresh):
        state = in_phase(fresh, Phase.RETARDATION)
        fb = frame(20.0, 20.0, math.pi, v=-0.3, h=3.3)
        state, u = operator_tick(state, fb, 5.0, 0.01)
        assert state.phase is Phase.REVERSING
        assert state.reversing_pose == fb.pose
        assert u.direction is Direction.FORWARD

    def test_forward_selected_while_still_reversing(self, fresh):
        state = in_phase(fresh, Phase.REVERSING)
        state, u = operator_tick(state, frame(20.0, 20.0, math.pi, v=-0.2, h=3.3), 6.0, 0.01)
        assert state.phase is Phase.REVERSING
        assert u.direction is Direction.FORWARD
        assert u.throttle == 1.0
        assert u.brake == 0.0
        assert u.lift == 0.0

    def test_forward_motion_starts_approach(self, fresh):
        state = in_phase(fresh, Phase.REVERSING)
        state, _ = operator_tick(state, frame(20.0, 20.0, math.pi, v=0.01, h=3.3), 7.0, 0.01)
        assert state.phase is Phase.TOWARD_RECEIVER


class TestTowardReceiver:
    """Tests for the forward approach"""

    def test_approach_coordinates(self, config):
        d, z, theta = approach_coordinates(config.layout, Pose(15.0, 20.0, math.pi))
        assert (d, z, theta) == pytest.approx((5.0, 20.0, 0.0))

    def test_straight_while_arc_would_overshoot(self, fresh):
        state = in_phase(fresh, Phase.TOWARD_RECEIVER)
        state, u = operator_tick(state, frame(20.0, 6.0, math.pi, v=1.0, h=3.3), 8.0, 0.01)
        assert state.phase is Phase.TOWARD_RECEIVER
        assert u.steering == 0.0

    @pytest.mark.parametrize("h, lift", [(3.19, 1.0), (3.2, 0.0)])
    def test_lift_stops_at_emptying_height(self, fresh, h, lift):
        state = in_phase(fresh, Phase.TOWARD_RECEIVER)
        _, u = operator_tick(state, frame(20.0, 15.0, math.pi, v=1.0, h=h), 8.0, 0.01)
        assert u.lift == lift

    def test_slows_down_near_receiver(self, fresh):
        state = in_phase(fresh, Phase.TOWARD_RECEIVER)
        _, fast = operator_tick(state, frame(10.0, 3.0, -0.5 * math.pi, v=0.6, h=3.3), 9.0, 0.01)
        _, slow = operator_tick(state, frame(10.0, 3.0, -0.5 * math.pi, v=0.2, h=3.3), 9.0, 0.01)
        assert fast.throttle == 0.0 and fast.brake == 1.0
        assert slow.throttle == pytest.approx(fresh.config.approach_throttle)

    @pytest.mark.parametrize("h, expected", [
        (3.3, Phase.EMPTYING),
        (3.0, Phase.EXTRA_LIFT),
    ])
    def test_arrival(self, fresh, h, expected):
        state = in_phase(fresh, Phase.TOWARD_RECEIVER)
        state, _ = operator_tick(state, frame(10.0, 1.5, -0.5 * math.pi, v=0.4, h=h), 10.0, 0.01)
        assert state.phase is expected


class TestExtraLiftAndEmptying:
    """Tests for the work at the receiver"""

    def test_stands_and_lifts(self, fresh):
        state = in_phase(fresh, Phase.EXTRA_LIFT, entry=10.0)
        state, u = operator_tick(state, frame(10.0, 1.5, -0.5 * math.pi, h=3.0), 12.0, 0.01)
        assert state.phase is Phase.EXTRA_LIFT
        assert u.brake == 1.0
        assert u.lift == 1.0
        assert u.throttle == 0.0

    def test_empties_once_high_enough(self, fresh):
        state = in_phase(fresh, Phase.EXTRA_LIFT, entry=10.0)
        state, _ = operator_tick(state, frame(10.0, 1.5, -0.5 * math.pi, h=3.2), 12.0, 0.01)
        assert state.phase is Phase.EMPTYING

    def test_times_out(self, fresh):
        state = in_phase(fresh, Phase.EXTRA_LIFT, entry=10.0)
        with pytest.raises(PhaseTimeoutError):
            operator_tick(state, frame(10.0, 1.5, -0.5 * math.pi, h=3.0), 41.0, 0.01)

    def test_tilts_forward_to_empty(self, fresh):
        state = in_phase(fresh, Phase.EMPTYING, entry=10.0)
        state, u = operator_tick(state, frame(10.0, 1.0, -0.5 * math.pi, v=0.3, h=3.3), 11.0, 0.01)
        assert state.phase is Phase.EMPTYING
        assert u.tilt == -1.0
        assert u.throttle == pytest.approx(fresh.config.empty_creep_throttle)

    def test_done_after_emptying_duration(self, fresh, config):
        state = in_phase(fresh, Phase.EMPTYING, entry=10.0)
        fb = frame(10.0, 1.0, -0.5 * math.pi, h=3.3, phi=config.machine.tilt_min)
        waiting, u = operator_tick(state, fb, 11.0, 0.01)
        assert waiting.phase is Phase.EMPTYING
        assert u.tilt == 0.0
        done, u = operator_tick(state, fb, 13.0, 0.01)
        assert done.phase is Phase.DONE
        assert u == ControlSignals()

    def test_done_keeps_all_controls_zero(self, fresh):
        state = in_phase(fresh, Phase.DONE)
        state, u = operator_tick(state, frame(10.0, 1.0, -0.5 * math.pi, v=0.3, h=3.3), 20.0, 0.01)
        assert state.phase is Phase.DONE
        assert u == ControlSignals()
        assert u.direction is Direction.NEUTRAL


class TestTick:
    """Tests for tick bookkeeping and fail-safe behaviour"""

    def test_odometer_accumulates_speed(self, fresh):
        state, _ = operator_tick(fresh, frame(0.0, 10.0, math.pi, v=-2.0), 0.0, 0.01)
        assert state.odometer == pytest.approx(0.02)

    def test_geometry_failure_holds_machine(self, fresh, monkeypatch):
        def failing_rule(state, fb, t):
            raise GeometryDomainError("no tangent circle")

        monkeypatch.setitem(rules.PHASE_RULES, Phase.LEAVING_BANK, failing_rule)
        state = in_phase(fresh, Phase.LEAVING_BANK)
        new_state, u = operator_tick(state, frame(5.0, 15.0, math.pi, v=-1.0), 2.0, 0.01)
        assert new_state.phase is Phase.LEAVING_BANK
        assert u.brake == 1.0
        assert u.throttle == 0.0
        assert u.direction is Direction.REVERSE

    @settings(max_examples=300, deadline=None)
    @given(
        phase=st.sampled_from(list(Phase)),
        x=st.floats(min_value=-5.0, max_value=40.0),
        z=st.floats(min_value=-5.0, max_value=40.0),
        theta=st.floats(min_value=-math.pi, max_value=math.pi),
        v=st.floats(min_value=-3.0, max_value=3.0),
        h=st.floats(min_value=0.0, max_value=4.0),
        gamma=st.floats(min_value=-0.6, max_value=0.6),
        t=st.floats(min_value=0.0, max_value=25.0),
    )
    def test_any_feedback_gives_valid_controls(self, phase, x, z, theta, v, h, gamma, t):
        state = in_phase(operator_init(OperatorConfig()), phase)
        fb = frame(x, z, theta, v=v, h=h, gamma=gamma)
        new_state, u = operator_tick(state, fb, t, 0.01)
        assert_valid(u)
        assert new_state.phase is phase or new_state.phase in ALLOWED_TRANSITIONS[phase]


def run_operator_fuzz(ticks: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    config = OperatorConfig()
    state = operator_init(config)
    phases = [state.phase]
    t = 0.0
    for _ in range(ticks):
        fb = frame(
            float(rng.uniform(-5.0, 30.0)), float(rng.uniform(-5.0, 30.0)),
            float(rng.uniform(-math.pi, math.pi)), v=float(rng.uniform(-3.0, 3.0)),
            h=float(rng.uniform(0.0, 4.0)),
            phi=float(rng.uniform(config.machine.tilt_min, config.machine.tilt_max)),
            gamma=float(rng.uniform(-config.machine.gamma_max, config.machine.gamma_max)),
        )
        try:
            state, u = operator_tick(state, fb, t, 0.01)
        except PhaseTimeoutError:
            assert is_monotone(phases)
            state = operator_init(config)
            phases = [state.phase]
            continue
        assert_valid(u)
        phases.append(state.phase)
        t += 0.01
    assert is_monotone(phases)


class TestOperatorFuzz:
    """Random feedback streams"""

    def test_random_feedback(self):
        run_operator_fuzz(ticks=5_000, seed=3)

    @pytest.mark.slow
    def test_random_feedback_long(self):
        run_operator_fuzz(ticks=100_000, seed=5)
