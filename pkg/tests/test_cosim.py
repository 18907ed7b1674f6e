"""
Unit Tests for the Co-Simulation Master
=======================================
"""

import logging
import math
import pytest
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cosim import (
    CycleOutcome, Trace, TraceRecord, machine_knowledge, replay_operator, run_cycle,
)
from src.geom import Pose
from src.interface import ControlSignals, Direction, FeedbackFrame
from src.operator_model import OperatorConfig, Phase, is_monotone
from src.plant import BasePlant, MachineParams, PlantRegistry

DT = 0.01
T_MAX = 120.0

REVERSE_PHASES = {Phase.LEAVING_BANK, Phase.TURN_LIMITED, Phase.RETARDATION}
FORWARD_PHASES = {Phase.REVERSING, Phase.TOWARD_RECEIVER, Phase.EXTRA_LIFT, Phase.EMPTYING}


@PlantRegistry.register("stationary")
class StationaryPlant(BasePlant):
    """Machine that ignores every command"""

    def initial_state(self, pose, h0, phi0):
        return pose

    def step(self, state, u, dt):
        return state

    def observe(self, state):
        return FeedbackFrame(pose=state, v=0.0, engine=800.0, h=0.0, phi=0.0,
                             gamma=0.0, direction=Direction.NEUTRAL)


@pytest.fixture(scope="module")
def operator_config():
    return OperatorConfig()


@pytest.fixture(scope="module")
def nominal(operator_config):
    return run_cycle(MachineParams(), operator_config, DT, T_MAX)


def entry_time(trace: Trace, phase: Phase) -> float:
    return next(r.t for r in trace.records if r.phase is phase)


def line_offset(pose: Pose) -> float:
    """Distance from the origin to the line along the pose heading"""
    return abs(pose.x * math.sin(pose.theta) - pose.z * math.cos(pose.theta))


class TestNominalCycle:
    """Tests for the nominal cycle at the default layout"""

    def test_completes(self, nominal):
        assert nominal.outcome is CycleOutcome.DONE
        assert nominal.completed
        assert nominal.error is None
        assert nominal.records[-1].phase is Phase.DONE

    def test_phase_sequence(self, nominal):
        distinct = []
        for phase in nominal.phases():
            if not distinct or distinct[-1] is not phase:
                distinct.append(phase)
        assert distinct == [
            Phase.INIT, Phase.TILT_BACK, Phase.LEAVING_BANK, Phase.RETARDATION,
            Phase.REVERSING, Phase.TOWARD_RECEIVER, Phase.EMPTYING, Phase.DONE,
        ]
        assert is_monotone(nominal.phases())

    def test_fixed_time_grid(self, nominal):
        for k, record in enumerate(nominal.records):
            assert record.t == k * DT

    def test_travelled_distance_accounting(self, nominal):
        records = nominal.records
        assert records[0].s_cum == 0.0
        for previous, current in zip(records, records[1:]):
            assert current.s_cum == previous.s_cum + abs(previous.fb.v) * DT

    def test_direction_discipline(self, nominal):
        for record in nominal.records:
            if record.phase in REVERSE_PHASES:
                assert record.u.direction is Direction.REVERSE
            elif record.phase in FORWARD_PHASES:
                assert record.u.direction is Direction.FORWARD

    def test_articulation_within_limit(self, nominal):
        gamma_max = MachineParams().gamma_max
        assert all(abs(r.fb.gamma) <= gamma_max for r in nominal.records)

    def test_reversal_decided_after_receiver_passed(self, nominal, operator_config):
        first = next(r for r in nominal.records if r.phase is Phase.RETARDATION)
        assert first.fb.pose.x >= operator_config.layout.b

    def test_straight_reversing_on_bearing_line(self, nominal, operator_config):
        records = nominal.records
        settled = next(
            k for k, r in enumerate(records)
            if r.phase in (Phase.LEAVING_BANK, Phase.RETARDATION)
            and line_offset(r.fb.pose) <= operator_config.line_tol
            and abs(r.fb.gamma) <= operator_config.aim_tol
        )
        reversing = next(k for k, r in enumerate(records) if r.phase is Phase.REVERSING)
        straight = records[settled:reversing]
        assert {r.phase for r in straight} <= {Phase.LEAVING_BANK, Phase.RETARDATION}
        assert straight[-1].phase is Phase.RETARDATION
        assert all(line_offset(r.fb.pose) <= 0.2 for r in straight)
        assert line_offset(records[reversing].fb.pose) <= 0.2

    def test_v_pattern(self, nominal):
        records = nominal.records
        turn = next(k for k, r in enumerate(records) if r.phase is Phase.TOWARD_RECEIVER)
        away = [r.fb.pose.z for r in records[:turn]]
        back = [r.fb.pose.z for r in records[turn:]]
        assert all(later >= earlier - 1e-9 for earlier, later in zip(away, away[1:]))
        assert all(later <= earlier + 1e-9 for earlier, later in zip(back, back[1:]))
        assert max(away) > records[0].fb.pose.z + 5.0

    def test_lift_discipline(self, nominal, operator_config):
        lifting = {Phase.LEAVING_BANK, Phase.TURN_LIMITED, Phase.RETARDATION, Phase.TOWARD_RECEIVER}
        for record in nominal.records:
            if record.phase in lifting:
                expected = 1.0 if record.fb.h < operator_config.h_empty else 0.0
                assert record.u.lift == expected, record.t
            elif record.phase is Phase.REVERSING:
                assert record.u.lift == 0.0

    def test_distance_grows_while_moving(self, nominal):
        start = entry_time(nominal, Phase.LEAVING_BANK)
        end = entry_time(nominal, Phase.EMPTYING)
        records = [r for r in nominal.records if start <= r.t <= end]
        for previous, current in zip(records, records[1:]):
            if abs(previous.fb.v) * DT > 1e-9:
                assert current.s_cum > previous.s_cum
            else:
                assert current.s_cum == pytest.approx(previous.s_cum)

    def test_tilt_back_duration(self, nominal):
        params = MachineParams()
        allowed = (params.tilt_max - params.tilt_min) / params.tilt_rate_max + 1.0
        assert entry_time(nominal, Phase.LEAVING_BANK) - entry_time(nominal, Phase.TILT_BACK) <= allowed

    def test_emptying_duration(self, nominal, operator_config):
        params = MachineParams()
        tilt_travel = (params.tilt_max - params.tilt_min) / params.tilt_rate_max
        elapsed = entry_time(nominal, Phase.DONE) - entry_time(nominal, Phase.EMPTYING)
        assert operator_config.empty_duration <= elapsed
        assert elapsed <= operator_config.empty_duration + tilt_travel + DT

    def test_bucket_height_never_drops_before_emptying(self, nominal):
        start = entry_time(nominal, Phase.LEAVING_BANK)
        end = entry_time(nominal, Phase.EMPTYING)
        heights = [r.fb.h for r in nominal.records if start <= r.t <= end]
        assert all(later >= earlier for earlier, later in zip(heights, heights[1:]))

    def test_metadata(self, nominal):
        meta = nominal.metadata
        assert meta["dt"] == DT
        assert meta["t_max"] == T_MAX
        assert meta["plant"] == "ArticulatedLoaderPlant"
        assert meta["layout.a"] == 10.0
        assert "version" in meta


class TestMasterContract:
    """Tests for determinism, causality and plant substitution"""

    def test_deterministic(self, nominal, operator_config):
        again = run_cycle(MachineParams(), operator_config, DT, T_MAX)
        assert again.records == nominal.records
        assert again.outcome is nominal.outcome

    def test_operator_is_causal(self, nominal, operator_config):
        feedback = [r.fb for r in nominal.records]
        commands = [r.u for r in nominal.records]
        assert replay_operator(operator_config, feedback, DT) == commands
        cut = len(feedback) // 2
        assert replay_operator(operator_config, feedback[:cut], DT) == commands[:cut]

    def test_short_limit_times_out(self, operator_config):
        trace = run_cycle(MachineParams(), operator_config, DT, 0.05)
        assert trace.outcome is CycleOutcome.TIMEOUT
        assert len(trace) == 5

    @pytest.mark.parametrize("dt, t_max", [(0.0, 10.0), (-0.01, 10.0), (0.01, 0.0)])
    def test_rejects_bad_timing(self, operator_config, dt, t_max):
        with pytest.raises(ValueError):
            run_cycle(MachineParams(), operator_config, dt, t_max)

    @pytest.mark.parametrize("params", [
        MachineParams(lift_scale=0.5),
        MachineParams(gamma_max=math.radians(40.0)),
    ])
    def test_alternate_machine_parameters(self, operator_config, params):
        trace = run_cycle(params, operator_config, DT, T_MAX)
        assert trace.completed
        assert is_monotone(trace.phases())

    def test_operator_knowledge_follows_machine(self, operator_config, caplog):
        params = MachineParams(gamma_max=math.radians(40.0))
        with caplog.at_level(logging.WARNING, logger="src.cosim.master"):
            trace = run_cycle(params, operator_config, DT, 5.0)
        assert "machine knowledge" in caplog.text
        informed = replace(operator_config, machine=machine_knowledge(params))
        feedback = [r.fb for r in trace.records]
        assert replay_operator(informed, feedback, DT) == [r.u for r in trace.records]

    def test_matching_knowledge_kept_quietly(self, operator_config, caplog):
        assert operator_config.machine == machine_knowledge(MachineParams())
        with caplog.at_level(logging.WARNING, logger="src.cosim.master"):
            run_cycle(MachineParams(), operator_config, DT, 0.05)
        assert "machine knowledge" not in caplog.text

    def test_plant_that_ignores_commands(self, operator_config):
        plant = PlantRegistry.create("stationary", None)
        trace = run_cycle(MachineParams(), operator_config, DT, 2.0, plant=plant)
        assert trace.outcome is CycleOutcome.TIMEOUT
        assert trace.metadata["plant"] == "StationaryPlant"
        assert set(trace.phases()) == {Phase.INIT}

    def test_extra_metadata_kept(self, operator_config):
        trace = run_cycle(MachineParams(), operator_config, DT, 0.05,
                          metadata={"scenario": "nominal"})
        assert trace.metadata["scenario"] == "nominal"


class TestTrace:
    """Tests for the trace container"""

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError):
            Trace(records=[])

    def test_record_columns(self):
        fb = FeedbackFrame(pose=Pose(1.0, 2.0, 0.5), v=0.1, engine=900.0, h=0.2,
                           phi=0.3, gamma=0.0, direction=Direction.FORWARD)
        record = TraceRecord(0.0, Phase.TILT_BACK, ControlSignals(tilt=1.0), fb, 0.0)
        row = record.to_dict()
        assert list(row) == [
            "t", "phase", "throttle", "brake", "steering", "lift", "tilt", "direction",
            "x", "z", "theta", "v", "gamma", "h", "phi", "engine", "s_cum",
        ]
        assert row["phase"] == "1a"
        assert row["direction"] == "neutral"

    def test_dt_from_records(self):
        fb = FeedbackFrame(pose=Pose(0.0, 0.0, 0.0), v=0.0, engine=800.0, h=0.0,
                           phi=0.0, gamma=0.0, direction=Direction.NEUTRAL)
        records = [TraceRecord(k * 0.5, Phase.INIT, ControlSignals(), fb, 0.0) for k in range(3)]
        assert Trace(records).dt == 0.5
