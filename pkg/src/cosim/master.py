"""
Co-Simulation Master
====================

Fixed-step explicit co-simulation of the operator model and a plant.

At step k the operator reads the feedback of state k and its commands act
on the plant over [t_k, t_k + dt). Only ControlSignals and FeedbackFrames
cross between the two models.
"""

import math
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional

from .. import __version__
from ..interface.channels import ControlSignals, FeedbackFrame
from ..operator_model import (
    MachineKnowledge, OperatorConfig, Phase, operator_init, operator_tick,
)
from ..plant.articulated_loader import ArticulatedLoaderPlant, MachineParams
from ..plant.base_plant import BasePlant

logger = logging.getLogger(__name__)


class CycleOutcome(Enum):
    """How a simulated cycle ended"""
    DONE = "done"
    TIMEOUT = "timeout"
    ERROR = "error"


# =============================================================================
# DATA MODELS
# =============================================================================

@dataclass(frozen=True)
class TraceRecord:
    """One exchange step: time, operator phase, commands, feedback, travelled distance"""
    t: float
    phase: Phase
    u: ControlSignals
    fb: FeedbackFrame
    s_cum: float

    def to_dict(self) -> Dict[str, Any]:
        u = self.u.to_dict()
        fb = self.fb.to_dict()
        return {
            "t": self.t,
            "phase": self.phase.label,
            "throttle": u["throttle"],
            "brake": u["brake"],
            "steering": u["steering"],
            "lift": u["lift"],
            "tilt": u["tilt"],
            "direction": u["direction"],
            "x": fb["x"],
            "z": fb["z"],
            "theta": fb["theta"],
            "v": fb["v"],
            "gamma": fb["gamma"],
            "h": fb["h"],
            "phi": fb["phi"],
            "engine": fb["engine"],
            "s_cum": self.s_cum,
        }


@dataclass
class Trace:
    """Recorded cycle with run metadata"""
    records: List[TraceRecord]
    metadata: Dict[str, Any] = field(default_factory=dict)
    outcome: CycleOutcome = CycleOutcome.DONE
    error: Optional[str] = None

    def __post_init__(self):
        if not self.records:
            raise ValueError("A trace needs at least one record")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def completed(self) -> bool:
        return self.outcome is CycleOutcome.DONE

    @property
    def dt(self) -> float:
        if "dt" in self.metadata:
            return float(self.metadata["dt"])
        if len(self.records) > 1:
            return self.records[1].t - self.records[0].t
        raise ValueError("Time step unknown for a single-record trace without metadata")

    def phases(self) -> List[Phase]:
        return [r.phase for r in self.records]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata,
            "outcome": self.outcome.value,
            "error": self.error,
            "records": len(self.records),
        }


# =============================================================================
# MASTER LOOP
# =============================================================================

def machine_knowledge(mp: MachineParams) -> MachineKnowledge:
    """What the operator may know of a machine: steering geometry and tilt range"""
    return MachineKnowledge(
        l_f=mp.l_f, l_r=mp.l_r, gamma_max=mp.gamma_max,
        tilt_min=mp.tilt_min, tilt_max=mp.tilt_max,
    )


def run_cycle(
    mp: MachineParams,
    oc: OperatorConfig,
    dt: float,
    t_max: float,
    plant: Optional[BasePlant] = None,
    metadata: Optional[Dict[str, Any]] = None,
    h0: float = 0.0,
    phi0: float = 0.0,
) -> Trace:
    """
    Simulate one short loading cycle.

    Args:
        mp: Machine parameters for the default articulated plant; the operator's
            machine knowledge always follows them
        oc: Operator configuration, including the workplace layout
        dt: Exchange step (s)
        t_max: Simulated time limit (s)
        plant: Alternate plant honouring the channel contract, described by mp
        metadata: Extra entries for the trace metadata (e.g. config digest)
        h0: Initial bucket height
        phi0: Initial bucket tilt

    Returns:
        Trace; its outcome is DONE, TIMEOUT or ERROR, never an exception
    """
    if not dt > 0:
        raise ValueError(f"Time step must be positive, got {dt}")
    if not t_max > 0:
        raise ValueError(f"Time limit must be positive, got {t_max}")

    knowledge = machine_knowledge(mp)
    if oc.machine != knowledge:
        logger.warning("Operator machine knowledge differs from the machine, using the machine parameters")
        oc = replace(oc, machine=knowledge)

    plant = plant or ArticulatedLoaderPlant(mp)
    meta = {"dt": dt, "t_max": t_max, "version": __version__, "plant": type(plant).__name__}
    meta.update({f"layout.{key}": value for key, value in oc.layout.to_dict().items()})
    meta.update(metadata or {})

    state = plant.initial_state(oc.layout.dig_point, h0, phi0)
    op = operator_init(oc)
    n_max = max(1, int(math.floor(t_max / dt + 1e-9)))

    records: List[TraceRecord] = []
    s_cum = 0.0
    outcome = CycleOutcome.TIMEOUT
    error = None

    logger.info(f"Starting cycle: a={oc.layout.a}, b={oc.layout.b}, dt={dt}, t_max={t_max}")
    for k in range(n_max):
        t = k * dt
        fb = plant.observe(state)
        try:
            op, u = operator_tick(op, fb, t, dt)
        except (RuntimeError, ValueError) as e:
            logger.error(f"Operator failed in phase {op.phase.label} at t={t:.2f}s: {e}")
            records.append(TraceRecord(t, op.phase, ControlSignals(brake=1.0), fb, s_cum))
            outcome = CycleOutcome.ERROR
            error = str(e)
            break

        records.append(TraceRecord(t, op.phase, u, fb, s_cum))
        if op.phase is Phase.DONE:
            outcome = CycleOutcome.DONE
            break

        state = plant.step(state, u, dt)
        s_cum += abs(fb.v) * dt

    if outcome is CycleOutcome.TIMEOUT:
        logger.warning(f"Cycle timed out after {len(records)} steps in phase {op.phase.label}")
    else:
        logger.info(f"Cycle finished: {outcome.value} after {len(records) * dt:.2f}s")

    return Trace(records=records, metadata=meta, outcome=outcome, error=error)


def replay_operator(oc: OperatorConfig, feedback: List[FeedbackFrame], dt: float) -> List[ControlSignals]:
    """Feed recorded feedback into a fresh operator and collect its commands"""
    op = operator_init(oc)
    commands = []
    for k, fb in enumerate(feedback):
        op, u = operator_tick(op, fb, k * dt, dt)
        commands.append(u)
    return commands
