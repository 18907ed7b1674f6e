"""
Cycle Diagnostics
=================

Series and key figures extracted from a recorded cycle:

- harmony diagram: bucket height over travelled distance
- bucket diagram: bucket height over bucket tilt
- machine location: reference point in the workplace plane
- control and engine timelines
- CycleKpis summarising one completed cycle

All functions are pure projections of a Trace.
"""

import math
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from ..cosim.master import Trace
from ..geom.pose import Pose, wrap_angle
from ..geom.vpath import WorkplaceLayout
from ..operator_model.state import Phase

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

CONTROL_CHANNELS = ("throttle", "brake", "steering", "lift", "tilt")

RECEIVER_PARALLEL_HEADING = -0.5 * math.pi


class IncompleteTraceError(ValueError):
    """KPIs requested for a cycle that never reached Done"""
    pass


# =============================================================================
# SERIES
# =============================================================================

def harmony_series(trace: Trace) -> List[Point]:
    """(s_cum, h) per record"""
    return [(r.s_cum, r.fb.h) for r in trace.records]


def bucket_series(trace: Trace) -> List[Point]:
    """(phi, h) per record"""
    return [(r.fb.phi, r.fb.h) for r in trace.records]


def location_series(trace: Trace) -> List[Point]:
    """(x, z) per record"""
    return [(r.fb.pose.x, r.fb.pose.z) for r in trace.records]


def control_series(trace: Trace) -> Dict[str, List[Point]]:
    """(t, value) per record for every control channel"""
    return OrderedDict(
        (name, [(r.t, getattr(r.u, name)) for r in trace.records]) for name in CONTROL_CHANNELS
    )


def engine_series(trace: Trace) -> List[Point]:
    """(t, engine speed) per record"""
    return [(r.t, r.fb.engine) for r in trace.records]


def series_from_trace(trace: Trace) -> Dict[str, Any]:
    return {
        "harmony": harmony_series(trace),
        "bucket": bucket_series(trace),
        "location": location_series(trace),
        "controls": control_series(trace),
        "engine": engine_series(trace),
    }


def series_from_frame(frame: pd.DataFrame) -> Dict[str, Any]:
    """Same series as series_from_trace, from a trace re-read from CSV"""
    def pairs(x: str, y: str) -> List[Point]:
        return list(zip(frame[x].astype(float).tolist(), frame[y].astype(float).tolist()))

    return {
        "harmony": pairs("s_cum", "h"),
        "bucket": pairs("phi", "h"),
        "location": pairs("x", "z"),
        "controls": OrderedDict((name, pairs("t", name)) for name in CONTROL_CHANNELS),
        "engine": pairs("t", "engine"),
    }


# =============================================================================
# KPIS
# =============================================================================

@dataclass
class CycleKpis:
    """Key figures of one completed cycle"""
    cycle_time: float
    reversing_pose: Pose
    reversing_distance_to_receiver: float
    arrival_height: float
    entered_2a: bool
    entered_5a: bool
    phase_durations: Dict[str, float] = field(default_factory=dict)
    max_articulation: float = 0.0
    phase_entry_times: Dict[str, float] = field(default_factory=dict)
    arrival_bucket_error: float = 0.0
    arrival_lateral_offset: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Flat key/value view in a fixed order"""
        result: Dict[str, Any] = {
            "cycle_time": self.cycle_time,
            "reversing_pose.x": self.reversing_pose.x,
            "reversing_pose.z": self.reversing_pose.z,
            "reversing_pose.theta": self.reversing_pose.theta,
            "reversing_distance_to_receiver": self.reversing_distance_to_receiver,
            "arrival_height": self.arrival_height,
            "entered_2a": self.entered_2a,
            "entered_5a": self.entered_5a,
            "max_articulation": self.max_articulation,
            "arrival_bucket_error": self.arrival_bucket_error,
            "arrival_lateral_offset": self.arrival_lateral_offset,
        }
        for label, duration in self.phase_durations.items():
            result[f"duration.{label}"] = duration
        for label, entry in self.phase_entry_times.items():
            result[f"entry.{label}"] = entry
        return result


def _layout_from_metadata(trace: Trace) -> WorkplaceLayout:
    meta = trace.metadata
    try:
        return WorkplaceLayout(
            float(meta["layout.a"]),
            float(meta["layout.b"]),
            float(meta.get("layout.receiver_halfwidth", 1.5)),
        )
    except KeyError as e:
        raise ValueError(f"Trace metadata lacks the workplace layout ({e})") from e


def cycle_kpis(trace: Trace, layout: Optional[WorkplaceLayout] = None) -> CycleKpis:
    """
    Key figures of a completed cycle.

    Args:
        trace: Cycle that reached Done
        layout: Workplace layout; read from the trace metadata when omitted

    Raises:
        IncompleteTraceError: The trace has no Done record
    """
    phases = trace.phases()
    if Phase.DONE not in phases:
        raise IncompleteTraceError(
            f"Trace ended in phase {phases[-1].label} ({trace.outcome.value}), not done"
        )
    layout = layout or _layout_from_metadata(trace)
    dt = trace.dt

    counts: Dict[str, int] = OrderedDict()
    entries: Dict[str, float] = OrderedDict()
    for record in trace.records:
        label = record.phase.label
        if label not in counts:
            counts[label] = 0
            entries[label] = record.t
        counts[label] += 1

    reversing = next(r for r in trace.records if r.phase is Phase.REVERSING)
    arrival = next(r for r in trace.records if r.phase in (Phase.EXTRA_LIFT, Phase.EMPTYING))

    rev_pose = reversing.fb.pose
    arrival_pose = arrival.fb.pose
    bucket_heading = wrap_angle(arrival_pose.theta + arrival.fb.gamma)

    kpis = CycleKpis(
        cycle_time=len(trace.records) * dt,
        reversing_pose=rev_pose,
        reversing_distance_to_receiver=rev_pose.distance_to(layout.b, 0.0),
        arrival_height=arrival.fb.h,
        entered_2a=Phase.TURN_LIMITED.label in counts,
        entered_5a=Phase.EXTRA_LIFT.label in counts,
        phase_durations={label: n * dt for label, n in counts.items()},
        max_articulation=max(abs(r.fb.gamma) for r in trace.records),
        phase_entry_times=dict(entries),
        arrival_bucket_error=abs(wrap_angle(bucket_heading - RECEIVER_PARALLEL_HEADING)),
        arrival_lateral_offset=arrival_pose.x - layout.b,
    )
    logger.debug(f"Cycle KPIs: {kpis.to_dict()}")
    return kpis
