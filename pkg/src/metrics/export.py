"""
Result Files
============

Trace CSV, KPI listing and the standard set of cycle plots.
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import pandas as pd

from ..cosim.master import Trace
from ..utils.helpers import ensure_directory, format_number
from ..visualization.svg_plot import emit_svg
from .series import CONTROL_CHANNELS, CycleKpis

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "t", "phase", "throttle", "brake", "steering", "lift", "tilt", "direction",
    "x", "z", "theta", "v", "gamma", "h", "phi", "engine", "s_cum",
]

TEXT_COLUMNS = ("phase", "direction")


def trace_frame(trace: Trace) -> pd.DataFrame:
    """One row per record, columns in file order"""
    return pd.DataFrame([r.to_dict() for r in trace.records], columns=TRACE_COLUMNS)


def emit_csv(trace: Trace, destination: Union[str, Path]) -> str:
    """
    Write the trace as CSV.

    Numbers use at most 15 significant digits, '.' as decimal separator
    and '\\n' line endings. I/O errors propagate unchanged.
    """
    frame = trace_frame(trace)
    frame.to_csv(destination, index=False, float_format="%.15g", lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} trace rows to {destination}")
    return str(destination)


def read_trace_csv(source: Union[str, Path]) -> pd.DataFrame:
    """
    Read a trace CSV back.

    Raises:
        ValueError: Columns differ from the trace format
    """
    frame = pd.read_csv(source, dtype={name: str for name in TEXT_COLUMNS})
    if list(frame.columns) != TRACE_COLUMNS:
        raise ValueError(f"Not a trace file, columns: {list(frame.columns)}")
    return frame


def format_kpis(kpis: Optional[CycleKpis], metadata: Mapping[str, Any],
                outcome: str) -> str:
    """key=value listing of run metadata and KPIs"""
    lines = [f"outcome={outcome}"]
    for key in sorted(metadata):
        lines.append(f"meta.{key}={format_number(metadata[key])}")
    if kpis is not None:
        for key, value in kpis.to_dict().items():
            lines.append(f"{key}={format_number(value)}")
    return "\n".join(lines) + "\n"


def write_kpis(kpis: Optional[CycleKpis], metadata: Mapping[str, Any], outcome: str,
               destination: Union[str, Path]) -> str:
    with open(destination, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_kpis(kpis, metadata, outcome))
    return str(destination)


def emit_cycle_plots(series: Dict[str, Any], output_dir: Union[str, Path],
                     title: str = "") -> Dict[str, str]:
    """
    Write the standard diagnostic plots.

    Returns:
        Dictionary of plot name to file path
    """
    output_dir = ensure_directory(str(output_dir))
    prefix = f"{title}: " if title else ""
    outputs = {
        "harmony": emit_svg(series["harmony"], os.path.join(output_dir, "harmony.svg"),
                            title=f"{prefix}bucket height over travelled distance",
                            x_label="travelled distance [m]", y_label="bucket height [m]"),
        "bucket": emit_svg(series["bucket"], os.path.join(output_dir, "bucket.svg"),
                           title=f"{prefix}bucket height over bucket angle",
                           x_label="bucket angle [rad]", y_label="bucket height [m]"),
        "location": emit_svg(series["location"], os.path.join(output_dir, "location.svg"),
                             title=f"{prefix}machine location",
                             x_label="x [m]", y_label="z [m]", equal_aspect=True),
        "controls": emit_svg({name: series["controls"][name] for name in CONTROL_CHANNELS},
                             os.path.join(output_dir, "controls.svg"),
                             title=f"{prefix}operator commands",
                             x_label="time [s]", y_label="command [-]"),
        "engine": emit_svg(series["engine"], os.path.join(output_dir, "engine.svg"),
                           title=f"{prefix}engine speed",
                           x_label="time [s]", y_label="engine speed [rpm]"),
    }
    logger.info(f"Saved plots to: {output_dir}")
    return outputs
