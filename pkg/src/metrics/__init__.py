"""Metrics Module"""
from .series import (
    CONTROL_CHANNELS, CycleKpis, IncompleteTraceError, bucket_series, control_series,
    cycle_kpis, engine_series, harmony_series, location_series, series_from_frame,
    series_from_trace,
)
from .export import (
    TRACE_COLUMNS, emit_csv, emit_cycle_plots, format_kpis, read_trace_csv,
    trace_frame, write_kpis,
)

__all__ = [
    "CONTROL_CHANNELS", "CycleKpis", "IncompleteTraceError", "bucket_series",
    "control_series", "cycle_kpis", "engine_series", "harmony_series",
    "location_series", "series_from_frame", "series_from_trace",
    "TRACE_COLUMNS", "emit_csv", "emit_cycle_plots", "format_kpis",
    "read_trace_csv", "trace_frame", "write_kpis",
]
