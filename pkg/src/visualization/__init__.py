"""Visualization Module"""
from .svg_plot import PlotConfig, SvgPlotter, emit_svg

__all__ = ["PlotConfig", "SvgPlotter", "emit_svg"]
