"""
SVG Plot Module
===============

Minimal SVG 1.1 line plots of cycle diagnostics: one framed axes box,
axis labels, range ticks and a polyline per series. Output is built with
ElementTree and formatted with fixed precision so identical input gives
identical bytes.
"""

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

logger = logging.getLogger(__name__)

Point = Tuple[float, float]
SeriesInput = Union[Sequence[Point], Mapping[str, Sequence[Point]]]

SVG_NS = "http://www.w3.org/2000/svg"


# =============================================================================
# COLOR SCHEMES
# =============================================================================

SERIES_COLORS = [
    "#2196F3",  # Blue
    "#F44336",  # Red
    "#4CAF50",  # Green
    "#FF9800",  # Orange
    "#9C27B0",  # Purple
    "#607D8B",  # Gray-blue
]

AXIS_COLOR = "#212121"


@dataclass
class PlotConfig:
    """Configuration for SVG plots"""
    width: int = 640
    height: int = 480
    margin: int = 60
    font_size: int = 12
    stroke_width: float = 1.5
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    equal_aspect: bool = False


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick(value: float) -> str:
    return f"{value:.4g}"


def _normalize(series: SeriesInput) -> Dict[str, List[Point]]:
    if isinstance(series, Mapping):
        return {str(name): list(points) for name, points in series.items()}
    return {"": list(series)}


class SvgPlotter:
    """
    Line plot renderer.

    Features:
    - Several named series overlaid in one axes box
    - Legend when more than one series is named
    - Optional equal scaling of both axes for location plots
    """

    def __init__(self, config: Optional[PlotConfig] = None):
        self.config = config or PlotConfig()

    def _bounds(self, series: Dict[str, List[Point]]) -> Tuple[float, float, float, float]:
        xs = [p[0] for points in series.values() for p in points]
        ys = [p[1] for points in series.values() for p in points]
        if not xs:
            return 0.0, 1.0, 0.0, 1.0
        x_min, x_max, y_min, y_max = min(xs), max(xs), min(ys), max(ys)
        if x_max - x_min < 1e-12:
            x_min, x_max = x_min - 0.5, x_max + 0.5
        if y_max - y_min < 1e-12:
            y_min, y_max = y_min - 0.5, y_max + 0.5
        return x_min, x_max, y_min, y_max

    def _scales(self, bounds: Tuple[float, float, float, float]) -> Tuple[float, float]:
        cfg = self.config
        x_min, x_max, y_min, y_max = bounds
        sx = (cfg.width - 2 * cfg.margin) / (x_max - x_min)
        sy = (cfg.height - 2 * cfg.margin) / (y_max - y_min)
        if cfg.equal_aspect:
            sx = sy = min(sx, sy)
        return sx, sy

    def render(self, series: SeriesInput) -> ET.Element:
        """Build the SVG element tree for the given series"""
        cfg = self.config
        named = _normalize(series)
        bounds = self._bounds(named)
        x_min, x_max, y_min, y_max = bounds
        sx, sy = self._scales(bounds)
        left, bottom = cfg.margin, cfg.height - cfg.margin

        def to_px(p: Point) -> Tuple[float, float]:
            return left + (p[0] - x_min) * sx, bottom - (p[1] - y_min) * sy

        root = ET.Element(
            "svg",
            xmlns=SVG_NS,
            version="1.1",
            width=str(cfg.width),
            height=str(cfg.height),
            viewBox=f"0 0 {cfg.width} {cfg.height}",
        )
        ET.SubElement(root, "rect", x="0", y="0", width=str(cfg.width),
                      height=str(cfg.height), fill="white")

        # Axes box
        axes = ET.SubElement(root, "g", id="axes", stroke=AXIS_COLOR, fill="none")
        right = left + (x_max - x_min) * sx
        top = bottom - (y_max - y_min) * sy
        ET.SubElement(axes, "rect", x=_fmt(left), y=_fmt(top),
                      width=_fmt(right - left), height=_fmt(bottom - top))

        labels = ET.SubElement(root, "g", id="labels", fill=AXIS_COLOR,
                               style=f"font-family:sans-serif;font-size:{cfg.font_size}px")
        text_gap = cfg.font_size + 4
        for x, y, anchor, content in [
            (left, bottom + text_gap, "start", _tick(x_min)),
            (right, bottom + text_gap, "end", _tick(x_max)),
            (left - 4, bottom, "end", _tick(y_min)),
            (left - 4, top + cfg.font_size, "end", _tick(y_max)),
            (0.5 * (left + right), bottom + 2 * text_gap, "middle", cfg.x_label),
            (0.5 * (left + right), cfg.margin / 2, "middle", cfg.title),
        ]:
            if content:
                node = ET.SubElement(labels, "text", x=_fmt(x), y=_fmt(y))
                node.set("text-anchor", anchor)
                node.text = content
        if cfg.y_label:
            cx, cy = left - 2 * text_gap, 0.5 * (top + bottom)
            node = ET.SubElement(labels, "text", x=_fmt(cx), y=_fmt(cy),
                                 transform=f"rotate(-90 {_fmt(cx)} {_fmt(cy)})")
            node.set("text-anchor", "middle")
            node.text = cfg.y_label

        # Data
        data = ET.SubElement(root, "g", id="data", fill="none")
        for i, (name, points) in enumerate(named.items()):
            if not points:
                continue
            color = SERIES_COLORS[i % len(SERIES_COLORS)]
            coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in map(to_px, points))
            line = ET.SubElement(data, "polyline", points=coords, stroke=color)
            line.set("stroke-width", str(cfg.stroke_width))
            if name:
                ET.SubElement(line, "title").text = name

        legend = [name for name in named if name]
        if len(legend) > 1:
            group = ET.SubElement(labels, "g", id="legend")
            for i, name in enumerate(legend):
                y = top + (i + 1) * text_gap
                swatch = ET.SubElement(group, "line", x1=_fmt(right - 110), y1=_fmt(y - 4),
                                       x2=_fmt(right - 90), y2=_fmt(y - 4),
                                       stroke=SERIES_COLORS[i % len(SERIES_COLORS)])
                swatch.set("stroke-width", "2")
                ET.SubElement(group, "text", x=_fmt(right - 85), y=_fmt(y)).text = name

        return root

    def to_string(self, series: SeriesInput) -> str:
        """Serialized SVG document"""
        body = ET.tostring(self.render(series), encoding="unicode")
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"

    def save(self, series: SeriesInput, destination: Union[str, Path]) -> str:
        """Write the plot to a file"""
        path = Path(destination)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_string(series))
        logger.debug(f"SVG plot saved to {path}")
        return str(path)


def emit_svg(
    series: SeriesInput,
    destination: Union[str, Path],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    equal_aspect: bool = False,
) -> str:
    """
    Write a line plot of one or several series.

    Args:
        series: Point sequence, or mapping of series name to point sequence
        destination: Output file path
        title: Plot title
        x_label: Abscissa label
        y_label: Ordinate label
        equal_aspect: Use the same scale on both axes

    Returns:
        Path of the written file
    """
    config = PlotConfig(title=title, x_label=x_label, y_label=y_label, equal_aspect=equal_aspect)
    return SvgPlotter(config).save(series, destination)
