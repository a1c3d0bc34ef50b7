"""
Render Service

Minimal SVG writer: log-log plots of scaling runs with fitted and reference
lines, and layered drawings of a target cloud under a curve.
"""

import math
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from maxdist.core.errors import DomainError
from maxdist.models.geometry import CurveGraph, PointCloud
from maxdist.schemas.experiments import FitResult

WIDTH = 800
HEIGHT = 600
MARGIN = 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

PREAMBLE = """\
<?xml version="1.0" standalone="no"?>
<svg width="%(width)d" height="%(height)d" viewBox="0 0 %(width)d %(height)d" version="1.1"
    xmlns="http://www.w3.org/2000/svg">
<rect x="0" y="0" width="%(width)d" height="%(height)d" style="fill:#ffffff"/>
"""

POSTAMBLE = """\
</svg>
"""


class SVG:
    """
    Collects drawing commands in data coordinates and maps them onto a fixed
    800x600 viewport when rendered (y grows upward in data space).
    """

    def __init__(self, metadata: Optional[str] = None):
        self.min_x = None
        self.max_x = None
        self.min_y = None
        self.max_y = None
        self.commands: List[Tuple[str, tuple]] = []
        self.metadata = metadata

    def require(self, x: float, y: float):
        if self.min_x is None:
            self.min_x = self.max_x = x
            self.min_y = self.max_y = y
        else:
            self.min_x = min(self.min_x, x)
            self.max_x = max(self.max_x, x)
            self.min_y = min(self.min_y, y)
            self.max_y = max(self.max_y, y)

    def _transform(self):
        span_x = (self.max_x - self.min_x) or 1.0
        span_y = (self.max_y - self.min_y) or 1.0
        scale_x = (WIDTH - 2 * MARGIN) / span_x
        scale_y = (HEIGHT - 2 * MARGIN) / span_y

        def to_view(x: float, y: float) -> Tuple[float, float]:
            return MARGIN + (x - self.min_x) * scale_x, HEIGHT - MARGIN - (y - self.min_y) * scale_y

        return to_view

    def circle(self, x: float, y: float, radius: float = 3.0, color: str = "#000000"):
        self.require(x, y)
        self.commands.append(("circle", (x, y, radius, color)))

    def line(self, points: Sequence[Tuple[float, float]], color: str = "#000000", width: float = 1.0, dash: bool = False):
        for x, y in points:
            self.require(x, y)
        self.commands.append(("line", (list(points), color, width, dash)))

    def text(self, x: float, y: float, text: str, color: str = "#333333"):
        """Text anchored at viewport pixels, not data coordinates."""
        self.commands.append(("text", (x, y, text, color)))

    def render(self) -> str:
        if self.min_x is None:
            raise DomainError("nothing to draw")
        to_view = self._transform()
        body = []
        if self.metadata is not None:
            body.append(f"<metadata>{escape(self.metadata)}</metadata>")
        for kind, args in self.commands:
            if kind == "circle":
                x, y, radius, color = args
                cx, cy = to_view(x, y)
                body.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{radius:.3f}" style="fill:{color};stroke:none"/>')
            elif kind == "line":
                points, color, width, dash = args
                coords = " ".join("%.3f,%.3f" % to_view(x, y) for x, y in points)
                dashing = ";stroke-dasharray:6,4" if dash else ""
                body.append(f'<polyline points="{coords}" style="fill:none;stroke:{color};stroke-width:{width}{dashing}"/>')
            else:
                x, y, text, color = args
                body.append(
                    f'<text x="{x:.1f}" y="{y:.1f}" fill="{color}" font-size="13" font-family="monospace">{escape(text)}</text>'
                )
        return PREAMBLE % {"width": WIDTH, "height": HEIGHT} + "\n".join(body) + "\n" + POSTAMBLE


def log_log_plot(
    title: str,
    series: Sequence[Tuple[str, Sequence[Tuple[float, float]]]],
    fits: Sequence[FitResult] = (),
    reference_slope: Optional[float] = None,
    metadata: Optional[str] = None,
) -> str:
    """
    Log-log plot of (r, value) series with each fitted line and the
    reference slope drawn through the first point of the first series.

    Raises:
        DomainError: no positive data to plot
    """
    svg = SVG(metadata)
    drawn = 0
    for index, (label, pairs) in enumerate(series):
        pairs = [(r, v) for r, v in pairs if r > 0 and v > 0]
        if not pairs:
            continue
        color = PALETTE[index % len(PALETTE)]
        logs = [(math.log10(r), math.log10(v)) for r, v in pairs]
        svg.line(logs, color=color, width=1.5)
        for x, y in logs:
            svg.circle(x, y, color=color)
        svg.text(MARGIN + 10, MARGIN + 18 * (drawn + 1), label, color=color)
        drawn += 1
    if drawn == 0:
        raise DomainError(f"{title}: no positive values to plot")

    x_low, x_high = svg.min_x, svg.max_x
    for index, fit in enumerate(fits):
        color = PALETTE[index % len(PALETTE)]
        intercept = fit.intercept / math.log(10)
        svg.line([(x, fit.slope * x + intercept) for x in (x_low, x_high)], color=color, width=1.0, dash=True)
        svg.text(WIDTH - 320, MARGIN + 18 * (index + 1), f"{fit.method}: slope {fit.slope:.6f}", color=color)

    if reference_slope is not None:
        first = next(p for _, pairs in series for p in pairs if p[0] > 0 and p[1] > 0)
        x0, y0 = math.log10(first[0]), math.log10(first[1])
        svg.line(
            [(x, y0 + reference_slope * (x - x0)) for x in (x_low, x_high)],
            color="#7f7f7f",
            width=1.0,
            dash=True,
        )
        svg.text(WIDTH - 320, HEIGHT - MARGIN + 30, f"reference slope {reference_slope:.6f}", color="#7f7f7f")
    svg.text(MARGIN, HEIGHT - 15, f"{title}: log10 r vs log10 value")
    return svg.render()


def layered_drawing(
    cloud: Optional[PointCloud],
    curve: Optional[CurveGraph],
    metadata: Optional[str] = None,
    max_points: int = 20_000,
) -> str:
    """
    Target cloud as dots under the curve's edges (first two coordinates).

    Large clouds are thinned to every k-th point for drawing.
    """
    svg = SVG(metadata)
    if cloud is not None and not cloud.is_empty:
        stride = max(1, int(math.ceil(len(cloud) / max_points)))
        for x, y in cloud.points[::stride, :2].tolist():
            svg.circle(x, y, radius=1.0, color="#9ecae1")
    if curve is not None and not curve.is_empty:
        starts, ends = curve.segments()
        for start, end in zip(starts[:, :2].tolist(), ends[:, :2].tolist()):
            svg.line([tuple(start), tuple(end)], color="#08306b", width=1.2)
        if curve.edge_count == 0:
            for x, y in np.asarray(curve.vertices)[:, :2].tolist():
                svg.circle(x, y, radius=3.0, color="#08306b")
    return svg.render()
