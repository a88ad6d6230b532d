"""Learning-curve SVG rendering (no plotting dependency)."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

FG = "#222222"
GRID = "#dddddd"
REFERENCE = "#888888"
SERIES_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]

MAX_TICKS = 8
_NICE_MULTIPLIERS = (1.0, 2.0, 2.5, 5.0, 10.0)


@dataclass(frozen=True)
class CurveSeries:
    """One variant's mean curve and CI half-widths (NaN half-widths draw no band)."""

    label: str
    mean: np.ndarray
    half_width: np.ndarray


def _escape(text: str) -> str:
    """Escape XML special characters."""
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def nice_ticks(low: float, high: float, max_ticks: int = MAX_TICKS) -> list[float]:
    """
    Round tick values covering [low, high].

    Steps are 1, 2, 2.5 or 5 times a power of ten, the smallest that keeps the tick
    count at or below ``max_ticks``.

    Args:
        low: Lower data bound
        high: Upper data bound
        max_ticks: Maximum number of ticks

    Returns:
        Ascending tick values
    """
    if high <= low:
        high = low + 1.0
    raw_step = (high - low) / max(max_ticks - 1, 1)
    magnitude = 10.0 ** math.floor(math.log10(raw_step))
    for multiplier in _NICE_MULTIPLIERS:
        step = multiplier * magnitude
        first = math.floor(low / step)
        last = math.ceil(high / step)
        if last - first + 1 <= max_ticks:
            return [round(i * step, 10) for i in range(first, last + 1)]
    step = 20.0 * magnitude
    first, last = math.floor(low / step), math.ceil(high / step)
    return [round(i * step, 10) for i in range(first, last + 1)]


def _format_tick(value: float) -> str:
    return f"{value:g}"


def learning_curve_svg(
    series: Sequence[CurveSeries],
    title: str = "",
    width: int = 900,
    height: int = 520,
) -> str:
    """
    Render scaled cumulative reward curves as a standalone SVG document.

    The x axis is the episode number, the y axis the scaled cumulative reward;
    Oracle (100) and Random (0) are drawn as dashed reference lines.

    Args:
        series: Curves to draw, all of the same length
        title: Optional chart title
        width: Width in pixels
        height: Height in pixels

    Returns:
        SVG string
    """
    if not series:
        raise ValueError("No curves to plot")
    episodes = len(series[0].mean)
    margin = {"top": 50 if title else 20, "right": 190, "bottom": 60, "left": 70}
    chart_w = width - margin["left"] - margin["right"]
    chart_h = height - margin["top"] - margin["bottom"]

    lows, highs = [0.0], [100.0]
    for curve in series:
        band = np.nan_to_num(curve.half_width, nan=0.0)
        lows.append(float(np.min(curve.mean - band)))
        highs.append(float(np.max(curve.mean + band)))
    y_ticks = nice_ticks(min(lows), max(highs))
    y_min, y_max = y_ticks[0], y_ticks[-1]
    x_ticks = [tick for tick in nice_ticks(0, episodes) if tick <= episodes]
    x_max = max(episodes, 1)

    def x_pos(episode: float) -> float:
        return margin["left"] + episode / x_max * chart_w

    def y_pos(value: float) -> float:
        return margin["top"] + (y_max - value) / (y_max - y_min) * chart_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" fill="{FG}" '
            f'font-size="16" font-weight="600">{_escape(title)}</text>'
        )

    for tick in y_ticks:
        y = y_pos(tick)
        parts.append(
            f'<line x1="{margin["left"]}" y1="{y:.2f}" x2="{margin["left"] + chart_w}" '
            f'y2="{y:.2f}" stroke="{GRID}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{margin["left"] - 8}" y="{y + 4:.2f}" text-anchor="end" fill="{FG}" '
            f'font-size="11">{_format_tick(tick)}</text>'
        )
    for tick in x_ticks:
        x = x_pos(tick)
        parts.append(
            f'<text x="{x:.2f}" y="{margin["top"] + chart_h + 18}" text-anchor="middle" '
            f'fill="{FG}" font-size="11">{_format_tick(tick)}</text>'
        )

    for value, label in ((100.0, "Oracle"), (0.0, "Random")):
        y = y_pos(value)
        parts.append(
            f'<line x1="{margin["left"]}" y1="{y:.2f}" x2="{margin["left"] + chart_w}" '
            f'y2="{y:.2f}" stroke="{REFERENCE}" stroke-width="1.5" stroke-dasharray="6,4"/>'
        )
        parts.append(
            f'<text x="{margin["left"] + chart_w + 6}" y="{y + 4:.2f}" fill="{REFERENCE}" '
            f'font-size="11">{label}</text>'
        )

    xs = np.arange(1, episodes + 1)
    for index, curve in enumerate(series):
        color = SERIES_COLORS[index % len(SERIES_COLORS)]
        if not np.all(np.isnan(curve.half_width)):
            band = np.nan_to_num(curve.half_width, nan=0.0)
            upper = " ".join(
                f"{x_pos(x):.2f},{y_pos(v):.2f}" for x, v in zip(xs, curve.mean + band)
            )
            lower = " ".join(
                f"{x_pos(x):.2f},{y_pos(v):.2f}"
                for x, v in zip(xs[::-1], (curve.mean - band)[::-1])
            )
            parts.append(
                f'<polygon points="{upper} {lower}" fill="{color}" fill-opacity="0.2" '
                f'stroke="none"/>'
            )
        points = " ".join(f"{x_pos(x):.2f},{y_pos(v):.2f}" for x, v in zip(xs, curve.mean))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        legend_y = margin["top"] + 16 + index * 20
        legend_x = margin["left"] + chart_w + 60
        parts.append(
            f'<line x1="{legend_x}" y1="{legend_y - 4}" x2="{legend_x + 18}" '
            f'y2="{legend_y - 4}" stroke="{color}" stroke-width="3"/>'
        )
        parts.append(
            f'<text x="{legend_x + 24}" y="{legend_y}" fill="{FG}" '
            f'font-size="12">{_escape(curve.label)}</text>'
        )

    parts.append(
        f'<line x1="{margin["left"]}" y1="{margin["top"] + chart_h}" '
        f'x2="{margin["left"] + chart_w}" y2="{margin["top"] + chart_h}" stroke="{FG}"/>'
    )
    parts.append(
        f'<line x1="{margin["left"]}" y1="{margin["top"]}" x2="{margin["left"]}" '
        f'y2="{margin["top"] + chart_h}" stroke="{FG}"/>'
    )
    parts.append(
        f'<text x="{margin["left"] + chart_w / 2:.1f}" y="{height - 18}" text-anchor="middle" '
        f'fill="{FG}" font-size="13">Episode</text>'
    )
    parts.append(
        f'<text transform="translate(20,{margin["top"] + chart_h / 2:.1f}) rotate(-90)" '
        f'text-anchor="middle" fill="{FG}" font-size="13">Scaled mean cumulative reward (%)</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_learning_curve(
    output: Union[str, Path], series: Sequence[CurveSeries], title: str = ""
) -> Path:
    """Render ``series`` and write the SVG to ``output``."""
    output_path = Path(output)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(learning_curve_svg(series, title), encoding="utf-8")
    logger.info(f"Wrote learning curves of {len(series)} variants to {output_path}")
    return output_path
