"""Deterministic SVG charts with zero plotting dependencies.

Identical inputs render byte-identical markup: coordinates use a fixed
two-decimal format, colors come from a fixed palette in series order, and no
timestamps or random ids are embedded. Supported kinds are ``line`` (one
polyline per series), ``bar`` (grouped bars over a shared year axis), and
``overlay`` (first series as bars, the rest as lines).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

from .errors import InputError

WIDTH = 720.0
HEIGHT = 405.0
MARGIN_LEFT = 64.0
MARGIN_RIGHT = 18.0
MARGIN_TOP = 34.0
MARGIN_BOTTOM = 52.0

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

KINDS = ("line", "bar", "overlay")


def _fmt(x: float) -> str:
    # -0.00 and 0.00 must render identically
    out = f"{x:.2f}"
    return "0.00" if out == "-0.00" else out


@dataclass(frozen=True)
class PlotSeries:
    label: str
    years: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.years) != len(self.values):
            raise InputError(f"series {self.label!r} has {len(self.years)} years but {len(self.values)} values")
        if not self.years:
            raise InputError(f"series {self.label!r} is empty")
        if any(not math.isfinite(v) for v in self.values):
            raise InputError(f"series {self.label!r} has non-finite values")
        if list(self.years) != sorted(self.years):
            raise InputError(f"series {self.label!r} years are not ascending")


@dataclass(frozen=True)
class PlotSpec:
    title: str
    kind: str
    series: tuple[PlotSeries, ...]
    y_label: str = ""
    marker_years: tuple[int, ...] = ()  # dashed vertical rules, e.g. a sample/forecast boundary

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "marker_years", tuple(int(y) for y in self.marker_years))
        if self.kind not in KINDS:
            raise InputError(f"unknown plot kind {self.kind!r}")
        if not self.series:
            raise InputError("plot has no series")
        if self.kind in ("bar", "overlay"):
            years = self.series[0].years
            for s in self.series[1:]:
                if s.years != years:
                    raise InputError(f"{self.kind} plots need identical year axes; {s.label!r} differs")


def _tick_step(span: float) -> float:
    # 1-2-5 ladder sized to give roughly 5 intervals
    raw = span / 5.0
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * magnitude:
            return mult * magnitude
    return 10.0 * magnitude


def _y_ticks(lo: float, hi: float) -> list[float]:
    if hi == lo:
        hi = lo + 1.0
    step = _tick_step(hi - lo)
    first = math.floor(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        if t >= lo - step * 1e-9:
            ticks.append(t)
        t += step
    return ticks


def _format_tick(t: float) -> str:
    if t == int(t) and abs(t) < 1e15:
        return str(int(t))
    return f"{t:g}"


def render_svg(spec: PlotSpec) -> str:
    """Render the chart to an SVG document string."""
    all_years = sorted({y for s in spec.series for y in s.years})
    all_values = [v for s in spec.series for v in s.values]
    y_lo, y_hi = min(all_values), max(all_values)
    if spec.kind in ("bar", "overlay"):
        y_lo = min(y_lo, 0.0)
        y_hi = max(y_hi, 0.0)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    ticks = _y_ticks(y_lo, y_hi)
    y_lo = min(y_lo, ticks[0])
    y_hi = max(y_hi, ticks[-1])

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    year_lo, year_hi = all_years[0], all_years[-1]
    year_span = max(year_hi - year_lo, 1)

    # bar/overlay uses a categorical slot per year; line uses a linear scale
    slots = len(all_years)
    slot_w = plot_w / slots

    def x_linear(year: int) -> float:
        return MARGIN_LEFT + (year - year_lo) / year_span * plot_w

    def x_slot_center(year: int) -> float:
        return MARGIN_LEFT + (all_years.index(year) + 0.5) * slot_w

    x_of = x_linear if spec.kind == "line" else x_slot_center

    def y_of(value: float) -> float:
        return MARGIN_TOP + (y_hi - value) / (y_hi - y_lo) * plot_h

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(WIDTH)} {_fmt(HEIGHT)}" '
        f'width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" font-family="sans-serif">'
    )
    parts.append(f'<rect x="0" y="0" width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" fill="#ffffff"/>')
    parts.append(
        f'<text x="{_fmt(WIDTH / 2)}" y="20" text-anchor="middle" font-size="14">{escape(spec.title)}</text>'
    )

    # gridlines and y tick labels
    for t in ticks:
        y = y_of(t)
        parts.append(
            f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(y)}" x2="{_fmt(WIDTH - MARGIN_RIGHT)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(MARGIN_LEFT - 6)}" y="{_fmt(y + 4)}" text-anchor="end" font-size="10">'
            f"{escape(_format_tick(t))}</text>"
        )
    if spec.y_label:
        parts.append(
            f'<text x="14" y="{_fmt(MARGIN_TOP + plot_h / 2)}" text-anchor="middle" font-size="11" '
            f'transform="rotate(-90 14 {_fmt(MARGIN_TOP + plot_h / 2)})">{escape(spec.y_label)}</text>'
        )

    # x tick labels: first, last, and every few years in between
    label_every = max(1, (slots + 9) // 10) if spec.kind != "line" else max(1, year_span // 8 or 1)
    if spec.kind == "line":
        shown = sorted({year_lo, year_hi} | {y for y in all_years if (y - year_lo) % label_every == 0})
    else:
        shown = [y for i, y in enumerate(all_years) if i % label_every == 0 or i == slots - 1]
    for year in shown:
        x = x_of(year)
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(HEIGHT - MARGIN_BOTTOM + 16)}" text-anchor="middle" font-size="10">'
            f"{year}</text>"
        )

    for year in spec.marker_years:
        if not (year_lo <= year <= year_hi):
            continue
        x = x_of(year)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(MARGIN_TOP)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(HEIGHT - MARGIN_BOTTOM)}" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>'
        )

    # axes
    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(MARGIN_TOP)}" x2="{_fmt(MARGIN_LEFT)}" '
        f'y2="{_fmt(HEIGHT - MARGIN_BOTTOM)}" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(HEIGHT - MARGIN_BOTTOM)}" '
        f'x2="{_fmt(WIDTH - MARGIN_RIGHT)}" y2="{_fmt(HEIGHT - MARGIN_BOTTOM)}" stroke="#333333" stroke-width="1"/>'
    )

    bar_series = []
    line_series = list(enumerate(spec.series))
    if spec.kind == "bar":
        bar_series = line_series
        line_series = []
    elif spec.kind == "overlay":
        bar_series = line_series[:1]
        line_series = line_series[1:]

    if bar_series:
        group_w = slot_w * 0.8
        bar_w = group_w / len(bar_series)
        baseline = y_of(max(y_lo, min(0.0, y_hi)))
        for slot_index, (index, s) in enumerate(bar_series):
            color = PALETTE[index % len(PALETTE)]
            rects = []
            for year, value in zip(s.years, s.values):
                center = x_slot_center(year)
                x = center - group_w / 2 + slot_index * bar_w
                y_val = y_of(value)
                top = min(y_val, baseline)
                height = abs(baseline - y_val)
                rects.append(
                    f'<rect x="{_fmt(x)}" y="{_fmt(top)}" width="{_fmt(bar_w)}" '
                    f'height="{_fmt(height)}" fill="{color}"/>'
                )
            parts.append(f'<g data-series="{escape(s.label, {chr(34): "&quot;"})}">' + "".join(rects) + "</g>")

    for index, s in line_series:
        color = PALETTE[index % len(PALETTE)]
        points = " ".join(f"{_fmt(x_of(y))},{_fmt(y_of(v))}" for y, v in zip(s.years, s.values))
        parts.append(
            f'<g data-series="{escape(s.label, {chr(34): "&quot;"})}">'
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>'
            "</g>"
        )

    # legend: one swatch + label per series, laid out along the bottom
    legend_y = HEIGHT - 14.0
    x = MARGIN_LEFT
    for index, s in enumerate(spec.series):
        color = PALETTE[index % len(PALETTE)]
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(legend_y - 9)}" width="10" height="10" fill="{color}"/>')
        parts.append(
            f'<text x="{_fmt(x + 14)}" y="{_fmt(legend_y)}" font-size="11">{escape(s.label)}</text>'
        )
        x += 14 + 7.0 * len(s.label) + 18

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_category_bars(title: str, labels: Sequence[str], values: Sequence[float], y_label: str = "") -> str:
    """One labeled bar per category (e.g. grades per child series)."""
    labels = list(labels)
    values = [float(v) for v in values]
    if not labels or len(labels) != len(values):
        raise InputError("category bars need one value per label")
    if any(not math.isfinite(v) for v in values):
        raise InputError("category bars need finite values")

    y_lo = min(0.0, min(values))
    y_hi = max(0.0, max(values))
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    ticks = _y_ticks(y_lo, y_hi)
    y_lo = min(y_lo, ticks[0])
    y_hi = max(y_hi, ticks[-1])

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    slot_w = plot_w / len(labels)

    def y_of(value: float) -> float:
        return MARGIN_TOP + (y_hi - value) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(WIDTH)} {_fmt(HEIGHT)}" '
        f'width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{_fmt(WIDTH)}" height="{_fmt(HEIGHT)}" fill="#ffffff"/>',
        f'<text x="{_fmt(WIDTH / 2)}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for t in ticks:
        y = y_of(t)
        parts.append(
            f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(y)}" x2="{_fmt(WIDTH - MARGIN_RIGHT)}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(MARGIN_LEFT - 6)}" y="{_fmt(y + 4)}" text-anchor="end" font-size="10">'
            f"{escape(_format_tick(t))}</text>"
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{_fmt(MARGIN_TOP + plot_h / 2)}" text-anchor="middle" font-size="11" '
            f'transform="rotate(-90 14 {_fmt(MARGIN_TOP + plot_h / 2)})">{escape(y_label)}</text>'
        )

    baseline = y_of(max(y_lo, min(0.0, y_hi)))
    for index, (label, value) in enumerate(zip(labels, values)):
        color = PALETTE[index % len(PALETTE)]
        center = MARGIN_LEFT + (index + 0.5) * slot_w
        bar_w = slot_w * 0.6
        y_val = y_of(value)
        top = min(y_val, baseline)
        height = abs(baseline - y_val)
        parts.append(
            f'<g data-series="{escape(label, {chr(34): "&quot;"})}">'
            f'<rect x="{_fmt(center - bar_w / 2)}" y="{_fmt(top)}" width="{_fmt(bar_w)}" '
            f'height="{_fmt(height)}" fill="{color}"/>'
            "</g>"
        )
        parts.append(
            f'<text x="{_fmt(center)}" y="{_fmt(HEIGHT - MARGIN_BOTTOM + 16)}" text-anchor="middle" '
            f'font-size="10">{escape(label)}</text>'
        )
        parts.append(
            f'<text x="{_fmt(center)}" y="{_fmt(top - 4)}" text-anchor="middle" font-size="10">'
            f"{_fmt(value)}</text>"
        )

    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(MARGIN_TOP)}" x2="{_fmt(MARGIN_LEFT)}" '
        f'y2="{_fmt(HEIGHT - MARGIN_BOTTOM)}" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(MARGIN_LEFT)}" y1="{_fmt(HEIGHT - MARGIN_BOTTOM)}" '
        f'x2="{_fmt(WIDTH - MARGIN_RIGHT)}" y2="{_fmt(HEIGHT - MARGIN_BOTTOM)}" stroke="#333333" stroke-width="1"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def series_from_indicator(series) -> PlotSeries:
    """Adapt a panel series to a plot series."""
    return PlotSeries(label=f"{series.country}/{series.indicator}", years=series.years, values=series.values)
