"""Deterministic SVG figures. Coordinates are written with two decimals so
identical inputs always give identical bytes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from ..errors import DataError
from ..model.trend import TrendFit, predict_trend
from .density import DensityGrid

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=60, right=20, top=40, bottom=50)
_COLORS = {"linear": "#1f77b4", "exponential": "#d62728"}


@dataclass(frozen=True)
class Frame:
    """Maps data coordinates onto the SVG plotting area."""
    x0: float
    x1: float
    y0: float
    y1: float
    width: int = WIDTH
    height: int = HEIGHT

    @property
    def left(self):
        return MARGIN["left"]

    @property
    def right(self):
        return self.width - MARGIN["right"]

    @property
    def top(self):
        return MARGIN["top"]

    @property
    def bottom(self):
        return self.height - MARGIN["bottom"]

    def px(self, x):
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y):
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)


def _f(v):
    return f"{v:.2f}"


def _open(title, width=WIDTH, height=HEIGHT):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
            f'<text x="{width / 2:.2f}" y="22" text-anchor="middle" font-size="15" '
            f'font-family="sans-serif">{escape(title)}</text>']


def _axes(frame: Frame, xlabel, ylabel, nticks=5):
    out = [f'<line x1="{_f(frame.left)}" y1="{_f(frame.bottom)}" x2="{_f(frame.right)}" '
           f'y2="{_f(frame.bottom)}" stroke="black"/>',
           f'<line x1="{_f(frame.left)}" y1="{_f(frame.top)}" x2="{_f(frame.left)}" '
           f'y2="{_f(frame.bottom)}" stroke="black"/>']
    for k in range(nticks + 1):
        xv = frame.x0 + (frame.x1 - frame.x0) * k / nticks
        yv = frame.y0 + (frame.y1 - frame.y0) * k / nticks
        out.append(f'<text x="{_f(frame.px(xv))}" y="{_f(frame.bottom + 16)}" '
                   f'text-anchor="middle" font-size="10" font-family="sans-serif">{xv:.4g}</text>')
        out.append(f'<text x="{_f(frame.left - 6)}" y="{_f(frame.py(yv) + 3)}" '
                   f'text-anchor="end" font-size="10" font-family="sans-serif">{yv:.4g}</text>')
    out.append(f'<text x="{_f((frame.left + frame.right) / 2)}" y="{_f(frame.height - 12)}" '
               f'text-anchor="middle" font-size="12" font-family="sans-serif">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{_f((frame.top + frame.bottom) / 2)}" text-anchor="middle" '
               f'font-size="12" font-family="sans-serif" transform="rotate(-90 14 '
               f'{_f((frame.top + frame.bottom) / 2)})">{escape(ylabel)}</text>')
    return out


def plot_histogram(values: Sequence[float], bin_width: float = 1.0,
                   title: str = "Histogram", xlabel: str = "value") -> str:
    vals = np.asarray([v for v in values if v is not None], dtype=float)
    if vals.size == 0:
        raise DataError("histogram needs at least one value")
    if not bin_width > 0:
        raise DataError("bin width must be positive")
    lo = math.floor(vals.min() / bin_width) * bin_width
    nbins = max(1, int(math.floor((vals.max() - lo) / bin_width)) + 1)
    counts = np.zeros(nbins, dtype=int)
    for v in vals:
        counts[min(int(math.floor((v - lo) / bin_width)), nbins - 1)] += 1
    frame = Frame(lo, lo + nbins * bin_width, 0.0, float(counts.max()) * 1.05)
    out = _open(title) + _axes(frame, xlabel, "count")
    for k, c in enumerate(counts):
        if c == 0:
            continue
        x0, x1 = frame.px(lo + k * bin_width), frame.px(lo + (k + 1) * bin_width)
        y = frame.py(c)
        out.append(f'<rect class="bar" x="{_f(x0)}" y="{_f(y)}" width="{_f(x1 - x0)}" '
                   f'height="{_f(frame.bottom - y)}" fill="#4c72b0" stroke="white"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_scatter_with_fits(points: Sequence[Tuple[float, float]], fits: Sequence[TrendFit] = (),
                           title: str = "Incidents per year", xlabel: str = "t (years since 1966)",
                           ylabel: str = "incidents", samples: int = 400) -> str:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise DataError("scatter plot needs at least one point")
    t0, t1 = float(pts[:, 0].min()), float(pts[:, 0].max())
    if t1 == t0:
        t1 = t0 + 1.0
    grid = np.linspace(t0, t1, samples + 1)
    curves = [(fit, np.asarray(predict_trend(fit, grid))) for fit in fits]
    ymax = max([float(pts[:, 1].max())] + [float(c.max()) for _, c in curves])
    ymin = min([0.0, float(pts[:, 1].min())] + [float(c.min()) for _, c in curves])
    frame = Frame(t0, t1, ymin, ymax * 1.05 if ymax > 0 else 1.0)
    out = _open(title) + _axes(frame, xlabel, ylabel)
    for t, y in pts:
        out.append(f'<circle class="point" cx="{_f(frame.px(t))}" cy="{_f(frame.py(y))}" r="3" '
                   f'fill="black"/>')
    for k, (fit, curve) in enumerate(curves):
        coords = " ".join(f"{_f(frame.px(t))},{_f(frame.py(y))}" for t, y in zip(grid, curve))
        color = _COLORS.get(fit.kind, "#2ca02c")
        out.append(f'<polyline class="fit" data-kind="{fit.kind}" points="{coords}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{_f(frame.left + 10)}" y="{_f(frame.top + 14 + 14 * k)}" '
                   f'font-size="11" font-family="sans-serif" fill="{color}">'
                   f'{escape(_fit_label(fit))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _fit_label(fit: TrendFit):
    if fit.kind == "linear":
        slope, intercept = fit.params
        return f"y = {slope:.4f}t {'+' if intercept >= 0 else '-'} {abs(intercept):.4f}"
    a, b, c = fit.params
    return f"y = {a:.4g} + {b:.4g}e^({c:.4f}t)"


@dataclass(frozen=True)
class CoefEntry:
    name: str
    estimate: float
    low: float
    high: float


@dataclass(frozen=True)
class CoefPlotSpec:
    entries: Tuple[CoefEntry, ...]
    zero_line: bool = True

    @classmethod
    def from_fit(cls, names, estimates, ses, z=1.96, skip_intercept=True):
        rows = []
        for n, e, s in zip(names, estimates, ses):
            if skip_intercept and n == "(Intercept)":
                continue
            rows.append(CoefEntry(n, float(e), float(e - z * s), float(e + z * s)))
        return cls(tuple(rows))


def plot_coefficients(spec: CoefPlotSpec, title: str = "Estimated coefficients") -> str:
    if not spec.entries:
        raise DataError("coefficient plot needs at least one coefficient")
    lo = min(min(e.low for e in spec.entries), 0.0)
    hi = max(max(e.high for e in spec.entries), 0.0)
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    row_h = 22
    height = MARGIN["top"] + MARGIN["bottom"] + row_h * len(spec.entries)
    width = WIDTH + 140
    frame = Frame(lo - pad, hi + pad, 0.0, float(len(spec.entries)), width=width, height=height)
    left = 200
    def px(x):
        return left + (x - frame.x0) / (frame.x1 - frame.x0) * (width - MARGIN["right"] - left)
    out = _open(title, width, height)
    if spec.zero_line:
        out.append(f'<line class="zero" x1="{_f(px(0.0))}" y1="{_f(frame.top)}" x2="{_f(px(0.0))}" '
                   f'y2="{_f(frame.bottom)}" stroke="grey" stroke-dasharray="4,3"/>')
    for k, e in enumerate(spec.entries):
        y = frame.top + row_h * (k + 0.5)
        out.append(f'<text x="{left - 8}" y="{_f(y + 4)}" text-anchor="end" font-size="11" '
                   f'font-family="sans-serif">{escape(e.name)}</text>')
        out.append(f'<line class="interval" x1="{_f(px(e.low))}" y1="{_f(y)}" x2="{_f(px(e.high))}" '
                   f'y2="{_f(y)}" stroke="black"/>')
        out.append(f'<circle class="estimate" cx="{_f(px(e.estimate))}" cy="{_f(y)}" r="3.5" '
                   f'fill="#d62728"/>')
    out.append(f'<text x="{_f(px(frame.x0))}" y="{_f(frame.bottom + 16)}" font-size="10" '
               f'font-family="sans-serif">{frame.x0:.4g}</text>')
    out.append(f'<text x="{_f(px(frame.x1))}" y="{_f(frame.bottom + 16)}" text-anchor="end" '
               f'font-size="10" font-family="sans-serif">{frame.x1:.4g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _heat(frac):
    # white -> dark red
    r = 255 - int(round(frac * (255 - 139)))
    g = 255 - int(round(frac * 255))
    b = 255 - int(round(frac * 255))
    return f"#{r:02x}{g:02x}{b:02x}"


def plot_density(grid: DensityGrid, title: str = "Incident density") -> str:
    if grid.nx < 1 or grid.ny < 1:
        raise DataError("empty grid")
    b = grid.bounds
    frame = Frame(b.lon_min, b.lon_max, b.lat_min, b.lat_max)
    out = _open(title) + _axes(frame, "longitude", "latitude")
    top = math.log1p(int(grid.cells.max())) if grid.cells.size else 0.0
    cw = (frame.right - frame.left) / grid.nx
    ch = (frame.bottom - frame.top) / grid.ny
    for j in range(grid.ny):
        for i in range(grid.nx):
            c = int(grid.cells[j, i])
            if c == 0:
                continue
            frac = math.log1p(c) / top if top > 0 else 0.0
            x = frame.left + i * cw
            y = frame.bottom - (j + 1) * ch
            out.append(f'<rect class="cell" x="{_f(x)}" y="{_f(y)}" width="{_f(cw)}" '
                       f'height="{_f(ch)}" fill="{_heat(frac)}" data-count="{c}"/>')
    out.append(f'<text x="{_f(frame.right)}" y="{_f(frame.top - 6)}" text-anchor="end" '
               f'font-size="10" font-family="sans-serif">fill ~ log(1 + count); '
               f'max {int(grid.cells.max())}; outside {grid.out_of_bounds}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
