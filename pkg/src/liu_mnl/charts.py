"""Minimal static SVG charts (800 x 600), written as plain text."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 190, 50, 70
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
DASHES = ("", "8,4", "2,3", "10,3,2,3")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks_log(lo: float, hi: float) -> list[float]:
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if a == b:
        b += 1
    return [10.0**k for k in range(a, b + 1)]


def _ticks_linear(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / (count - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=raw)
    start = math.floor(lo / step) * step
    out, v = [], start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def _label(v: float) -> str:
    if v != 0 and (abs(v) >= 1e5 or abs(v) < 1e-3):
        return f"{v:.0e}"
    return f"{v:g}"


class _Axis:
    def __init__(self, values, log: bool, lo_px: float, hi_px: float):
        values = [v for v in values if math.isfinite(v) and (v > 0 or not log)]
        if not values:
            values = [1.0]
        lo, hi = min(values), max(values)
        self.log = log
        self.ticks = _ticks_log(lo, hi) if log else _ticks_linear(lo, hi)
        self.lo, self.hi = self.ticks[0], self.ticks[-1]
        if self.hi == self.lo:
            self.hi = self.lo + 1.0
        self.lo_px, self.hi_px = lo_px, hi_px

    def __call__(self, v: float) -> float:
        if self.log:
            t = (math.log10(v) - math.log10(self.lo)) / (math.log10(self.hi) - math.log10(self.lo))
        else:
            t = (v - self.lo) / (self.hi - self.lo)
        return self.lo_px + t * (self.hi_px - self.lo_px)


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<text x="{LEFT + (WIDTH - LEFT - RIGHT) / 2}" y="{HEIGHT - 20}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="22" y="{TOP + (HEIGHT - TOP - BOTTOM) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 22 {TOP + (HEIGHT - TOP - BOTTOM) / 2})">{escape(ylabel)}</text>',
    ]


def _axes(x: _Axis | None, y: _Axis, x_labels=None) -> list[str]:
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP
    out = [f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>']
    for t in y.ticks:
        py = _fmt(y(t))
        out.append(f'<line x1="{x0}" y1="{py}" x2="{x1}" y2="{py}" stroke="#dddddd"/>')
        out.append(f'<text x="{x0 - 6}" y="{py}" text-anchor="end" dominant-baseline="middle">{_label(t)}</text>')
    if x is not None:
        for t in x.ticks:
            px = _fmt(x(t))
            out.append(f'<line x1="{px}" y1="{y0}" x2="{px}" y2="{y0 + 5}" stroke="black"/>')
            out.append(f'<text x="{px}" y="{y0 + 18}" text-anchor="middle">{_label(t)}</text>')
    for px, text in x_labels or ():
        out.append(f'<text x="{_fmt(px)}" y="{y0 + 18}" text-anchor="middle">{escape(text)}</text>')
    return out


def _legend(entries) -> list[str]:
    out = []
    for k, (label, colour, dash) in enumerate(entries):
        y = TOP + 10 + 20 * k
        x = WIDTH - RIGHT + 15
        style = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 30}" y2="{y}" stroke="{colour}" stroke-width="2"{style}/>')
        out.append(f'<text x="{x + 38}" y="{y}" dominant-baseline="middle">{escape(label)}</text>')
    return out


def line_chart(series, title: str, xlabel: str, ylabel: str, log_x=False, log_y=True, styles=None) -> str:
    """`series` maps a label to a list of (x, y) points; returns the SVG document.

    `styles` optionally maps a label to a (colour, dash) pair.
    """
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_axis = _Axis(xs, log_x, LEFT, WIDTH - RIGHT)
    y_axis = _Axis(ys, log_y, HEIGHT - BOTTOM, TOP)
    out = _frame(title, xlabel, ylabel) + _axes(x_axis, y_axis)
    legend = []
    for k, (label, pts) in enumerate(series.items()):
        colour, dash = (styles or {}).get(label, (PALETTE[k % len(PALETTE)], ""))
        pts = [(x, y) for x, y in pts if math.isfinite(y) and (y > 0 or not log_y)]
        coords = " ".join(f"{_fmt(x_axis(x))},{_fmt(y_axis(y))}" for x, y in pts)
        style = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="2"{style}/>')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(x_axis(x))}" cy="{_fmt(y_axis(y))}" r="3" fill="{colour}"/>')
        legend.append((label, colour, dash))
    out += _legend(legend)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(groups, title: str, ylabel: str, log_y=True) -> str:
    """`groups` maps a group name to {bar label: value}; bars are coloured by label."""
    labels = []
    for bars in groups.values():
        labels += [b for b in bars if b not in labels]
    values = [v for bars in groups.values() for v in bars.values()]
    y_axis = _Axis(values, log_y, HEIGHT - BOTTOM, TOP)
    plot_w = WIDTH - LEFT - RIGHT
    group_w = plot_w / max(len(groups), 1)
    bar_w = 0.8 * group_w / max(len(labels), 1)
    x_labels = []
    bars_svg = []
    base = HEIGHT - BOTTOM
    for g, (name, bars) in enumerate(groups.items()):
        gx = LEFT + g * group_w + 0.1 * group_w
        x_labels.append((gx + 0.4 * group_w, name))
        for k, label in enumerate(labels):
            v = bars.get(label)
            if v is None or not math.isfinite(v) or (log_y and v <= 0):
                continue
            top = y_axis(v)
            bars_svg.append(
                f'<rect x="{_fmt(gx + k * bar_w)}" y="{_fmt(top)}" width="{_fmt(bar_w * 0.9)}" '
                f'height="{_fmt(base - top)}" fill="{PALETTE[k % len(PALETTE)]}"/>'
            )
    out = _frame(title, "", ylabel) + _axes(None, y_axis, x_labels) + bars_svg
    out += _legend([(label, PALETTE[k % len(PALETTE)], "") for k, label in enumerate(labels)])
    out.append("</svg>")
    return "\n".join(out) + "\n"
