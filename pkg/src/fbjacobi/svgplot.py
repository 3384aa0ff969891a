"""Minimal standalone SVG writer for semi-logarithmic convergence plots.

Hand-rolled on purpose: one fixed layout, log ticks at decades, a polyline
with markers per series, and no external resources, so the output is
self-contained and byte-stable.
"""

import math
from xml.sax.saxutils import escape

_WIDTH, _HEIGHT = 640, 440
_LEFT, _RIGHT, _TOP, _BOTTOM = 72, 24, 42, 52
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_semilog(ns, series, title: str = "") -> str:
    """SVG text for error-vs-degree curves with a log10 vertical axis.

    `series` is a list of (label, values) pairs aligned with `ns`; entries
    that are None or not positive-finite are skipped point-wise.
    """
    ns = list(ns)
    finite = [
        v
        for _, values in series
        for v in values
        if v is not None and math.isfinite(v) and v > 0.0
    ]
    if not ns or not finite:
        raise ValueError("nothing to plot: no positive finite values")
    lo = math.floor(math.log10(min(finite)))
    hi = math.ceil(math.log10(max(finite)))
    if hi == lo:
        hi += 1
    x_min, x_max = min(ns), max(ns)
    if x_max == x_min:
        x_max += 1
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(n) -> float:
        return _LEFT + plot_w * (n - x_min) / (x_max - x_min)

    def sy(v) -> float:
        return _TOP + plot_h * (hi - math.log10(v)) / (hi - lo)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{escape(title)}</text>'
        )
    for k in range(lo, hi + 1):
        y = sy(10.0**k)
        parts.append(
            f'<line x1="{_LEFT}" y1="{_fmt(y)}" x2="{_LEFT + plot_w}" '
            f'y2="{_fmt(y)}" stroke="#cccccc" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">1e{k}</text>'
        )
    for n in ns:
        x = sx(n)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_TOP + plot_h}" x2="{_fmt(x)}" '
            f'y2="{_TOP + plot_h + 5}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_TOP + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{n}</text>'
        )
    parts.append(
        f'<text x="{_LEFT + plot_w // 2}" y="{_HEIGHT - 12}" text-anchor="middle" '
        'font-family="sans-serif" font-size="12">N</text>'
    )
    parts.append(
        f'<text x="18" y="{_TOP + plot_h // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {_TOP + plot_h // 2})">error</text>'
    )
    for idx, (label, values) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = [
            (sx(n), sy(v))
            for n, v in zip(ns, values)
            if v is not None and math.isfinite(v) and v > 0.0
        ]
        if pts:
            path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
            parts.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" '
                'stroke-width="1.5"/>'
            )
            for x, y in pts:
                parts.append(
                    f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>'
                )
        ly = _TOP + 16 + 16 * idx
        parts.append(
            f'<line x1="{_LEFT + plot_w - 120}" y1="{ly - 4}" '
            f'x2="{_LEFT + plot_w - 96}" y2="{ly - 4}" stroke="{color}" '
            'stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_LEFT + plot_w - 90}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
