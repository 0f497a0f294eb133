"""Self-contained SVG line charts for run and sweep outputs.

Not a plotting library: fixed layout, linear axes, min/max tick labels and a
small legend, emitted as a single deterministic SVG document so output files
are byte-stable across reruns.
"""
from __future__ import annotations

import math
from typing import Sequence

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _bounds(values: list[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = 0.5 if lo == 0.0 else abs(lo) * 0.05
        return lo - pad, hi + pad
    return lo, hi


def line_plot_svg(series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
                  *, title: str = "", x_label: str = "", y_label: str = "",
                  width: int = 720, height: int = 440) -> str:
    """Render (label, xs, ys) series as one SVG line plot and return the text."""
    ml, mr, mt, mb = 64, 16, 30, 46
    plot_w = width - ml - mr
    plot_h = height - mt - mb
    x0, x1 = _bounds([x for _, xs, _ in series for x in xs])
    y0, y1 = _bounds([y for _, _, ys in series for y in ys])

    def sx(x: float) -> float:
        return ml + (x - x0) / (x1 - x0) * plot_w

    def sy(y: float) -> float:
        return mt + (y1 - y) / (y1 - y0) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + plot_h}" x2="{ml + plot_w}" y2="{mt + plot_h}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + plot_h}" '
        'stroke="black" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{ml + plot_w / 2:.1f}" y="{height - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{mt + plot_h / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {mt + plot_h / 2:.1f})">{y_label}</text>'
        )
    ticks = [
        (f"{x0:.6g}", ml, mt + plot_h + 16, "middle"),
        (f"{x1:.6g}", ml + plot_w, mt + plot_h + 16, "middle"),
    ]
    for text, x, y, anchor in ticks:
        parts.append(
            f'<text x="{x}" y="{y}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="11">{text}</text>'
        )
    parts.append(
        f'<text x="{ml - 6}" y="{mt + plot_h}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y0:.6g}</text>'
    )
    parts.append(
        f'<text x="{ml - 6}" y="{mt + 10}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y1:.6g}</text>'
    )
    for k, (label, xs, ys) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = mt + 14 + 16 * k
        lx = ml + plot_w - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
