"""Minimal static SVG charts: polylines and a diverging heatmap. No plotting dependency."""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#d62728", "#111111", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")
WIDTH, HEIGHT = 640, 400
MARGIN = 56


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _frame(title: str, xlabel: str, ylabel: str, xlim, ylim) -> list[str]:
    x0, x1 = xlim
    y0, y1 = ylim
    right, bottom = WIDTH - MARGIN / 2, HEIGHT - MARGIN
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN}" y="{MARGIN / 2}" width="{right - MARGIN}" height="{bottom - MARGIN / 2}" '
        'fill="none" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {HEIGHT / 2})">{escape(ylabel)}</text>',
        f'<text x="{MARGIN}" y="{bottom + 16}" text-anchor="middle">{_fmt(x0)}</text>',
        f'<text x="{right}" y="{bottom + 16}" text-anchor="middle">{_fmt(x1)}</text>',
        f'<text x="{MARGIN - 4}" y="{bottom}" text-anchor="end">{_fmt(y0)}</text>',
        f'<text x="{MARGIN - 4}" y="{MARGIN / 2 + 10}" text-anchor="end">{_fmt(y1)}</text>',
    ]


def _scale(v, lo, hi, a, b):
    span = hi - lo if hi != lo else 1.0
    return a + (np.asarray(v, dtype=float) - lo) / span * (b - a)


def line_chart(x: Sequence[float], curves: Mapping[str, Sequence[float]], *, title: str = "",
               xlabel: str = "", ylabel: str = "", ylim: tuple[float, float] | None = None,
               hlines: Mapping[str, float] | None = None) -> str:
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in curves.items()}
    if ylim is None:
        finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()] or [np.zeros(1)])
        ylim = (float(finite.min()), float(finite.max()))
    xlim = (float(x.min()), float(x.max())) if len(x) else (0.0, 1.0)
    right, bottom, top = WIDTH - MARGIN / 2, HEIGHT - MARGIN, MARGIN / 2
    out = _frame(title, xlabel, ylabel, xlim, ylim)
    for k, (name, y) in enumerate(ys.items()):
        ok = np.isfinite(y)
        px = _scale(x[ok], *xlim, MARGIN, right)
        py = _scale(y[ok], *ylim, bottom, top)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        out.append(f'<text x="{right - 4}" y="{top + 16 + 14 * k}" text-anchor="end" '
                   f'fill="{color}">{escape(name)}</text>')
    for name, level in (hlines or {}).items():
        py = float(_scale(level, *ylim, bottom, top))
        out.append(f'<line x1="{MARGIN}" x2="{right}" y1="{py:.2f}" y2="{py:.2f}" '
                   'stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{MARGIN + 4}" y="{py - 3:.2f}" fill="gray">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def diverging_color(value: float) -> str:
    """-1 -> blue, 0 -> white, +1 -> red, linear in between; NaN -> gray."""
    if not np.isfinite(value):
        return "#bbbbbb"
    v = float(np.clip(value, -1.0, 1.0))
    fade = int(round(255 * (1.0 - abs(v))))
    return f"#ff{fade:02x}{fade:02x}" if v >= 0 else f"#{fade:02x}{fade:02x}ff"


def heatmap(t_values: Sequence[float], g_values: Sequence[float], m: np.ndarray, *,
            title: str = "m over (T, g)", labels: np.ndarray | None = None) -> str:
    """Rect-grid heatmap with g on the x axis and T on the y axis; ``m[i, j]`` is cell (T_i, g_j)."""
    t_values, g_values = list(t_values), list(g_values)
    nt, ng = len(t_values), len(g_values)
    right, bottom, top = WIDTH - MARGIN / 2, HEIGHT - MARGIN, MARGIN / 2
    out = _frame(title, "g", "T", (min(g_values), max(g_values)), (min(t_values), max(t_values)))
    cw, ch = (right - MARGIN) / ng, (bottom - top) / nt
    for i in range(nt):
        for j in range(ng):
            x, y = MARGIN + j * cw, bottom - (i + 1) * ch
            out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                       f'fill="{diverging_color(m[i, j])}"/>')
            if labels is not None and labels[i, j]:
                out.append(f'<text x="{x + cw / 2:.2f}" y="{y + ch / 2 + 4:.2f}" '
                           f'text-anchor="middle" font-size="10">{escape(str(labels[i, j]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
