"""Minimal deterministic SVG 1.1 charts (no plotting library involved).

Coordinates are written with two decimals and labels with ``%.4g`` so the
same data always produces the same bytes.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 30, 40, 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


def nice_ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _pad(lo: float, hi: float) -> tuple:
    if not np.isfinite(lo) or not np.isfinite(hi):
        return -1.0, 1.0
    if hi - lo <= 1e-300 * max(1.0, abs(lo)):
        d = max(abs(lo) * 0.1, 1.0)
        return lo - d, hi + d
    d = 0.05 * (hi - lo)
    return lo - d, hi + d


class Chart:
    """A single plot panel with linear axes."""

    def __init__(self, title: str, xlabel: str, ylabel: str, xlim: tuple, ylim: tuple):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.body: List[str] = []

    def px(self, x: float) -> float:
        return MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y: float) -> float:
        return HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)

    def marker(self, x: float, y: float, color: str = PALETTE[0], r: float = 3.5) -> None:
        self.body.append(
            f'<circle class="marker" cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" r="{r:.1f}" '
            f'fill="{color}" fill-opacity="0.8" stroke="none"/>'
        )

    def polyline(self, xs, ys, color: str = PALETTE[0]) -> None:
        pts = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in zip(xs, ys))
        self.body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    def bar(self, x: float, width: float, value: float, color: str) -> None:
        top, bottom = self.py(max(value, 0.0)), self.py(min(value, 0.0))
        left = self.px(x - width / 2)
        w = self.px(x + width / 2) - left
        self.body.append(
            f'<rect class="bar" x="{left:.2f}" y="{top:.2f}" width="{w:.2f}" height="{bottom - top:.2f}" fill="{color}"/>'
        )

    def hline(self, y: float) -> None:
        self.body.append(
            f'<line x1="{MARGIN_L}" y1="{self.py(y):.2f}" x2="{WIDTH - MARGIN_R}" y2="{self.py(y):.2f}" '
            'stroke="#444" stroke-width="1"/>'
        )

    def text(self, x: float, y: float, s: str, anchor: str = "middle", extra: str = "") -> None:
        attrs = f" {extra}" if extra else ""
        self.body.append(f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}"{attrs}>{escape(s)}</text>')

    def _axes(self, xticks: Optional[Sequence] = None, xticklabels: Optional[Sequence[str]] = None,
              ytick_fmt=None) -> List[str]:
        out = []
        left, right = MARGIN_L, WIDTH - MARGIN_R
        top, bottom = MARGIN_T, HEIGHT - MARGIN_B
        out.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                   'fill="none" stroke="#000" stroke-width="1"/>')
        xt = nice_ticks(self.x0, self.x1) if xticks is None else list(xticks)
        labels = [f"{t:.4g}" for t in xt] if xticklabels is None else list(xticklabels)
        for t, lab in zip(xt, labels):
            px = self.px(t)
            out.append(f'<line x1="{px:.2f}" y1="{bottom}" x2="{px:.2f}" y2="{bottom + 5}" stroke="#000"/>')
            out.append(f'<text x="{px:.2f}" y="{bottom + 18}" text-anchor="middle">{escape(lab)}</text>')
        fmt = ytick_fmt or (lambda v: f"{v:.4g}")
        for t in nice_ticks(self.y0, self.y1):
            py = self.py(t)
            out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="#000"/>')
            out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{escape(fmt(t))}</text>')
        out.append(f'<text x="{(left + right) / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle" '
                   f'class="xlabel">{escape(self.xlabel)}</text>')
        out.append(f'<text x="20" y="{(top + bottom) / 2:.2f}" text-anchor="middle" class="ylabel" '
                   f'transform="rotate(-90 20 {(top + bottom) / 2:.2f})">{escape(self.ylabel)}</text>')
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-weight="bold">'
                   f'{escape(self.title)}</text>')
        return out

    def render(self, **axes_kw) -> str:
        head = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>',
        ]
        return "\n".join(head + self._axes(**axes_kw) + self.body + ["</svg>", ""])


def _limits(v) -> tuple:
    v = np.asarray(v, dtype=float)
    return _pad(float(v.min()), float(v.max()))


def scatter_1d_svg(xr, y) -> str:
    xr = np.asarray(xr, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    chart = Chart("Reduced coordinate versus y", "x_r,1", "y", _limits(xr), _limits(y))
    for a, b in zip(xr, y):
        chart.marker(a, b)
    return chart.render()


def _ramp(t: float) -> str:
    """Blue-to-yellow colour ramp for t in [0, 1]."""
    lo, hi = (68, 1, 84), (253, 231, 37)
    c = [round(a + (b - a) * t) for a, b in zip(lo, hi)]
    return "#%02x%02x%02x" % tuple(c)


def scatter_2d_svg(reduced, y) -> str:
    reduced = np.asarray(reduced, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    chart = Chart("Two-dimensional reduced coordinates (colour = y)", "x_r,1", "x_r,2",
                  _limits(reduced[:, 0]), _limits(reduced[:, 1]))
    span = np.ptp(y)
    for (a, b), v in zip(reduced[:, :2], y):
        chart.marker(a, b, _ramp((v - y.min()) / span if span > 0 else 0.5))
    chart.text(WIDTH - MARGIN_R, MARGIN_T - 6, f"y: {y.min():.4g} (dark) to {y.max():.4g} (light)", anchor="end")
    return chart.render()


def eigen_decay_svg(eigenvalues) -> str:
    lam = np.asarray(eigenvalues, dtype=float)
    floor = max(abs(lam[0]), 1e-300) * 1e-16
    logs = np.log10(np.maximum(lam, floor))
    idx = np.arange(1, lam.size + 1)
    chart = Chart("Eigenvalue decay", "index", "log10(eigenvalue)", _pad(0.5, lam.size + 0.5) if lam.size > 1
                  else (0.5, 1.5), _limits(logs))
    chart.polyline(idx, logs)
    for i, v in zip(idx, logs):
        chart.marker(i, v)
    ticks = list(range(1, lam.size + 1))
    return chart.render(xticks=ticks, xticklabels=[str(t) for t in ticks])


def eigvec_bar_svg(W1) -> str:
    W1 = np.asarray(W1, dtype=float)
    if W1.ndim == 1:
        W1 = W1[:, None]
    m, n = W1.shape
    chart = Chart("Leading eigenvector components", "variable", "component", (0.4, m + 0.6), (-1.05, 1.05))
    width = 0.8 / n
    for j in range(n):
        for i in range(m):
            chart.bar(i + 1 - 0.4 + width * (j + 0.5), width * 0.9, W1[i, j], PALETTE[j % len(PALETTE)])
    chart.hline(0.0)
    for j in range(n):
        chart.text(WIDTH - MARGIN_R - 10, MARGIN_T + 16 + 16 * j, f"w{j + 1}", anchor="end",
                   extra=f'fill="{PALETTE[j % len(PALETTE)]}"')
    ticks = list(range(1, m + 1))
    return chart.render(xticks=ticks, xticklabels=[f"x{t}" for t in ticks])


def render_plots(reduced, y, eigenvalues, W1, output_dir) -> List[str]:
    """Write the scatter, eigenvalue-decay and eigenvector-bar charts; return file names."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    reduced = np.asarray(reduced, dtype=float)
    if reduced.ndim == 1:
        reduced = reduced[:, None]
    files = {"scatter_1d.svg": scatter_1d_svg(reduced[:, 0], y)}
    if reduced.shape[1] >= 2:
        files["scatter_2d.svg"] = scatter_2d_svg(reduced, y)
    files["eigen_decay.svg"] = eigen_decay_svg(eigenvalues)
    files["eigvec_bar.svg"] = eigvec_bar_svg(W1)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
    return sorted(files)
