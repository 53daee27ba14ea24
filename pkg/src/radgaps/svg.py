"""Hand-assembled SVG plots. Output is deterministic text: no timestamps, fixed number formatting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

WIDTH, HEIGHT = 800, 500
MARGIN = 60


def _f(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class Plot:
    x_range: tuple
    y_range: tuple
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_x: bool = False
    log_y: bool = False
    items: list = field(default_factory=list)

    def _tx(self, x: float) -> float:
        lo, hi = self.x_range
        if self.log_x:
            x, lo, hi = math.log10(x), math.log10(lo), math.log10(hi)
        return MARGIN + (x - lo) / (hi - lo) * (WIDTH - 2 * MARGIN)

    def _ty(self, y: float) -> float:
        lo, hi = self.y_range
        if self.log_y:
            y, lo, hi = math.log10(y), math.log10(lo), math.log10(hi)
        y = min(max(y, lo), hi)  # clip tall spikes
        return HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2 * MARGIN)

    def line(self, x1, y1, x2, y2, color="#999", width=1.0, dash: Optional[str] = None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<line x1="{_f(self._tx(x1))}" y1="{_f(self._ty(y1))}" x2="{_f(self._tx(x2))}" '
            f'y2="{_f(self._ty(y2))}" stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def stem(self, x, y, color="#1f77b4"):
        base = self.y_range[0]
        self.line(x, base, x, y, color=color, width=1.2)

    def dot(self, x, y, color="#d62728", r=2.5):
        self.items.append(f'<circle cx="{_f(self._tx(x))}" cy="{_f(self._ty(y))}" r="{r}" fill="{color}"/>')

    def polyline(self, xs: Sequence[float], ys: Sequence[float], color="#1f77b4"):
        pts = " ".join(f"{_f(self._tx(x))},{_f(self._ty(y))}" for x, y in zip(xs, ys))
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')

    def bar(self, x_lo, x_hi, y, color="#1f77b4"):
        x0, x1 = self._tx(x_lo), self._tx(x_hi)
        y0, y1 = self._ty(y), self._ty(self.y_range[0])
        self.items.append(
            f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(max(x1 - x0, 0.5))}" height="{_f(y1 - y0)}" fill="{color}"/>'
        )

    def text(self, x_px, y_px, s, anchor="middle", size=12, rotate: Optional[float] = None):
        rot = f' transform="rotate({rotate} {_f(x_px)} {_f(y_px)})"' if rotate is not None else ""
        s = s.replace("&", "&amp;").replace("<", "&lt;")
        self.items.append(f'<text x="{_f(x_px)}" y="{_f(y_px)}" font-size="{size}" text-anchor="{anchor}"{rot}>{s}</text>')

    def render(self) -> str:
        frame = [
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
            'fill="none" stroke="#000"/>'
        ]
        labels = []
        for v, anchor_x in ((self.x_range[0], MARGIN), (self.x_range[1], WIDTH - MARGIN)):
            labels.append(f'<text x="{anchor_x}" y="{HEIGHT - MARGIN + 16}" font-size="11" text-anchor="middle">{v:g}</text>')
        for v, anchor_y in ((self.y_range[0], HEIGHT - MARGIN), (self.y_range[1], MARGIN)):
            labels.append(f'<text x="{MARGIN - 6}" y="{anchor_y + 4}" font-size="11" text-anchor="end">{v:g}</text>')
        head = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect width="100%" height="100%" fill="#fff"/>',
        ]
        self.text(WIDTH / 2, MARGIN / 2, self.title, size=14)
        self.text(WIDTH / 2, HEIGHT - MARGIN / 3, self.x_label)
        self.text(MARGIN / 3, HEIGHT / 2, self.y_label, rotate=-90)
        return "\n".join(head + frame + self.items + labels + ["</svg>"]) + "\n"


def guides(plot: Plot, max_level_q: int = 6, slopes: Sequence[float] = (1, 2)):
    """Horizontal guides at 1/q and 2/q, plus diagonals y = s*x and y = s*(1-x)."""
    levels = sorted({n / q for q in range(1, max_level_q + 1) for n in (1, 2) if n / q <= plot.y_range[1]})
    for y in levels:
        plot.line(0, y, 1, y, color="#ddd", dash="3,3")
    for s in slopes:
        x_end = min(1.0, plot.y_range[1] / s)
        plot.line(0, 0, x_end, s * x_end, color="#cfc", dash="5,3")
        plot.line(1, 0, 1 - x_end, s * x_end, color="#cfc", dash="5,3")
