"""Minimal self-contained SVG emission.

Deterministic output (fixed coordinate formatting, no timestamps, no
external references) so that figures can be diffed and tested as text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


@dataclass
class SvgCanvas:
    """An append-only SVG document of fixed pixel size."""

    width: float
    height: float
    elements: list[str] = field(default_factory=list)

    def line(self, x1, y1, x2, y2, stroke="#333", stroke_width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(stroke_width)}"{d} />'
        )

    def polyline(self, points, stroke="#1f77b4", stroke_width=1.0):
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}" />'
        )

    def circle(self, cx, cy, r, fill="#d62728"):
        self.elements.append(
            f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}" />'
        )

    def rect(self, x, y, w, h, fill="none", stroke="#333", stroke_width=1.0):
        self.elements.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{_fmt(stroke_width)}" />'
        )

    def text(self, x, y, s, size=11.0, anchor="start", fill="#222"):
        self.elements.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'font-family="sans-serif" text-anchor="{anchor}" fill="{fill}">'
            f"{escape(str(s))}</text>"
        )

    def to_xml(self) -> str:
        body = "\n".join(self.elements)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
            f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">\n'
            f"{body}\n</svg>\n"
        )

    def save(self, path) -> None:
        from pathlib import Path

        Path(path).write_text(self.to_xml())


@dataclass(frozen=True)
class Frame:
    """An axes region mapping data coordinates onto canvas pixels (y up)."""

    x: float
    y: float
    w: float
    h: float
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def px(self, xv: float) -> float:
        t = (xv - self.x_min) / (self.x_max - self.x_min)
        return self.x + t * self.w

    def py(self, yv: float) -> float:
        t = (yv - self.y_min) / (self.y_max - self.y_min)
        return self.y + self.h - t * self.h

    def map(self, xs, ys):
        return [(self.px(xv), self.py(yv)) for xv, yv in zip(xs, ys)]

    def draw_axes(self, canvas: SvgCanvas, title="", x_label="", y_label=""):
        canvas.rect(self.x, self.y, self.w, self.h, stroke="#888")
        if title:
            canvas.text(self.x + self.w / 2, self.y - 6, title, anchor="middle")
        if x_label:
            canvas.text(self.x + self.w / 2, self.y + self.h + 26, x_label, anchor="middle", size=10)
        if y_label:
            canvas.text(self.x - 6, self.y - 8, y_label, anchor="end", size=10)
        for frac in (0.0, 0.5, 1.0):
            xv = self.x_min + frac * (self.x_max - self.x_min)
            yv = self.y_min + frac * (self.y_max - self.y_min)
            canvas.text(self.px(xv), self.y + self.h + 12, f"{xv:g}", anchor="middle", size=9, fill="#555")
            canvas.text(self.x - 4, self.py(yv) + 3, f"{yv:g}", anchor="end", size=9, fill="#555")


PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
