"""Minimal deterministic SVG line charts.

Hand-rolled on purpose: the output must be byte-identical across runs and
platforms, so no plotting library is used. Coordinates are formatted with a
fixed precision and series are drawn in insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Series", "LineChart"]

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
)


def _fmt(x: float) -> str:
    return f"{x:.2f}"


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str
    dash: str | None = None


@dataclass
class LineChart:
    """A fixed-size chart with a log or linear x axis and a legend."""

    title: str
    x_label: str
    y_label: str
    width: int = 720
    height: int = 480
    log_x: bool = True
    series: list = field(default_factory=list)
    margin_left: int = 64
    margin_right: int = 16
    margin_top: int = 36
    margin_bottom: int = 48

    def add_series(self, label, x, y, dash=None):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("series x and y must be 1-D arrays of equal length")
        color = _PALETTE[len(self.series) % len(_PALETTE)]
        self.series.append(Series(label, x, y, color, dash))

    def _x_transform(self, x):
        return np.log10(x) if self.log_x else np.asarray(x, dtype=float)

    def _limits(self):
        xs = np.concatenate([self._x_transform(s.x) for s in self.series])
        ys = np.concatenate([s.y for s in self.series])
        x0, x1 = float(xs.min()), float(xs.max())
        y0, y1 = min(0.0, float(ys.min())), float(ys.max())
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
        return x0, x1, y0, y1 * 1.05

    def _x_ticks(self, x0, x1):
        if self.log_x:
            decades = np.arange(np.ceil(x0 - 1e-9), np.floor(x1 + 1e-9) + 1)
            return [(d, f"{10.0 ** d:g}") for d in decades]
        ticks = np.linspace(x0, x1, 6)
        return [(t, f"{t:g}") for t in ticks]

    def _y_ticks(self, y0, y1):
        span = y1 - y0
        step = 10.0 ** np.floor(np.log10(span / 4.0))
        for mult in (1.0, 2.0, 5.0, 10.0):
            if span / (step * mult) <= 8:
                step *= mult
                break
        start = np.ceil(y0 / step) * step
        vals = np.arange(start, y1 + step / 2.0, step)
        return [(v, f"{v:g}") for v in vals]

    def render(self) -> str:
        if not self.series:
            raise ValueError("chart has no series")
        x0, x1, y0, y1 = self._limits()
        px0, px1 = self.margin_left, self.width - self.margin_right
        py0, py1 = self.height - self.margin_bottom, self.margin_top

        def sx(x):
            return px0 + (x - x0) / (x1 - x0) * (px1 - px0)

        def sy(y):
            return py0 + (y - y0) / (y1 - y0) * (py1 - py0)

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>',
            f'<text x="{self.width // 2}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{self.title}</text>',
        ]
        # axes and grid
        for xv, lab in self._x_ticks(x0, x1):
            px = sx(xv)
            out.append(
                f'<line x1="{_fmt(px)}" y1="{py0}" x2="{_fmt(px)}" y2="{py1}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{_fmt(px)}" y="{py0 + 18}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{lab}</text>'
            )
        for yv, lab in self._y_ticks(y0, y1):
            py = sy(yv)
            out.append(
                f'<line x1="{px0}" y1="{_fmt(py)}" x2="{px1}" y2="{_fmt(py)}" '
                'stroke="#dddddd" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{px0 - 6}" y="{_fmt(py + 4)}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{lab}</text>'
            )
        out.append(
            f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
            'fill="none" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{(px0 + px1) // 2}" y="{self.height - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{self.x_label}</text>'
        )
        out.append(
            f'<text x="14" y="{(py0 + py1) // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 14 {(py0 + py1) // 2})">{self.y_label}</text>'
        )
        # series
        for s in self.series:
            tx = self._x_transform(s.x)
            pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(tx, s.y))
            dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
            out.append(
                f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
                f'stroke-width="1.5"{dash}/>'
            )
        # legend, top-left inside the plot area
        lx, ly = px0 + 10, py1 + 14
        for i, s in enumerate(self.series):
            yy = ly + 16 * i
            dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
            out.append(
                f'<line x1="{lx}" y1="{yy - 4}" x2="{lx + 24}" y2="{yy - 4}" '
                f'stroke="{s.color}" stroke-width="1.5"{dash}/>'
            )
            out.append(
                f'<text x="{lx + 30}" y="{yy}" font-family="sans-serif" '
                f'font-size="11">{s.label}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"
