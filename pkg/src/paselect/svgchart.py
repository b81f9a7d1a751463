"""Hand-emitted SVG line charts (no plotting stack).

Charts are deterministic byte-for-byte: no timestamps, fixed float formatting.
CSV output is the canonical record; these are a convenience for eyeballing.
"""

from __future__ import annotations

import numpy as np

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 62, 20, 36, 50  # margins


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _ticks(lo: float, hi: float, count: int = 6) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, count)
    return [float(t) for t in raw]


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str,
                 xlim: tuple, ylim: tuple):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        ]
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self._axes(xlabel, ylabel)

    def px(self, x: float) -> float:
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)

    def _axes(self, xlabel: str, ylabel: str) -> None:
        left, right, top, bottom = _ML, _W - _MR, _MT, _H - _MB
        self.parts.append(
            f'<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" '
            'fill="none" stroke="black" stroke-width="1"/>'
        )
        for t in _ticks(self.x0, self.x1):
            x = self.px(t)
            self.parts.append(f'<line x1="{_fmt(x)}" y1="{bottom}" x2="{_fmt(x)}" y2="{bottom + 4}" stroke="black"/>')
            self.parts.append(
                f'<text x="{_fmt(x)}" y="{bottom + 18}" text-anchor="middle">{_fmt(t)}</text>'
            )
        for t in _ticks(self.y0, self.y1):
            y = self.py(t)
            self.parts.append(f'<line x1="{left - 4}" y1="{_fmt(y)}" x2="{left}" y2="{_fmt(y)}" stroke="black"/>')
            self.parts.append(
                f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end">{_fmt(t)}</text>'
            )
        self.parts.append(
            f'<text x="{(left + right) / 2}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>'
        )
        self.parts.append(
            f'<text x="16" y="{(top + bottom) / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {(top + bottom) / 2})">{ylabel}</text>'
        )

    def polyline(self, xs, ys, color: str, dash: str = "") -> None:
        pts = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in zip(xs, ys))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>'
        )

    def markers(self, xs, ys, color: str) -> None:
        for x, y in zip(xs, ys):
            self.parts.append(
                f'<circle cx="{_fmt(self.px(x))}" cy="{_fmt(self.py(y))}" r="2.5" fill="{color}"/>'
            )

    def error_bars(self, xs, ys, errs, color: str) -> None:
        for x, y, e in zip(xs, ys, errs):
            x_, lo, hi = self.px(x), self.py(y - e), self.py(y + e)
            self.parts.append(
                f'<line x1="{_fmt(x_)}" y1="{_fmt(lo)}" x2="{_fmt(x_)}" y2="{_fmt(hi)}" '
                f'stroke="{color}" stroke-width="1"/>'
            )
            for yy in (lo, hi):
                self.parts.append(
                    f'<line x1="{_fmt(x_ - 3)}" y1="{_fmt(yy)}" x2="{_fmt(x_ + 3)}" y2="{_fmt(yy)}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )

    def legend(self, entries) -> None:
        y = _MT + 14
        for label, color in entries:
            self.parts.append(
                f'<line x1="{_W - _MR - 130}" y1="{y - 4}" x2="{_W - _MR - 110}" y2="{y - 4}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(f'<text x="{_W - _MR - 104}" y="{y}">{label}</text>')
            y += 16

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def sweep_chart(params, means, sds, xlabel: str, title: str) -> str:
    """Mean selected rank with +/- SD error bars versus the swept parameter."""
    params = np.asarray(params, dtype=float)
    means = np.asarray(means, dtype=float)
    sds = np.asarray(sds, dtype=float)
    ylo = min(0.0, float((means - sds).min()))
    yhi = float((means + sds).max()) * 1.1 + 0.1
    cv = _Canvas(title, xlabel, "mean selected rank",
                 (float(params.min()), float(params.max())), (ylo, yhi))
    cv.polyline(params, means, "#1f77b4")
    cv.markers(params, means, "#1f77b4")
    cv.error_bars(params, means, sds, "#1f77b4")
    return cv.render()


def scree_chart(observed, thresholds, title: str) -> str:
    """Observed singular values against per-rank permutation thresholds."""
    observed = np.asarray(observed, dtype=float)
    thresholds = np.asarray(thresholds, dtype=float)
    m = len(thresholds)
    ranks = np.arange(1, m + 1)
    yhi = float(max(observed[:m].max(), thresholds.max())) * 1.1 + 1e-12
    cv = _Canvas(title, "rank", "singular value", (1.0, float(max(m, 2))), (0.0, yhi))
    cv.polyline(ranks, observed[:m], "#1f77b4")
    cv.markers(ranks, observed[:m], "#1f77b4")
    cv.polyline(ranks, thresholds, "#d62728", dash="5,3")
    cv.markers(ranks, thresholds, "#d62728")
    cv.legend([("observed", "#1f77b4"), ("threshold", "#d62728")])
    return cv.render()
