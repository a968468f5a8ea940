"""Minimal byte-stable SVG 1.1 emitters for report plots.

Every plot is plain text with fixed-precision coordinates and no
timestamps or randomness, so identical inputs always produce identical
bytes. Only the three shapes the reports need are supported: histogram
bars, a single box-and-whisker, and an ROC step curve.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .metrics import DistributionSummary, RocCurve, summarize_distribution

_WIDTH, _HEIGHT = 640, 420
_MARGIN = 56


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH // 2}" y="24" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{_escape(title)}</text>',
    ]


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _axes(x_label: str, y_label: str) -> list[str]:
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) // 2}" y="{_HEIGHT - 16}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">{_escape(x_label)}</text>',
        f'<text x="18" y="{(y0 + y1) // 2}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 18 {(y0 + y1) // 2})">'
        f"{_escape(y_label)}</text>",
    ]


def _x_ticks(lo: float, hi: float) -> list[str]:
    x0, x1 = _MARGIN, _WIDTH - _MARGIN
    y0 = _HEIGHT - _MARGIN
    parts = []
    for frac, value in ((0.0, lo), (0.5, (lo + hi) / 2), (1.0, hi)):
        x = x0 + frac * (x1 - x0)
        parts.append(
            f'<text x="{_fmt(x)}" y="{y0 + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{_fmt(value)}</text>'
        )
    return parts


def histogram_svg(
    summary: DistributionSummary, title: str, x_label: str = "value"
) -> str:
    """Histogram of a DistributionSummary as an SVG document string."""
    counts = np.asarray(summary.counts)
    edges = np.asarray(summary.bin_edges)
    peak = max(int(counts.max()), 1)
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN
    span = edges[-1] - edges[0]
    span = span if span > 0 else 1.0
    parts = _header(title) + _axes(x_label, "count")
    for count, lo, hi in zip(counts.tolist(), edges[:-1], edges[1:]):
        left = x0 + (lo - edges[0]) / span * (x1 - x0)
        width = max((hi - lo) / span * (x1 - x0), 0.0)
        height = count / peak * (y0 - y1)
        parts.append(
            f'<rect x="{_fmt(left)}" y="{_fmt(y0 - height)}" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'fill="steelblue" stroke="black" stroke-width="0.5"/>'
        )
    parts += _x_ticks(float(edges[0]), float(edges[-1]))
    parts.append(
        f'<text x="{x1}" y="{y1 - 8}" font-family="sans-serif" font-size="11" '
        f'text-anchor="end">max bin count = {peak}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def boxplot_svg(summary: DistributionSummary, title: str, y_label: str = "value") -> str:
    """Single box-and-whisker of a DistributionSummary as an SVG string."""
    lo, hi = summary.minimum, summary.maximum
    span = hi - lo if hi > lo else 1.0
    y0, y1 = _HEIGHT - _MARGIN, _MARGIN

    def y_of(v: float) -> float:
        return y0 - (v - lo) / span * (y0 - y1)

    cx = _WIDTH / 2
    half = 70
    parts = _header(title) + _axes("", y_label)
    parts.append(
        f'<line x1="{_fmt(cx)}" y1="{_fmt(y_of(lo))}" x2="{_fmt(cx)}" '
        f'y2="{_fmt(y_of(hi))}" stroke="black"/>'
    )
    for value in (lo, hi):
        parts.append(
            f'<line x1="{_fmt(cx - half / 2)}" y1="{_fmt(y_of(value))}" '
            f'x2="{_fmt(cx + half / 2)}" y2="{_fmt(y_of(value))}" stroke="black"/>'
        )
    box_top, box_bot = y_of(summary.q3), y_of(summary.q1)
    parts.append(
        f'<rect x="{_fmt(cx - half)}" y="{_fmt(box_top)}" width="{_fmt(2 * half)}" '
        f'height="{_fmt(box_bot - box_top)}" fill="lightsteelblue" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_fmt(cx - half)}" y1="{_fmt(y_of(summary.median))}" '
        f'x2="{_fmt(cx + half)}" y2="{_fmt(y_of(summary.median))}" '
        f'stroke="black" stroke-width="2"/>'
    )
    for label, value in (
        ("min", lo),
        ("q1", summary.q1),
        ("median", summary.median),
        ("q3", summary.q3),
        ("max", hi),
    ):
        parts.append(
            f'<text x="{_fmt(cx + half + 10)}" y="{_fmt(y_of(value) + 4)}" '
            f'font-family="sans-serif" font-size="11">{label} = {_fmt(value)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def roc_svg(curve: RocCurve, title: str = "ROC") -> str:
    """ROC step plot (FAR on x, TAR on y) as an SVG document string."""
    x0, y0 = _MARGIN, _HEIGHT - _MARGIN
    x1, y1 = _WIDTH - _MARGIN, _MARGIN

    def px(far: float) -> float:
        return x0 + far * (x1 - x0)

    def py(tar: float) -> float:
        return y0 - tar * (y0 - y1)

    coords = []
    prev_tar = 0.0
    for _, tar, far in curve.points():
        coords.append((px(far), py(prev_tar)))
        coords.append((px(far), py(tar)))
        prev_tar = tar
    coords.append((px(1.0), py(prev_tar)))
    path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in coords)
    parts = _header(title) + _axes("false accept rate", "true accept rate")
    parts.append(
        f'<polyline points="{path}" fill="none" stroke="crimson" stroke-width="1.5"/>'
    )
    parts += _x_ticks(0.0, 1.0)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_svg(document: str, path: str | Path) -> None:
    Path(path).write_text(document, encoding="utf-8")


def histogram_from_values(
    values: Sequence[float], bins: int, title: str, x_label: str = "value"
) -> str:
    return histogram_svg(summarize_distribution(values, bins), title, x_label)
