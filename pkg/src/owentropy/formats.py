"""Serialisation helpers: canonical JSON, CSV rows and a minimal SVG line plot."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from xml.sax.saxutils import escape

from .algebraic import Sqrt5

SCHEMA_VERSION = "1.0"


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Sqrt5):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj, key=repr)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(doc: dict) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_clean(doc), default=_default, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_csv(header: list[str], rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_default(x) if isinstance(x, (Fraction, Sqrt5)) else x for x in r])
    return buf.getvalue()


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def svg_plot(series: dict, title: str = "", width: int = 640, height: int = 400) -> str:
    """Self-contained SVG with one polyline per series of ``(x, y)`` points."""
    pad = 50
    pts = [(float(x), float(y)) for s in series.values() for x, y in s]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad}" y="{height - pad + 16}" font-family="sans-serif" font-size="10">{x0:g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="end" font-family="sans-serif" font-size="10">{x1:g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-family="sans-serif" font-size="10">{y0:.4g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-family="sans-serif" font-size="10">{y1:.4g}</text>',
    ]
    for n, (name, s) in enumerate(sorted(series.items())):
        color = _COLORS[n % len(_COLORS)]
        path = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in s)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        out.append(
            f'<text x="{width - pad}" y="{pad + 14 * n}" text-anchor="end" fill="{color}" '
            f'font-family="sans-serif" font-size="11">{escape(str(name))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
