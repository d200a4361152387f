"""CSV tables and self-contained SVG line charts for envelopes and unit circles."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .prox import envelope

COLORS = ["#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def fmt(v):
    """17 significant digits: parses back to the identical double."""
    return "%.17g" % v


def rlabel(r):
    return "%g" % r


def envelope_table(f, r_values, lo, hi, samples):
    """Header and rows ``x, f(x), e_r f(x) for each r`` on ``samples`` equispaced points."""
    xs = np.linspace(float(lo), float(hi), int(samples))
    header = ["x", "f"] + [f"e_rf(r={rlabel(r)})" for r in r_values]
    rows = []
    for x in xs:
        x = float(x)
        rows.append([x, f.value_or_inf(x)] + [envelope(f, r, x) for r in r_values])
    return header, rows


def to_csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(text):
    lines = text.strip("\n").split("\n")
    header = lines[0].split(",")
    rows = [[float(v) if v else math.nan for v in line.split(",")] for line in lines[1:]]
    return header, rows


def svg_chart(series, title="", width=640, height=480, equal_aspect=False):
    """Render ``[(label, xs, ys), ...]`` as one polyline per series.

    Polyline points are written in data coordinates (17 significant digits)
    inside a group whose transform maps data to the canvas, so the document
    carries the sampled values exactly.  Non-finite samples are skipped.
    """
    margin_l, margin_r, margin_t, margin_b = 60, 150, 40, 40
    pw = width - margin_l - margin_r
    ph = height - margin_t - margin_b
    xs_all = [v for _, xs, ys in series for v, w in zip(xs, ys) if math.isfinite(v) and math.isfinite(w)]
    ys_all = [w for _, xs, ys in series for v, w in zip(xs, ys) if math.isfinite(v) and math.isfinite(w)]
    x0, x1 = _span(xs_all)
    y0, y1 = _span(ys_all)
    if equal_aspect:
        half = max(x1 - x0, y1 - y0) / 2
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        x0, x1, y0, y1 = cx - half, cx + half, cy - half, cy + half
        pw = ph = min(pw, ph)
    sx = pw / (x1 - x0)
    sy = ph / (y1 - y0)
    tx = margin_l - x0 * sx
    ty = margin_t + y1 * sy

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(
        f'<rect class="frame" x="{margin_l}" y="{margin_t}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>'
    )
    # Axis lines through the origin when it is in view.
    if x0 <= 0 <= x1:
        X = tx
        out.append(f'<line class="axis" x1="{X:.3f}" y1="{margin_t}" x2="{X:.3f}" y2="{margin_t + ph}" stroke="#888"/>')
    if y0 <= 0 <= y1:
        Y = ty
        out.append(f'<line class="axis" x1="{margin_l}" y1="{Y:.3f}" x2="{margin_l + pw}" y2="{Y:.3f}" stroke="#888"/>')
    for v, anchor, X in ((x0, "start", margin_l), (x1, "end", margin_l + pw)):
        out.append(f'<text x="{X}" y="{margin_t + ph + 16}" text-anchor="{anchor}" font-size="11">{v:.4g}</text>')
    for v, Y in ((y0, margin_t + ph), (y1, margin_t + 10)):
        out.append(f'<text x="{margin_l - 4}" y="{Y}" text-anchor="end" font-size="11">{v:.4g}</text>')

    out.append(f'<g class="data" transform="matrix({sx!r} 0 0 {-sy!r} {tx!r} {ty!r})">')
    for i, (label, xs, ys) in enumerate(series):
        color = "black" if i == 0 and label == "f" else COLORS[i % len(COLORS)]
        pts = " ".join(f"{fmt(v)},{fmt(w)}" for v, w in zip(xs, ys) if math.isfinite(v) and math.isfinite(w))
        out.append(
            f'<polyline data-label="{escape(label)}" points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5" vector-effect="non-scaling-stroke"/>'
        )
    out.append("</g>")
    lx = margin_l + pw + 12
    for i, (label, _, _) in enumerate(series):
        color = "black" if i == 0 and label == "f" else COLORS[i % len(COLORS)]
        ly = margin_t + 12 + 18 * i
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _span(vals):
    if not vals:
        return -1.0, 1.0
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-12 * max(1.0, abs(lo)):
        return lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def svg_polylines(text):
    """Parse a document from :func:`svg_chart` back to ``{label: [(x, y), ...]}``."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(text)
    result = {}
    for el in root.iter("{http://www.w3.org/2000/svg}polyline"):
        pts = [tuple(float(v) for v in pair.split(",")) for pair in el.get("points").split()]
        result[el.get("data-label")] = pts
    return result
