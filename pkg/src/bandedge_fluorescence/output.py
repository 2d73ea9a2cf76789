"""Deterministic CSV/JSON writers and minimal SVG line plots."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

UNITS_NOTE = (
    "frequencies in units of beta; omega is the offset from the drive "
    "frequency (= atomic frequency)"
)


def fmt(x):
    return format(float(x), ".17g")


def _params_line(params):
    return " ".join(f"{k}={v}" for k, v in sorted(params.items()))


def write_csv(path, header, columns, *, params, version, comments=()):
    """Header comments, one header row, then fixed-format rows, '\\n' endings."""
    lines = [
        f"# bandedge_fluorescence {version}",
        f"# units: {UNITS_NOTE}",
        f"# params: {_params_line(params)}",
    ]
    lines += [f"# {c}" for c in comments]
    lines.append(",".join(header))
    cols = [np.asarray(c, dtype=float) for c in columns]
    for row in zip(*cols):
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if np.isfinite(value) else str(value)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    return obj


def write_json(path, payload):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="")


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_svg(path, x, series, *, title="", xlabel="omega / beta"):
    """One SVG 1.1 document with a polyline per ``(label, y)`` in ``series``."""
    width, height, margin = 640, 400, 50
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in series]
    lo = min(float(np.min(y)) for y in ys)
    hi = max(float(np.max(y)) for y in ys)
    if hi == lo:
        hi, lo = hi + 1.0, lo - 1.0
    x0, x1 = float(x[0]), float(x[-1])

    def px(v):
        return margin + (v - x0) / (x1 - x0) * (width - 2 * margin)

    def py(v):
        return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black"/>',
        f'<text x="{width / 2:g}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{width / 2:g}" y="{height - 10}" text-anchor="middle" font-size="12">'
        f"{xlabel}</text>",
        f'<text x="{margin}" y="{height - margin + 15}" font-size="10">{x0:.6g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 15}" text-anchor="end" '
        f'font-size="10">{x1:.6g}</text>',
        f'<text x="{margin - 5}" y="{margin + 4}" text-anchor="end" font-size="10">{hi:.4g}</text>',
        f'<text x="{margin - 5}" y="{height - margin}" text-anchor="end" font-size="10">'
        f"{lo:.4g}</text>",
    ]
    if lo < 0 < hi:
        out.append(
            f'<line x1="{margin}" y1="{py(0):.6g}" x2="{width - margin}" y2="{py(0):.6g}" '
            f'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for k, ((label, _), y) in enumerate(zip(series, ys)):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(a):.6g},{py(b):.6g}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
        out.append(
            f'<text x="{width - margin - 5}" y="{margin + 15 * (k + 1)}" text-anchor="end" '
            f'font-size="11" fill="{color}">{label}</text>'
        )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="")
