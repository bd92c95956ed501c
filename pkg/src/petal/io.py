"""Artifact writers: CSV curves, JSON sidecars and SVG polylines.

All files are written atomically (temporary file in the target directory,
then ``os.replace``) and contain no timestamps, so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

RAY_HEADER = ["t", "re", "im"]
PARAM_HEADER = ["t", "a_re", "a_im", "residual", "method"]


def _fmt(x):
    if isinstance(x, str):
        return x
    return repr(float(x))


def atomic_write(path, text: str):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path} is empty")
    return rows[0], rows[1:]


def svg_polyline(points, title="", width=640, height=480, margin=48) -> str:
    """Single-polyline SVG 1.1 document with min/max axis annotations."""
    pts = [(float(x), float(y)) for x, y in points if math.isfinite(x) and math.isfinite(y)]
    if not pts:
        pts = [(0.0, 0.0)]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    dx = (x1 - x0) or 1.0
    dy = (y1 - y0) or 1.0
    sx = (width - 2 * margin) / dx
    sy = (height - 2 * margin) / dy

    def px(x, y):
        return margin + (x - x0) * sx, height - margin - (y - y0) * sy

    coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in (px(x, y) for x, y in pts))
    esc = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        f"  <title>{esc}</title>\n"
        f'  <rect x="{margin}" y="{margin}" width="{width - 2 * margin}" height="{height - 2 * margin}" '
        'fill="none" stroke="#999" stroke-width="1"/>\n'
        f'  <text x="{margin}" y="{height - margin + 16}" font-size="11">re {x0:.6g}</text>\n'
        f'  <text x="{width - margin}" y="{height - margin + 16}" font-size="11" text-anchor="end">re {x1:.6g}</text>\n'
        f'  <text x="{margin - 4}" y="{height - margin}" font-size="11" text-anchor="end">im {y0:.6g}</text>\n'
        f'  <text x="{margin - 4}" y="{margin + 10}" font-size="11" text-anchor="end">im {y1:.6g}</text>\n'
        f'  <polyline fill="none" stroke="#1f4e9a" stroke-width="1.5" points="{coords}"/>\n'
        "</svg>\n"
    )
