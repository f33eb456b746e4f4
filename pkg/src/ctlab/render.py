"""Static SVG rendering of disk embeddings.

One Poincare disk per sheet; plain ball renders use a single disk.
Ladder renders lay the sheets of each block out in a row, one row per
block.  Output is deterministic; an optional timestamp comment is off
by default.
"""

from __future__ import annotations

import datetime

import numpy as np

PALETTE = {
    "ball-edges": "#b0b6c0",
    "qcsets": "#7b61ff",
    "geodesic": "#d7263d",
    "electric-geodesic": "#1b998b",
    "electro-ambient": "#f46036",
    "ladder-level": "#2e294e",
}

KNOWN_LAYERS = tuple(PALETTE)

_DISK_R = 220.0
_PAD = 24.0


class RenderError(Exception):
    pass


def _xy(z, cx, cy):
    return (cx + z.real * _DISK_R, cy - z.imag * _DISK_R)


def _disk(cx, cy, label):
    return [f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{_DISK_R:.2f}" '
            f'fill="none" stroke="#222" stroke-width="1.5"/>',
            f'<text x="{cx:.2f}" y="{cy + _DISK_R + 16:.2f}" '
            f'text-anchor="middle" font-size="12">{label}</text>']


def _edges_svg(ball, cx, cy, color):
    out = []
    pts = ball.points
    for g in range(4):
        col = ball.adj[:, g]
        for u in range(ball.n_vertices):
            v = col[u]
            if v < 0:
                continue
            x1, y1 = _xy(pts[u], cx, cy)
            x2, y2 = _xy(pts[v], cx, cy)
            out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                       f'y2="{y2:.2f}" stroke="{color}" stroke-width="0.4"/>')
    return out


def _path_svg(ball, verts, cx, cy, color, width=1.6):
    pts = [_xy(ball.points[v], cx, cy) for v in verts]
    d = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    return [f'<polyline points="{d}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"/>']


def _qcset_svg(es, cx, cy, color):
    out = []
    for q in es.lifts():
        if q.members.size < 2:
            continue
        out.extend(_path_svg(es.ball, list(q.members[np.argsort(q.exponents)]),
                             cx, cy, color, width=0.8))
    return out


def render_ball(ball, layers, out_path, es=None, geodesic=None,
                electric_geodesic=None, electro_ambient=None,
                timestamp=False):
    """Single-disk scene with the requested layers."""
    for lay in layers:
        if lay not in KNOWN_LAYERS:
            raise RenderError(f"unknown layer {lay!r}")
    w = h = 2 * (_DISK_R + _PAD)
    cx = cy = _DISK_R + _PAD
    body = _disk(cx, cy, f"R={ball.radius}")
    if "ball-edges" in layers:
        body += _edges_svg(ball, cx, cy, PALETTE["ball-edges"])
    if "qcsets" in layers:
        if es is None:
            raise RenderError("layer 'qcsets' needs an electric space")
        body += _qcset_svg(es, cx, cy, PALETTE["qcsets"])
    if "geodesic" in layers and geodesic is not None:
        body += _path_svg(ball, geodesic.vertices, cx, cy, PALETTE["geodesic"])
    if "electric-geodesic" in layers and electric_geodesic is not None:
        body += _path_svg(ball, electric_geodesic.vertices, cx, cy,
                          PALETTE["electric-geodesic"])
    if "electro-ambient" in layers and electro_ambient is not None:
        body += _path_svg(ball, electro_ambient.vertices, cx, cy,
                          PALETTE["electro-ambient"])
    return _write_svg(out_path, w, h, body, timestamp)


def render_ladder(ladder, out_path, timestamp=False):
    """One disk per sheet, sheets of each block laid out in a row."""
    model = ladder.model
    per_block = {}
    for layer in ladder.layers():
        sh = model.sheets[layer]
        per_block.setdefault(sh.block, []).append(layer)
    n_rows = len(per_block)
    n_cols = max(len(v) for v in per_block.values())
    w = n_cols * 2 * (_DISK_R + _PAD)
    h = n_rows * 2 * (_DISK_R + _PAD) + 20
    body = []
    for row, (block, layers_of) in enumerate(sorted(per_block.items())):
        for col, layer in enumerate(sorted(layers_of)):
            cx = (_DISK_R + _PAD) * (2 * col + 1)
            cy = (_DISK_R + _PAD) * (2 * row + 1)
            sh = model.sheets[layer]
            body += _disk(cx, cy, f"block {block} level {sh.level} ({sh.mode})")
            lp = ladder.paths[layer]
            color = (PALETTE["ladder-level"] if lp.mode == "hyp"
                     else PALETTE["electro-ambient"])
            body += _path_svg(model.ball, lp.vertices, cx, cy, color)
    return _write_svg(out_path, w, h, body, timestamp)


def _write_svg(out_path, w, h, body, timestamp):
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" '
            f'height="{h:.0f}" viewBox="0 0 {w:.0f} {h:.0f}">']
    if timestamp:
        head.append(f"<!-- rendered {datetime.datetime.now().isoformat()} -->")
    tail = ["</svg>"]
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(head + body + tail) + "\n")
    return out_path
