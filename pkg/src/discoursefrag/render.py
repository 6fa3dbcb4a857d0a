"""Deterministic visual snapshots: force layout, SVG panels, montage grid.

SVG is built by hand with fixed 4-decimal coordinate formatting, so the
same graph, seed, and style always produce identical bytes. No rasterizer
or external layout engine is involved.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping
from xml.sax.saxutils import escape

import numpy as np

from .graph import DailyGraph, PersonaNode, persona_sort_key

LAYOUT_ITERATIONS = 300
INITIAL_TEMPERATURE = 0.1   # max displacement per iteration, cooled linearly
REPULSION = 1.0             # scales k^2 / d
ATTRACTION = 1.0            # scales d^2 / k
_EPS = 1e-9
_ROW_BLOCK = 512            # bounds the pairwise-force working set


@dataclass(frozen=True)
class LayoutResult:
    positions: dict[PersonaNode, tuple[float, float]]
    seed: int
    iterations: int


def layout(g: DailyGraph, seed: int) -> LayoutResult:
    """Fruchterman-Reingold style layout on the unit square.

    Runs a fixed number of iterations with a linearly cooled displacement
    cap; node indices follow sorted node order and initial positions come
    from one seeded generator, so the result is a pure function of
    (graph, seed).
    """
    nodes = sorted(g.nodes, key=persona_sort_key)
    n = len(nodes)
    rng = np.random.default_rng(seed)
    if n == 0:
        return LayoutResult(positions={}, seed=seed, iterations=LAYOUT_ITERATIONS)
    pos = rng.random((n, 2))
    if n == 1:
        x, y = pos[0]
        return LayoutResult(positions={nodes[0]: (float(x), float(y))},
                            seed=seed, iterations=LAYOUT_ITERATIONS)

    index = {node: i for i, node in enumerate(nodes)}
    pairs = {(index[a], index[b]) for a, b in g.simple_edges()}
    if pairs:
        edge_a = np.fromiter((p[0] for p in sorted(pairs)), dtype=np.int64)
        edge_b = np.fromiter((p[1] for p in sorted(pairs)), dtype=np.int64)
    else:
        edge_a = edge_b = np.zeros(0, dtype=np.int64)

    k = math.sqrt(1.0 / n)
    for it in range(LAYOUT_ITERATIONS):
        temperature = INITIAL_TEMPERATURE * (1.0 - it / LAYOUT_ITERATIONS)
        disp = np.zeros((n, 2))
        for start in range(0, n, _ROW_BLOCK):
            stop = min(start + _ROW_BLOCK, n)
            delta = pos[start:stop, None, :] - pos[None, :, :]
            dist = np.sqrt((delta * delta).sum(axis=2))
            np.maximum(dist, _EPS, out=dist)
            force = REPULSION * (k * k) / (dist * dist)
            disp[start:stop] += (delta * force[:, :, None]).sum(axis=1)
        if len(edge_a):
            delta = pos[edge_a] - pos[edge_b]
            dist = np.sqrt((delta * delta).sum(axis=1))
            np.maximum(dist, _EPS, out=dist)
            pull = ATTRACTION * (dist / k)[:, None] * delta
            np.subtract.at(disp, edge_a, pull)
            np.add.at(disp, edge_b, pull)
        length = np.sqrt((disp * disp).sum(axis=1))
        np.maximum(length, _EPS, out=length)
        scale = np.minimum(length, temperature) / length
        pos += disp * scale[:, None]
        np.clip(pos, 0.0, 1.0, out=pos)

    return LayoutResult(
        positions={node: (float(pos[i, 0]), float(pos[i, 1]))
                   for node, i in index.items()},
        seed=seed, iterations=LAYOUT_ITERATIONS,
    )


@dataclass(frozen=True)
class SnapshotStyle:
    width: float = 1000.0
    height: float = 1000.0
    margin: float = 60.0
    node_radius: float = 7.0
    receiver_radius: float = 5.0
    colors: Mapping[str, str] = field(default_factory=dict)
    receiver_color: str = "#999999"
    edge_color: str = "#bbbbbb"
    edge_width: float = 1.0
    background: str = "#ffffff"
    font_family: str = "sans-serif"
    font_size: float = 28.0
    montage_columns: int = 7


def _fmt(v: float) -> str:
    return f"{v:.4f}"


@dataclass(frozen=True)
class Snapshot:
    day: dt.date
    width: float
    height: float
    body: str
    svg: bytes


def _panel_body(g: DailyGraph, lay: LayoutResult, style: SnapshotStyle) -> str:
    for node in g.nodes:
        if node.category is not None and node.category not in style.colors:
            raise ValueError(f"no color configured for category {node.category!r}")
        if node not in lay.positions:
            raise ValueError(f"layout is missing node {node.key}")

    def place(node: PersonaNode) -> tuple[float, float]:
        x, y = lay.positions[node]
        px = style.margin + x * (style.width - 2 * style.margin)
        py = style.margin + y * (style.height - 2 * style.margin)
        return px, py

    lines = [f'<rect width="{_fmt(style.width)}" height="{_fmt(style.height)}" '
             f'fill="{style.background}"/>']
    lines.append('<g class="edges">')
    for a, b in g.simple_edges():
        ax, ay = place(a)
        bx, by = place(b)
        lines.append(f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" '
                     f'x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                     f'stroke="{style.edge_color}" stroke-width="{_fmt(style.edge_width)}"/>')
    lines.append('</g>')
    lines.append('<g class="nodes">')
    for node in sorted(g.nodes, key=persona_sort_key):
        x, y = place(node)
        if node.category is None:
            color, radius = style.receiver_color, style.receiver_radius
        else:
            color, radius = style.colors[node.category], style.node_radius
        lines.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(radius)}" '
                     f'fill="{color}"/>')
    lines.append('</g>')
    lines.append(f'<text class="day-label" x="{_fmt(style.margin / 2)}" '
                 f'y="{_fmt(style.font_size + 4)}" font-family="{style.font_family}" '
                 f'font-size="{_fmt(style.font_size)}" fill="#333333">'
                 f'{escape(g.day.isoformat())}</text>')
    return "\n".join(lines)


def snapshot(g: DailyGraph, lay: LayoutResult, style: SnapshotStyle) -> Snapshot:
    """Render one day panel; byte-stable for identical inputs."""
    body = _panel_body(g, lay, style)
    doc = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(style.width)}" '
        f'height="{_fmt(style.height)}" '
        f'viewBox="0 0 {_fmt(style.width)} {_fmt(style.height)}">\n'
        f"{body}\n</svg>\n"
    )
    return Snapshot(day=g.day, width=style.width, height=style.height,
                    body=body, svg=doc.encode("utf-8"))


def emit_snapshot(g: DailyGraph, lay: LayoutResult, style: SnapshotStyle) -> bytes:
    return snapshot(g, lay, style).svg


def montage(snapshots: Iterable[Snapshot], style: SnapshotStyle) -> bytes:
    """Chronological grid of day panels, one panel per snapshot.

    Input order does not matter; panels are laid out left to right, top
    to bottom by day.
    """
    panels = sorted(snapshots, key=lambda s: s.day)
    if not panels:
        raise ValueError("montage needs at least one snapshot")
    n = len(panels)
    cols = max(1, min(style.montage_columns, n))
    rows = math.ceil(n / cols)
    pad = 10.0
    cell_w = style.width / 2
    cell_h = style.height / 2
    total_w = cols * (cell_w + pad) + pad
    total_h = rows * (cell_h + pad) + pad

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(total_w)}" '
        f'height="{_fmt(total_h)}" viewBox="0 0 {_fmt(total_w)} {_fmt(total_h)}">',
        f'<rect width="{_fmt(total_w)}" height="{_fmt(total_h)}" fill="#f2f2f2"/>',
    ]
    for i, snap in enumerate(panels):
        col, row = i % cols, i // cols
        tx = pad + col * (cell_w + pad)
        ty = pad + row * (cell_h + pad)
        sx = cell_w / snap.width
        sy = cell_h / snap.height
        parts.append(f'<g class="panel" id="panel-{snap.day.isoformat()}" '
                     f'transform="translate({_fmt(tx)},{_fmt(ty)}) '
                     f'scale({_fmt(sx)},{_fmt(sy)})">')
        parts.append(snap.body)
        parts.append(
            f'<rect width="{_fmt(snap.width)}" height="{_fmt(snap.height)}" '
            f'fill="none" stroke="#888888" stroke-width="2.0000"/>')
        parts.append('</g>')
    parts.append('</svg>')
    return ("\n".join(parts) + "\n").encode("utf-8")
