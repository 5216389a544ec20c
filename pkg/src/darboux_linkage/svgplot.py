"""Minimal deterministic SVG plots of point trajectories."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .linkage_model import Trajectory

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")

# rows are the screen x and y axes, in world coordinates
VIEWS = {
    "z": np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
    "y": np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
    "x": np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
    "iso": np.array([
        [1 / math.sqrt(2), -1 / math.sqrt(2), 0.0],
        [-1 / math.sqrt(6), -1 / math.sqrt(6), 2 / math.sqrt(6)],
    ]),
}


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(
    trajectories: Sequence[Trajectory],
    view: str = "iso",
    width: int = 640,
    height: int = 480,
    title: str = "",
) -> str:
    """Orthographic projection of every trajectory as one polyline each."""
    if view not in VIEWS:
        raise ValueError(f"unknown view {view!r}; choose from {sorted(VIEWS)}")
    if not trajectories or any(not t.rows for t in trajectories):
        raise ValueError("cannot plot an empty trajectory")
    proj = VIEWS[view]
    planar = [t.xyz() @ proj.T for t in trajectories]
    allpts = np.vstack(planar)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    margin, legend_w = 30.0, 140.0
    scale = min((width - 2 * margin - legend_w) / span[0], (height - 2 * margin) / span[1])
    cx = margin + ((width - 2 * margin - legend_w) - scale * span[0]) / 2
    cy = margin + ((height - 2 * margin) - scale * span[1]) / 2

    def screen(p):
        return cx + scale * (p[0] - lo[0]), height - (cy + scale * (p[1] - lo[1]))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        lines.append(f'<text x="{margin}" y="{margin / 2 + 5}" font-family="sans-serif" font-size="13">{title}</text>')
    for i, (traj, pts) in enumerate(zip(trajectories, planar)):
        color = COLORS[i % len(COLORS)]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (screen(p) for p in pts))
        lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}">'
            f"<title>{traj.label}</title></polyline>"
        )
        ly = margin + 20 * i
        lx = width - legend_w + 10
        lines.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        label = f"{traj.label} (assembly {traj.assembly})"
        lines.append(f'<text x="{lx + 26}" y="{ly + 4}" font-family="sans-serif" font-size="11">{label}</text>')
    lines.append(f'<text x="{margin}" y="{height - 8}" font-family="sans-serif" font-size="10">view: {view}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
