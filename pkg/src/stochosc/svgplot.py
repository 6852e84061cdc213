"""Self-contained SVG rendering of a trajectory: position and velocity
against time in two stacked panels.  Path elements are written by hand
so the output has no external dependencies and its structure can be
asserted in tests."""

from __future__ import annotations

import numpy as np

from .integrate import Trajectory

__all__ = ["render_svg"]

_WIDTH = 840
_PANEL_H = 260
_MARGIN_L = 70
_MARGIN_R = 25
_MARGIN_T = 50
_GAP = 55
_MAX_POINTS = 2000
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = np.linspace(lo, hi, count)
    return [float(v) for v in raw]


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1000 or abs(v) < 0.01:
        return f"{v:.2e}"
    return f"{v:.3g}"


def _panel(out: list, t: np.ndarray, series: np.ndarray, top: float,
           ylabel: str) -> None:
    """One axes box with a polyline per column of series."""
    left = _MARGIN_L
    width = _WIDTH - _MARGIN_L - _MARGIN_R
    height = _PANEL_H
    t_lo, t_hi = float(t.min()), float(t.max())
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0
    v_lo, v_hi = float(series.min()), float(series.max())
    if v_hi <= v_lo:
        v_lo, v_hi = v_lo - 1.0, v_hi + 1.0
    pad = 0.05 * (v_hi - v_lo)
    v_lo -= pad
    v_hi += pad

    def sx(v):
        return left + (v - t_lo) / (t_hi - t_lo) * width

    def sy(v):
        return top + height - (v - v_lo) / (v_hi - v_lo) * height

    out.append(
        f'<rect x="{left}" y="{top}" width="{width}" height="{height}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for tv in _ticks(t_lo, t_hi):
        x = sx(tv)
        out.append(f'<line x1="{x:.2f}" y1="{top + height}" x2="{x:.2f}" '
                   f'y2="{top + height + 5}" stroke="#333"/>')
        out.append(f'<text x="{x:.2f}" y="{top + height + 18}" '
                   f'font-size="11" text-anchor="middle">{_fmt_tick(tv)}</text>')
    for vv in _ticks(v_lo, v_hi, 4):
        y = sy(vv)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" '
                   f'y2="{y:.2f}" stroke="#333"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{_fmt_tick(vv)}</text>')
    out.append(f'<text x="{left + width / 2:.2f}" y="{top + height + 34}" '
               f'font-size="13" text-anchor="middle">t</text>')
    out.append(f'<text x="18" y="{top + height / 2:.2f}" font-size="13" '
               f'text-anchor="middle" '
               f'transform="rotate(-90 18 {top + height / 2:.2f})">{ylabel}</text>')
    for j in range(series.shape[1]):
        pts = " ".join(f"{sx(tv):.2f},{sy(v):.2f}"
                       for tv, v in zip(t, series[:, j]))
        color = _COLORS[j % len(_COLORS)]
        out.append(f'<polyline points="{pts}" fill="none" '
                   f'stroke="{color}" stroke-width="1.2"/>')


def render_svg(traj: Trajectory, model_name: str) -> str:
    """SVG document with t-vs-x and t-vs-v panels; title names model and seed."""
    if traj.states.shape[0] == 0:
        raise ValueError("cannot plot an empty trajectory")
    t = traj.times
    if len(t) > _MAX_POINTS:
        idx = np.linspace(0, len(t) - 1, _MAX_POINTS).round().astype(int)
        idx = np.unique(idx)
        t = t[idx]
        x = traj.x[idx]
        v = traj.v[idx]
    else:
        x = traj.x
        v = traj.v
    total_h = _MARGIN_T + 2 * _PANEL_H + _GAP + 45
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{total_h}" viewBox="0 0 {_WIDTH} {total_h}" '
        f'font-family="sans-serif">',
        f'<rect width="{_WIDTH}" height="{total_h}" fill="white"/>',
        f'<title>{model_name} trajectory (seed {traj.seed})</title>',
        f'<text x="{_WIDTH / 2}" y="28" font-size="16" text-anchor="middle">'
        f'{model_name} sample path, seed {traj.seed}</text>',
    ]
    _panel(out, t, x, _MARGIN_T, "x")
    _panel(out, t, v, _MARGIN_T + _PANEL_H + _GAP, "v")
    if traj.escaped:
        out.append(f'<text x="{_WIDTH / 2}" y="{total_h - 8}" font-size="12" '
                   f'fill="#d62728" text-anchor="middle">path escaped at '
                   f't = {traj.escape_time:.6g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
