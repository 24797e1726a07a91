"""CSV, JSON and SVG output for curves, reports and obstacles."""

from __future__ import annotations

import csv
import itertools
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .geometry import DiscreteCurve, Obstacle, ObstacleMode, positions

__all__ = ["curve_table", "write_csv", "round_floats", "dumps_json", "write_json", "render_svg", "write_svg"]

CSV_HEADER = ("s", "x", "y", "theta", "k")
JSON_DIGITS = 12


def curve_table(c: DiscreteCurve) -> np.ndarray:
    """Node table with columns ``s, x, y, theta, k``."""
    pts = positions(c)
    return np.column_stack([c.node_arclength(), pts[:, 0], pts[:, 1], c.node_angles(), c.node_curvature()])


def write_csv(path, c: DiscreteCurve) -> None:
    rows = curve_table(c)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([f"{v:.{JSON_DIGITS}g}" for v in r])


def round_floats(obj, digits: int = JSON_DIGITS):
    """Recursively round floats to ``digits`` significant digits; non-finite floats become None."""
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.{digits}g}") if math.isfinite(v) else None
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [round_floats(v, digits) for v in obj.tolist()]
    return obj


def dumps_json(obj, digits: int = JSON_DIGITS) -> str:
    return json.dumps(round_floats(obj, digits), indent=2, sort_keys=True) + "\n"


def write_json(path, obj, digits: int = JSON_DIGITS) -> None:
    Path(path).write_text(dumps_json(obj, digits))


def _path_d(pts: np.ndarray, close: bool = False) -> str:
    body = " L ".join(f"{x:.8g} {y:.8g}" for x, y in pts)
    return f"M {body}" + (" Z" if close else "")


def render_svg(
    curves: Sequence[np.ndarray] | np.ndarray,
    obstacle: Obstacle | None = None,
    width: int = 640,
    colors: Iterable[str] = ("#1f4e9c", "#b8322a", "#2c7a3f", "#7a4f9c"),
) -> str:
    """Equal-aspect SVG of point arrays with an optional filled obstacle region.

    Paths are written in data coordinates inside a group that flips the y
    axis, so the numbers in the path data are the curve coordinates.
    """
    if isinstance(curves, np.ndarray):
        curves = [curves]
    curves = [np.asarray(c, dtype=float) for c in curves]
    shapes = []
    if obstacle is not None:
        poly = obstacle.polygon()
        shapes.append(poly)
        if obstacle.mode is ObstacleMode.Rhomb:
            shapes.append(poly * np.array([1.0, -1.0]))
    allpts = np.vstack(curves + shapes)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = 0.05 * max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
    lo, hi = lo - pad, hi + pad
    w_data, h_data = hi - lo
    height = max(1, int(round(width * h_data / w_data)))
    stroke = 'vector-effect="non-scaling-stroke" fill="none"'
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{lo[0]:.8g} {-hi[1]:.8g} {w_data:.8g} {h_data:.8g}" preserveAspectRatio="xMidYMid meet">',
        '<g transform="scale(1,-1)">',
        f'<path d="{_path_d(np.array([[lo[0], 0.0], [hi[0], 0.0]]))}" stroke="#999" stroke-width="0.8" {stroke}/>',
    ]
    for poly in shapes:
        out.append(
            f'<path class="obstacle" d="{_path_d(poly, close=True)}" fill="#c8c8c8" '
            'stroke="#555" stroke-width="1" vector-effect="non-scaling-stroke"/>'
        )
    for c, color in zip(curves, itertools.cycle(colors)):
        out.append(f'<path class="curve" d="{_path_d(c)}" stroke="{color}" stroke-width="2" {stroke}/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def write_svg(path, curves, obstacle: Obstacle | None = None) -> None:
    Path(path).write_text(render_svg(curves, obstacle))
