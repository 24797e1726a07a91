"""Discrete curves, obstacles, discrete energies and first-variation diagnostics.

A :class:`DiscreteCurve` is stored by its total length ``L`` and the tangent
angles ``theta_1..theta_N`` of ``N`` equal segments, so it is unit speed by
construction.  With ``h = L/N`` the nodes are

    p_0 = base,   p_i = base + h * sum_{j<=i} (cos theta_j, sin theta_j)

and the discrete bending energy is ``B = sum_i (theta_{i+1} - theta_i)^2 / h``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DiscreteCurve",
    "ObstacleMode",
    "Obstacle",
    "SymmetricCone",
    "SampledLipschitz",
    "CoincidenceSummary",
    "ObstacleError",
    "positions",
    "discrete_energy",
    "energy_gradient",
    "positions_vjp",
    "constraint_slack",
    "slack_values",
    "vi_pairing",
    "midpoint_bump",
    "nonverticality_check",
    "c_psi",
    "polyline_bending",
    "from_angle_function",
    "mirror_half",
    "obstacle_from_dict",
]

MIN_SEGMENTS = 8


class ObstacleError(ValueError):
    """Raised for obstacles violating the standing assumptions."""


@dataclass(frozen=True)
class DiscreteCurve:
    total_length: float
    angles: np.ndarray
    base_point: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).copy()
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)
        if angles.ndim != 1 or angles.size < MIN_SEGMENTS:
            raise ValueError(f"a discrete curve needs at least {MIN_SEGMENTS} segments")
        if not (np.isfinite(self.total_length) and self.total_length > 0):
            raise ValueError("total_length must be positive and finite")
        if not np.all(np.isfinite(angles)):
            raise ValueError("angles must be finite")

    @property
    def N(self) -> int:
        return self.angles.size

    @property
    def h(self) -> float:
        return self.total_length / self.N

    def positions(self) -> np.ndarray:
        return positions(self)

    def scaled(self, r: float) -> "DiscreteCurve":
        """Dilate about the base point by ``r > 0``."""
        return replace(self, total_length=self.total_length * r)

    def node_arclength(self) -> np.ndarray:
        return np.linspace(0.0, self.total_length, self.N + 1)

    def node_curvature(self) -> np.ndarray:
        """Curvature at interior nodes, ``(theta_{i+1} - theta_i)/h``; zero at the ends."""
        k = np.zeros(self.N + 1)
        k[1:-1] = np.diff(self.angles) / self.h
        return k

    def node_angles(self) -> np.ndarray:
        """Tangent angle at nodes: neighbouring segment average inside, one-sided at the ends."""
        th = self.angles
        out = np.empty(self.N + 1)
        out[0], out[-1] = th[0], th[-1]
        out[1:-1] = 0.5 * (th[:-1] + th[1:])
        return out


def positions(c: DiscreteCurve) -> np.ndarray:
    """Node coordinates, shape ``(N + 1, 2)``; the first row is the base point."""
    steps = c.h * np.column_stack((np.cos(c.angles), np.sin(c.angles)))
    pts = np.empty((c.N + 1, 2))
    pts[0] = c.base_point
    pts[1:] = np.asarray(c.base_point) + np.cumsum(steps, axis=0)
    return pts


def discrete_energy(c: DiscreteCurve, lam: float) -> tuple[float, float, float]:
    """Return ``(B, L, B + lam * L)``."""
    d = np.diff(c.angles)
    B = float(np.dot(d, d) / c.h)
    L = float(c.total_length)
    return B, L, B + lam * L


def energy_gradient(c: DiscreteCurve, lam: float) -> tuple[np.ndarray, float]:
    """Gradient of ``B + lam * L`` with respect to ``(theta, L)``."""
    d = np.diff(c.angles)
    h = c.h
    g = np.zeros(c.N)
    g[:-1] -= 2.0 * d / h
    g[1:] += 2.0 * d / h
    B = float(np.dot(d, d) / h)
    # B scales like 1/L at fixed angles
    return g, -B / c.total_length + lam


def positions_vjp(c: DiscreteCurve, gpts: np.ndarray) -> tuple[np.ndarray, float]:
    """Pull a gradient with respect to node positions back to ``(theta, L)``.

    ``gpts`` has shape ``(N + 1, 2)``; row 0 (the base point) does not depend
    on the parameters.
    """
    gpts = np.asarray(gpts, dtype=float)
    # segment j moves nodes j+1..N
    tail = np.cumsum(gpts[:0:-1], axis=0)[::-1]
    cos, sin = np.cos(c.angles), np.sin(c.angles)
    g_theta = c.h * (-sin * tail[:, 0] + cos * tail[:, 1])
    rel = positions(c) - np.asarray(c.base_point)
    g_L = float(np.sum(gpts * rel)) / c.total_length
    return g_theta, g_L


class ObstacleMode(enum.Enum):
    Standard = "standard"
    Rhomb = "rhomb"


@dataclass(frozen=True)
class Obstacle:
    """Base class; subclasses provide ``psi``, ``dpsi`` and ``peak``."""

    mode: ObstacleMode = field(default=ObstacleMode.Standard, kw_only=True)

    def psi(self, x):
        raise NotImplementedError

    def dpsi(self, x):
        raise NotImplementedError

    @property
    def peak(self) -> float:
        raise NotImplementedError

    @property
    def touch_tol(self) -> float:
        return 1e-3 * self.peak

    def with_mode(self, mode: ObstacleMode) -> "Obstacle":
        return replace(self, mode=ObstacleMode(mode))

    def polygon(self, xmin: float = -0.1, xmax: float = 1.1, n: int = 400) -> np.ndarray:
        """Closed polygon of the region ``{y <= psi(x), y >= 0}`` for plotting."""
        xs = np.unique(np.concatenate([np.linspace(xmin, xmax, n), self._breaks()]))
        xs = xs[(xs >= xmin) & (xs <= xmax)]
        ys = np.maximum(self.psi(xs), 0.0)
        return np.column_stack((np.concatenate([xs, xs[::-1]]), np.concatenate([ys, np.zeros_like(ys)])))

    def _breaks(self) -> np.ndarray:
        return np.empty(0)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SymmetricCone(Obstacle):
    """``psi(x) = height - slope * |x - 1/2|``; default slope puts the zeros at 1/4 and 3/4."""

    height: float = 0.3
    slope: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.height) and self.height > 0):
            raise ObstacleError(f"cone height must be positive, got {self.height}")
        if self.slope is None:
            object.__setattr__(self, "slope", 4.0 * self.height)
        if not (np.isfinite(self.slope) and self.slope > 2.0 * self.height):
            raise ObstacleError(
                f"cone slope must exceed 2*height={2 * self.height} so that psi(0) < 0 and psi(1) < 0"
            )

    def psi(self, x):
        return self.height - self.slope * np.abs(np.asarray(x, dtype=float) - 0.5)

    def dpsi(self, x):
        return -self.slope * np.sign(np.asarray(x, dtype=float) - 0.5)

    @property
    def peak(self) -> float:
        return self.height

    @property
    def a_psi(self) -> float:
        return self.slope

    @property
    def b_psi(self) -> float:
        return self.height - 0.5 * self.slope

    def _breaks(self):
        return np.array([0.5])

    def to_dict(self) -> dict:
        return {"kind": "cone", "slope": self.slope, "height": self.height, "mode": self.mode.value}


@dataclass(frozen=True)
class SampledLipschitz(Obstacle):
    """Piecewise-linear interpolant of ``nodes``, extended by constants."""

    nodes: tuple = ((0.0, -0.1), (0.5, 0.3), (1.0, -0.1))
    lipschitz: float = 1.0

    def __post_init__(self):
        arr = np.asarray(self.nodes, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ObstacleError("nodes must be a list of at least two [x, y] pairs")
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise ObstacleError("node abscissae must be strictly increasing")
        slopes = np.diff(arr[:, 1]) / np.diff(arr[:, 0])
        if np.max(np.abs(slopes)) > self.lipschitz * (1 + 1e-12):
            raise ObstacleError(
                f"nodes have slope {np.max(np.abs(slopes)):.6g} above the Lipschitz constant {self.lipschitz}"
            )
        object.__setattr__(self, "nodes", tuple(map(tuple, arr.tolist())))
        object.__setattr__(self, "_x", arr[:, 0])
        object.__setattr__(self, "_y", arr[:, 1])
        probe = np.concatenate([[0.0, 1.0], arr[:, 0][(arr[:, 0] <= 0) | (arr[:, 0] >= 1)]])
        if np.any(self.psi(probe) >= 0):
            raise ObstacleError("obstacle must be negative on (-inf, 0] and [1, inf)")
        if self.peak <= 0:
            raise ObstacleError("obstacle must be positive somewhere")

    def psi(self, x):
        return np.interp(np.asarray(x, dtype=float), self._x, self._y)

    def dpsi(self, x):
        x = np.asarray(x, dtype=float)
        slopes = np.diff(self._y) / np.diff(self._x)
        idx = np.searchsorted(self._x, x, side="right") - 1
        inside = (idx >= 0) & (idx < slopes.size)
        return np.where(inside, slopes[np.clip(idx, 0, slopes.size - 1)], 0.0)

    @property
    def peak(self) -> float:
        return float(np.max(self._y))

    def _breaks(self):
        return self._x

    def to_dict(self) -> dict:
        return {
            "kind": "sampled",
            "nodes": [list(p) for p in self.nodes],
            "lipschitz": self.lipschitz,
            "mode": self.mode.value,
        }


def obstacle_from_dict(spec: dict) -> Obstacle:
    """Build an obstacle from ``{kind, slope, height}`` or ``{kind, nodes, lipschitz}``."""
    kind = str(spec.get("kind", "")).lower()
    mode = ObstacleMode(spec.get("mode", "standard"))
    if kind in ("cone", "symmetriccone", "symmetric_cone"):
        return SymmetricCone(height=float(spec["height"]), slope=spec.get("slope"), mode=mode)
    if kind in ("sampled", "sampledlipschitz", "sampled_lipschitz"):
        return SampledLipschitz(
            nodes=tuple(tuple(map(float, p)) for p in spec["nodes"]),
            lipschitz=float(spec["lipschitz"]),
            mode=mode,
        )
    raise ObstacleError(f"unknown obstacle kind {spec.get('kind')!r}")


@dataclass(frozen=True)
class CoincidenceSummary:
    touching: bool
    touch_nodes: tuple[int, ...]
    min_gap: float
    touch_tol: float

    @property
    def violation(self) -> float:
        return max(0.0, -self.min_gap)

    def to_dict(self) -> dict:
        return {
            "touching": self.touching,
            "touch_nodes": list(self.touch_nodes),
            "min_gap": self.min_gap,
            "touch_tol": self.touch_tol,
        }


def slack_values(pts: np.ndarray, obstacle: Obstacle) -> np.ndarray:
    """Constraint slack per node: ``y - psi(x)``, or ``|y| - psi(x)`` in rhomb mode."""
    y = pts[:, 1]
    if obstacle.mode is ObstacleMode.Rhomb:
        y = np.abs(y)
    return y - obstacle.psi(pts[:, 0])


def constraint_slack(c: DiscreteCurve, obstacle: Obstacle, touch_tol: float | None = None) -> CoincidenceSummary:
    tol = obstacle.touch_tol if touch_tol is None else touch_tol
    slack = slack_values(positions(c), obstacle)
    touch = np.flatnonzero(slack <= tol)
    return CoincidenceSummary(
        touching=bool(touch.size),
        touch_nodes=tuple(int(i) for i in touch),
        min_gap=float(slack.min()),
        touch_tol=float(tol),
    )


def vi_pairing(c: DiscreteCurve, lam: float, phi: np.ndarray) -> float:
    """Discrete first variation in the vertical direction ``phi * e2``.

    Approximates  int 2<kappa,e2> phi'' - 3|kappa|^2 <t,e2> phi' - lam <kappa,e2> phi ds
    with node curvatures ``k_j`` and node angles ``tau_j`` at interior nodes
    and central differences for the derivatives of ``phi``.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (c.N + 1,):
        raise ValueError(f"phi must have one value per node ({c.N + 1})")
    if np.any(phi < 0):
        raise ValueError("test function must be nonnegative")
    if phi[0] != 0 or phi[-1] != 0:
        raise ValueError("test function must vanish at both endpoints")
    h = c.h
    k = np.diff(c.angles) / h
    tau = 0.5 * (c.angles[:-1] + c.angles[1:])
    dphi = (phi[2:] - phi[:-2]) / (2 * h)
    d2phi = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / (h * h)
    kc = k * np.cos(tau)
    integrand = 2 * kc * d2phi - 3 * k * k * np.sin(tau) * dphi - lam * kc * phi[1:-1]
    return float(h * np.sum(integrand))


def midpoint_bump(N: int, width: float = 0.25, kind: str = "smooth") -> np.ndarray:
    """Nonnegative node profile centred at the midpoint with value 1 there.

    ``width`` is the half-support as a fraction of the parameter interval.
    """
    t = np.linspace(0.0, 1.0, N + 1)
    r = np.abs(t - 0.5) / width
    if kind == "hat":
        phi = np.clip(1.0 - r, 0.0, None)
    elif kind == "smooth":
        phi = np.where(r < 1, np.cos(0.5 * np.pi * np.minimum(r, 1.0)) ** 2, 0.0)
    else:
        raise ValueError(f"unknown bump kind {kind!r}")
    phi[0] = phi[-1] = 0.0
    return phi


def nonverticality_check(
    c: DiscreteCurve, obstacle: Obstacle, tol: float = 1e-3, touch_tol: float | None = None
) -> np.ndarray:
    """For each touch node, True when the tangent stays at least ``tol`` away from vertical."""
    summary = constraint_slack(c, obstacle, touch_tol)
    idx = np.asarray(summary.touch_nodes, dtype=int)
    if idx.size == 0:
        return np.ones(0, dtype=bool)
    tau = c.node_angles()[idx]
    return np.abs(np.cos(tau)) > math.sin(tol)


def c_psi(obstacle: SymmetricCone) -> float:
    """Angle margin ``min(arctan a - arctan 2H, arctan 2H)`` of a symmetric cone."""
    if not isinstance(obstacle, SymmetricCone):
        raise ObstacleError("c_psi is defined for symmetric cones")
    t = math.atan(2 * obstacle.height)
    return min(math.atan(obstacle.slope) - t, t)


def polyline_bending(pts: np.ndarray) -> float:
    """Bending energy of a general polyline: squared turning angles over dual lengths."""
    e = np.diff(pts, axis=0)
    lens = np.hypot(e[:, 0], e[:, 1])
    cross = e[:-1, 0] * e[1:, 1] - e[:-1, 1] * e[1:, 0]
    dot = np.sum(e[:-1] * e[1:], axis=1)
    turn = np.arctan2(cross, dot)
    dual = 0.5 * (lens[:-1] + lens[1:])
    return float(np.sum(turn * turn / dual))


def from_angle_function(
    theta: Callable[[np.ndarray], np.ndarray],
    length: float,
    N: int,
    base_point: Sequence[float] = (0.0, 0.0),
) -> DiscreteCurve:
    """Export a continuous curve by sampling its tangent angle at segment midpoints."""
    s_mid = (np.arange(N) + 0.5) * (length / N)
    return DiscreteCurve(float(length), np.asarray(theta(s_mid), dtype=float), tuple(base_point))


def mirror_half(half_angles: np.ndarray) -> np.ndarray:
    """Full angle profile of the curve symmetric about ``x = 1/2``."""
    half_angles = np.asarray(half_angles, dtype=float)
    return np.concatenate([half_angles, -half_angles[::-1]])
