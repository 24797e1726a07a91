"""Explicit elasticae: pinned arcs and loops, the figure-eight, the rectangular
elastica, symmetric cut-and-glued free elasticae (SCF) and two competitor
constructions used to bound minimal energies.

All arc-type curves share one parametrization.  With ``u = alpha*s - K(q)``

    x(s) = (2 E(am u) + 2 E(q) - alpha s) / alpha,    y(s) = 2 q cn(u) / alpha,
    theta(s) = -2 arcsin(q sn u),                      k(s) = -2 alpha q cn(u).

Loops flip the sign of ``x - ...`` so that they still end at (1, 0); their
tangent angle is ``pi + 2 arcsin(q sn u)`` and curvature ``+2 alpha q cn u``.
Curvature is the derivative of the tangent angle throughout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import elliptic as el
from .geometry import DiscreteCurve, SymmetricCone, from_angle_function, mirror_half
from .moduli import (
    SQRT_HALF,
    Branch,
    alpha0,
    invert_g,
    n_lambda,
    solve_thresholds,
)

__all__ = [
    "Family",
    "AdmissibilityError",
    "ElasticaSpec",
    "ScfSpec",
    "EscapingArcs",
    "LeafSegment",
    "make_pinned_elastica",
    "make_leaf",
    "make_rect",
    "make_segment",
    "make_spec",
    "sample",
    "tangent_angle",
    "signed_curvature",
    "closed_form_energy",
    "export",
    "polar_tangential_angle_rect",
    "make_scf",
    "escaping_competitor",
    "leaf_segment_competitor",
    "large_circle_competitor",
    "large_circle_competitor",
]


class AdmissibilityError(ValueError):
    """Raised when a requested curve does not exist for the given data."""


class Family(enum.Enum):
    Sarc = "sarc"
    Larc = "larc"
    Loop = "loop"
    Leaf = "leaf"
    Rect = "rect"
    Segment = "segment"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, Family):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class ElasticaSpec:
    family: Family
    lam: float
    n: int
    q: float
    alpha: float
    length: float
    reflected: bool = False

    def reflect(self) -> "ElasticaSpec":
        return replace(self, reflected=not self.reflected)

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "lambda": self.lam,
            "n": self.n,
            "q": self.q,
            "alpha": self.alpha,
            "length": self.length,
            "reflected": self.reflected,
        }



def make_pinned_elastica(family, lam: float, n: int = 1, reflected: bool = False) -> ElasticaSpec:
    """Shorter arc, longer arc or loop through (0,0) and (1,0) with parameter ``lam``."""
    family = Family.parse(family)
    if family not in (Family.Sarc, Family.Larc, Family.Loop):
        raise AdmissibilityError(f"{family.value} is not a pinned elastica family")
    if not (np.isfinite(lam) and lam > 0):
        raise el.EllipticDomainError(f"lambda must be positive, got {lam}")
    n = int(n)
    if n < 1:
        raise AdmissibilityError("n must be a positive integer")
    if family is not Family.Loop and n < n_lambda(lam):
        raise AdmissibilityError(
            f"{family.value} with lambda={lam} needs n >= n_lambda={n_lambda(lam)}, got n={n}"
        )
    branch = {Family.Sarc: Branch.Branch1, Family.Larc: Branch.Branch2, Family.Loop: Branch.Branch3}[family]
    q = invert_g(lam / n**2, branch)
    Q = 2 * el.complete_E(q) - el.complete_K(q)
    alpha = 2 * n * (Q if family is not Family.Loop else -Q)
    if alpha <= 0:
        raise AdmissibilityError("nonpositive scaling; modulus fell outside its branch")
    return ElasticaSpec(family, float(lam), n, q, alpha, 2 * n * el.complete_K(q) / alpha, reflected)


def make_leaf(lam: float, n: int = 1, reflected: bool = False) -> ElasticaSpec:
    """The n/2-fold figure-eight; it starts and ends at the origin."""
    if not (np.isfinite(lam) and lam > 0):
        raise el.EllipticDomainError(f"lambda must be positive, got {lam}")
    qs = solve_thresholds().q_star
    alpha = math.sqrt(lam / (2 * (2 * qs * qs - 1)))
    return ElasticaSpec(Family.Leaf, float(lam), int(n), qs, alpha, 2 * n * el.complete_K(qs) / alpha, reflected)


def make_rect(reflected: bool = False) -> ElasticaSpec:
    """The rectangular elastica: free (lam = 0), vertical tangents at both ends."""
    a0 = alpha0()
    return ElasticaSpec(Family.Rect, 0.0, 1, SQRT_HALF, a0, 2 * el.complete_K(SQRT_HALF) / a0, reflected)


def make_segment(lam: float = 0.0) -> ElasticaSpec:
    return ElasticaSpec(Family.Segment, float(lam), 1, 0.0, 1.0, 1.0)


def make_spec(family, lam: float = 0.0, n: int = 1, reflected: bool = False) -> ElasticaSpec:
    """Dispatch on ``family``."""
    family = Family.parse(family)
    if family is Family.Leaf:
        return make_leaf(lam, n, reflected)
    if family is Family.Rect:
        return make_rect(reflected)
    if family is Family.Segment:
        return make_segment(lam)
    return make_pinned_elastica(family, lam, n, reflected)


def _check_s(spec: ElasticaSpec, s):
    s = np.asarray(s, dtype=float)
    tol = 1e-12 * max(1.0, spec.length)
    if np.any(s < -tol) or np.any(s > spec.length + tol):
        raise ValueError(f"arclength outside [0, {spec.length}]")
    return np.clip(s, 0.0, spec.length)


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def sample(spec: ElasticaSpec, s) -> np.ndarray:
    """Point(s) on the curve; shape ``(..., 2)``."""
    s = _check_s(spec, s)
    if spec.family is Family.Segment:
        return np.stack([s, np.zeros_like(s)], axis=-1)
    q, a = spec.q, spec.alpha
    K, E = el.complete_K(q), el.complete_E(q)
    u = a * s - K
    amp = el.jacobi_am(u, q)
    x = (2 * np.asarray(el.incomplete_E(amp, q)) + 2 * E - a * s) / a
    if spec.family is Family.Loop:
        x = -x
    y = 2 * q * np.cos(amp) / a
    if spec.reflected:
        y = -y
    return np.stack([x, y], axis=-1)


def tangent_angle(spec: ElasticaSpec, s):
    s = _check_s(spec, s)
    if spec.family is Family.Segment:
        return _out(np.zeros_like(s))
    half = np.arcsin(spec.q * np.sin(el.jacobi_am(spec.alpha * s - el.complete_K(spec.q), spec.q)))
    theta = np.pi + 2 * half if spec.family is Family.Loop else -2 * half
    return _out(-theta if spec.reflected else theta)


def signed_curvature(spec: ElasticaSpec, s):
    s = _check_s(spec, s)
    if spec.family is Family.Segment:
        return _out(np.zeros_like(s))
    cn = np.asarray(el.jacobi_cn(spec.alpha * s - el.complete_K(spec.q), spec.q))
    k = 2 * spec.alpha * spec.q * cn
    if spec.family is not Family.Loop:
        k = -k
    return _out(-k if spec.reflected else k)


def closed_form_energy(spec: ElasticaSpec) -> tuple[float, float, float]:
    """``(B, L, B + lam L)`` from complete integrals.

    Over a full period ``int cn^2 = 2(E - (1 - q^2)K)/q^2``, so
    ``B = 8 n alpha (E - (1 - q^2) K)``.
    """
    if spec.family is Family.Segment:
        return 0.0, 1.0, spec.lam
    q = spec.q
    K, E = el.complete_K(q), el.complete_E(q)
    B = 8 * spec.n * spec.alpha * (E - (1 - q * q) * K)
    L = spec.length
    return B, L, B + spec.lam * L


def export(spec: ElasticaSpec, N: int) -> DiscreteCurve:
    """Discrete curve with tangent angles taken at segment midpoints."""
    return from_angle_function(lambda s: tangent_angle(spec, s), spec.length, N)


# --- rectangular elastica and SCF -------------------------------------------------


def _rect_curvature_derivative(s):
    a0 = alpha0()
    u = a0 * np.asarray(s, dtype=float) - el.complete_K(SQRT_HALF)
    amp = np.asarray(el.jacobi_am(u, SQRT_HALF))
    sn = np.sin(amp)
    dn = np.sqrt(1 - 0.5 * sn * sn)
    return _out(math.sqrt(2) * a0 * a0 * sn * dn)


def polar_tangential_angle_rect(s):
    """Angle rotating ``gamma/|gamma|`` onto the unit tangent of the rectangular elastica.

    The angle stays in ``(-pi, 0)`` on ``(0, L_rect)``, so the pointwise
    ``atan2`` value is already the continuous branch.  It decreases from 0 to
    -pi/2 on ``(0, s_c]``, where ``s_c ~ 0.691 L_rect`` maximizes
    ``|gamma_rect|``, keeps decreasing to about -1.738 and then returns to
    -pi/2 at ``L_rect``.  Only the first stretch solves ``tan(-omega) = c > 0``.
    """
    rect = make_rect()
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0) or np.any(s >= rect.length):
        raise ValueError("polar tangential angle is singular at the endpoints")
    p = sample(rect, s)
    th = np.asarray(tangent_angle(rect, s))
    t = np.stack([np.cos(th), np.sin(th)], axis=-1)
    cross = p[..., 0] * t[..., 1] - p[..., 1] * t[..., 0]
    dot = np.sum(p * t, axis=-1)
    return _out(np.arctan2(cross, dot))


@dataclass(frozen=True)
class ScfSpec:
    """Two mirrored copies of a rescaled, rotated rectangular-elastica arc glued at the tip.

    The left half is ``s -> R_phi gamma_rect(alpha s) / alpha`` for
    ``s`` in ``[0, half_length]``, with ``alpha * half_length = ell``.
    """

    ell: float
    alpha: float
    phi: float
    half_length: float
    tip_height: float

    @property
    def length(self) -> float:
        return 2 * self.half_length

    def _fold(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < -1e-12) or np.any(s > self.length + 1e-12):
            raise ValueError(f"arclength outside [0, {self.length}]")
        right = s > self.half_length
        return np.clip(np.where(right, self.length - s, s), 0.0, self.half_length), right

    def sample(self, s) -> np.ndarray:
        sl, right = self._fold(s)
        p = sample(make_rect(), self.alpha * sl) / self.alpha
        c, si = math.cos(self.phi), math.sin(self.phi)
        x = c * p[..., 0] - si * p[..., 1]
        y = si * p[..., 0] + c * p[..., 1]
        return np.stack([np.where(right, 1.0 - x, x), y], axis=-1)

    def tangent_angle(self, s):
        sl, right = self._fold(s)
        th = np.asarray(tangent_angle(make_rect(), self.alpha * sl)) + self.phi
        return _out(np.where(right, -th, th))

    def curvature(self, s):
        sl, _ = self._fold(s)
        return _out(self.alpha * np.asarray(signed_curvature(make_rect(), self.alpha * sl)))

    def curvature_slope_at_tip(self) -> float:
        """One-sided limit ``k'(L/2-) = alpha^2 k_rect'(ell)``."""
        return self.alpha**2 * _rect_curvature_derivative(self.ell)

    def export(self, N: int) -> DiscreteCurve:
        if N % 2:
            raise ValueError("SCF export needs an even segment count")
        s_mid = (np.arange(N // 2) + 0.5) * (self.length / N)
        return DiscreteCurve(self.length, mirror_half(self.tangent_angle(s_mid)))

    def obstacle(self, slope: float | None = None) -> SymmetricCone:
        return SymmetricCone(height=self.tip_height, slope=slope)


def make_scf(tip_height: float, N: int | None = 256) -> tuple[ScfSpec, DiscreteCurve | None]:
    """SCF whose tip sits at ``(1/2, tip_height)`` with horizontal tangent.

    Returns the spec and, unless ``N`` is None, its discrete export.
    """
    if not (np.isfinite(tip_height) and tip_height > 0):
        raise ValueError("tip height must be positive")
    rect = make_rect()
    target = math.atan(2 * tip_height)
    h_star = solve_thresholds().h_star
    if abs(tip_height - h_star) <= 1e-14:
        ell = 0.5 * rect.length
    else:
        eps = 1e-13 * rect.length
        ell = brentq(
            lambda s: -polar_tangential_angle_rect(s) - target,
            eps,
            rect.length - eps,
            xtol=1e-15,
            rtol=4 * np.finfo(float).eps,
            maxiter=200,
        )
    phi = -float(tangent_angle(rect, ell))
    alpha = float(np.hypot(*sample(rect, ell))) / math.hypot(0.5, tip_height)
    spec = ScfSpec(ell=ell, alpha=alpha, phi=phi, half_length=ell / alpha, tip_height=float(tip_height))
    return spec, (spec.export(N) if N else None)


# --- competitors -------------------------------------------------------------------


@dataclass(frozen=True)
class EscapingArcs:
    """Curve built from two circular arcs per half that touches the cone's left leg.

    The first arc lies on the circle of radius ``R = lam^(-1/2)`` through the
    origin tangent to the extended left leg and runs clockwise to its leftmost
    point; the second turns a quarter circle to reach ``x = 1/2`` horizontally.
    """

    lam: float
    R: float
    center: tuple[float, float]
    sweep1: float
    r2: float
    theta0: float
    tangency: tuple[float, float]

    @classmethod
    def from_cone(cls, obstacle: SymmetricCone, lam: float) -> "EscapingArcs":
        if not isinstance(obstacle, SymmetricCone):
            raise AdmissibilityError("escaping competitor is built for symmetric cones")
        if not (np.isfinite(lam) and lam > 0):
            raise el.EllipticDomainError(f"lambda must be positive, got {lam}")
        a, b = obstacle.a_psi, obstacle.b_psi
        R = 1 / math.sqrt(lam)
        w = math.sqrt(a * a + 1)
        disc = -b * b - 2 * b * R * w
        if disc < 0:
            raise AdmissibilityError(f"tangency construction is not real-valued (discriminant {disc:.3g})")
        root = math.sqrt(disc)
        X = -(a / (a * a + 1)) * (b + R * w) - root / (a * a + 1)
        Y = (b + R * w) / (a * a + 1) - a * root / (a * a + 1)
        ang0 = math.atan2(-Y, -X)
        sweep1 = (ang0 - math.pi) % (2 * math.pi)
        r2 = 0.5 - (X - R)
        if Y + r2 <= obstacle.height:
            raise AdmissibilityError("second arc ends below the obstacle tip")
        T = (X + R * a / w, Y - R / w)
        # angles normalised so that the tangent is horizontal (theta = 0) at the midpoint
        theta0 = ang0 - 0.5 * math.pi + 2 * math.pi
        return cls(float(lam), R, (X, Y), sweep1, r2, theta0, T)

    @property
    def half_length(self) -> float:
        return self.R * self.sweep1 + 0.5 * math.pi * self.r2

    @property
    def length(self) -> float:
        return 2 * self.half_length

    def _half_angle(self, s):
        s1 = self.R * self.sweep1
        return np.where(
            s <= s1,
            self.theta0 - s / self.R,
            0.5 * math.pi - (s - s1) / self.r2,
        )

    def tangent_angle(self, s):
        s = np.asarray(s, dtype=float)
        right = s > self.half_length
        th = self._half_angle(np.where(right, self.length - s, s))
        return _out(np.where(right, -th, th))

    def energy(self) -> tuple[float, float, float]:
        B = 2 * (self.sweep1 / self.R + 0.5 * math.pi / self.r2)
        L = self.length
        return B, L, B + self.lam * L

    def export(self, N: int) -> DiscreteCurve:
        if N % 2:
            raise ValueError("export needs an even segment count")
        s_mid = (np.arange(N // 2) + 0.5) * (self.length / N)
        return DiscreteCurve(self.length, mirror_half(self.tangent_angle(s_mid)))


def escaping_competitor(obstacle: SymmetricCone, lam: float, N: int = 4096) -> DiscreteCurve:
    """Discrete export of :class:`EscapingArcs`."""
    return EscapingArcs.from_cone(obstacle, lam).export(N)


@dataclass(frozen=True)
class LeafSegment:
    """Half figure-eight, horizontal unit segment, mirrored half figure-eight.

    The scaling ``alpha`` solves ``lam = 2 alpha^2 (2 q_n^2 - 1)``; the leaf
    pieces always use the modulus ``q_star``.
    """

    lam: float
    q_n: float
    alpha: float
    q_star: float

    @classmethod
    def build(cls, lam: float, q_n: float) -> "LeafSegment":
        if not (np.isfinite(q_n) and SQRT_HALF < q_n < 1):
            raise el.EllipticDomainError(f"q_n must lie in (1/sqrt2, 1), got {q_n}")
        if not (np.isfinite(lam) and lam > 0):
            raise el.EllipticDomainError(f"lambda must be positive, got {lam}")
        alpha = math.sqrt(lam / (2 * (2 * q_n * q_n - 1)))
        return cls(float(lam), float(q_n), alpha, solve_thresholds().q_star)

    @property
    def leaf_length(self) -> float:
        return el.complete_K(self.q_star) / self.alpha

    @property
    def length(self) -> float:
        return 2 * self.leaf_length + 1.0

    @property
    def height(self) -> float:
        return 2 * self.q_star / self.alpha

    def tangent_angle(self, s):
        s = np.asarray(s, dtype=float)
        Lh = self.leaf_length
        right = s > 0.5 * self.length
        sl = np.where(right, self.length - s, s)
        leaf = sl < Lh
        u = self.alpha * np.minimum(sl, Lh) - el.complete_K(self.q_star)
        th = np.where(leaf, -2 * np.arcsin(self.q_star * np.asarray(el.jacobi_sn(u, self.q_star))), 0.0)
        return _out(np.where(right, -th, th))

    def energy(self) -> tuple[float, float, float]:
        qs = self.q_star
        K, E = el.complete_K(qs), el.complete_E(qs)
        # int_{-pi/2}^{pi/2} 4 q^2 cos^2 / dn = 8 (E - (1 - q^2) K)
        B = self.alpha * 8 * (E - (1 - qs * qs) * K)
        lam_L = 4 * self.alpha * (2 * self.q_n**2 - 1) * K + 2 * self.alpha**2 * (2 * self.q_n**2 - 1)
        return B, self.length, B + lam_L

    def export(self, N: int) -> DiscreteCurve:
        if N % 2:
            raise ValueError("export needs an even segment count")
        s_mid = (np.arange(N // 2) + 0.5) * (self.length / N)
        return DiscreteCurve(self.length, mirror_half(self.tangent_angle(s_mid)))


def leaf_segment_competitor(lam: float, q_n: float, N: int = 512) -> DiscreteCurve:
    """Discrete export of :class:`LeafSegment`."""
    return LeafSegment.build(lam, q_n).export(N)



def large_circle_competitor(r: float, N: int = 512) -> tuple[DiscreteCurve, float]:
    """Major arc of the radius-``r`` circle through (0, 0) and (1, 0), traversed over the top.

    The arc stays in ``y >= 0``, so it clears any obstacle that is nonpositive
    outside its support and lower than ``2r`` inside it.  Its bending energy
    ``(2 pi - 2 beta) / r`` with ``sin beta = 1/(2r)`` tends to zero, which is why
    pure bending (lambda = 0) has no minimizer.  Returns the export and that energy.
    """
    if not (np.isfinite(r) and r > 0.5):
        raise ValueError(f"radius must exceed 1/2, got {r}")
    beta = math.asin(0.5 / r)
    turn = 2 * math.pi - 2 * beta
    c = from_angle_function(lambda s: math.pi - beta - s / r, r * turn, N)
    return c, turn / r
