"""Obstacle-constrained minimization of ``E_lam = B + lam L`` over discrete curves.

The unknowns are the tangent angles and the total length of a
:class:`~elastica_obstacle.geometry.DiscreteCurve`.  Endpoint conditions are
equality constraints and the obstacle gives one inequality per node.  Both are
handled by an augmented Lagrangian (Powell-Hestenes-Rockafellar) with an
increasing penalty weight; each subproblem is solved by L-BFGS-B.

Symmetric classes optimize the left half only and mirror it about x = 1/2.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import minimize as sp_minimize

from . import elastica_zoo as zoo
from .geometry import (
    DiscreteCurve,
    Obstacle,
    ObstacleMode,
    SymmetricCone,
    CoincidenceSummary,
    constraint_slack,
    discrete_energy,
    energy_gradient,
    midpoint_bump,
    polyline_bending,
    positions,
    positions_vjp,
    slack_values,
)
from .moduli import n_lambda, solve_thresholds

log = logging.getLogger(__name__)

__all__ = [
    "CurveClass",
    "Verdict",
    "SolverConfig",
    "SolverReport",
    "StartResult",
    "ALProblem",
    "minimize",
    "minimize_from",
    "start_pool",
    "match_family",
    "scf_stability_probe",
    "ProbeResult",
    "lambda_sweep",
    "SweepResult",
    "drop_minimality_check",
    "DropCheckResult",
]

FEAS_TOL = 1e-6
STAT_TOL = 1e-5
POLISH_ROUNDS = 4


class CurveClass(enum.Enum):
    Sym = "sym"
    RhombSym = "rhomb"
    Full = "full"
    Drop = "drop"

    @property
    def symmetric(self) -> bool:
        return self in (CurveClass.Sym, CurveClass.RhombSym)


class Verdict(enum.Enum):
    Nontouching = "Nontouching"
    Touching = "Touching"
    Indeterminate = "Indeterminate"


@dataclass(frozen=True)
class SolverConfig:
    N: int = 256
    penalty_start: float = 1e2
    penalty_factor: float = 10.0
    rounds: int = 6
    max_inner: int = 5000
    gtol: float = 1e-8
    n_random: int = 1
    perturbation: float = 0.3
    multistarts: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.N < 8 or self.N % 2:
            raise ValueError("N must be an even integer >= 8")
        if self.rounds < 3:
            raise ValueError("at least three penalty rounds are required")
        for name in ("penalty_start", "penalty_factor", "max_inner", "gtol", "perturbation"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_random < 0:
            raise ValueError("n_random must be nonnegative")


class ALProblem:
    """Augmented Lagrangian for one curve class, obstacle and ``lam``.

    Parameter vector ``z = (theta, L)`` where ``theta`` is the full angle
    profile, or only the left half for symmetric classes.
    """

    def __init__(
        self,
        lam: float,
        obstacle: Obstacle | None,
        klass: CurveClass,
        N: int,
        winding: int = 0,
    ):
        self.lam = float(lam)
        self.klass = CurveClass(klass)
        self.N = int(N)
        self.M = self.N // 2
        self.winding = int(winding)
        if self.klass is CurveClass.Drop:
            obstacle = None
        elif obstacle is None:
            raise ValueError("an obstacle is required outside the drop class")
        if obstacle is not None:
            want = ObstacleMode.Rhomb if self.klass is CurveClass.RhombSym else ObstacleMode.Standard
            obstacle = obstacle.with_mode(want)
        self.obstacle = obstacle
        self.L_min = 1e-3 if self.klass is CurveClass.Drop else 1.0
        self.n_eq = 1 if self.klass.symmetric else 2
        self.n_ineq = self.N + 1 if obstacle is not None else 0

    # parametrization -------------------------------------------------------------
    def full_angles(self, z: np.ndarray) -> np.ndarray:
        th = z[:-1]
        if self.klass.symmetric:
            return np.concatenate([th, 2 * np.pi * self.winding - th[::-1]])
        return th

    def curve(self, z: np.ndarray) -> DiscreteCurve:
        return DiscreteCurve(float(z[-1]), self.full_angles(z))

    def encode(self, c: DiscreteCurve) -> np.ndarray:
        if c.N != self.N:
            c = resample(c, self.N)
        th = np.asarray(c.angles)
        if self.klass.symmetric:
            th = th[: self.M]
        return np.concatenate([th, [max(c.total_length, self.L_min)]])

    def _reduce(self, g_full: np.ndarray) -> np.ndarray:
        if self.klass.symmetric:
            return g_full[: self.M] - g_full[self.M :][::-1]
        return g_full

    # constraints -----------------------------------------------------------------
    def constraints(self, c: DiscreteCurve, pts: np.ndarray | None = None):
        """Equality residuals and node slacks (slack >= 0 is feasible)."""
        pts = positions(c) if pts is None else pts
        if self.klass.symmetric:
            eq = np.array([pts[self.M, 0] - 0.5])
        elif self.klass is CurveClass.Full:
            eq = pts[-1] - np.array([1.0, 0.0])
        else:
            # closure relative to length, so shrinking the curve cannot fake feasibility
            eq = (pts[-1] - pts[0]) / c.total_length
        if self.obstacle is None:
            return eq, np.empty(0)
        slack = slack_values(pts, self.obstacle)
        if self.klass.symmetric:
            # the tip node sits at x = 1/2 on the constraint manifold; freezing the
            # abscissa there avoids differentiating a cone apex
            y = pts[self.M, 1]
            y = abs(y) if self.klass is CurveClass.RhombSym else y
            slack[self.M] = y - float(self.obstacle.psi(0.5))
        return eq, slack

    def _pullback(self, c, pts, w_eq, w_ineq):
        """Constraint gradient in ``(theta, L)`` for weights ``w_eq``, ``w_ineq``."""
        gc_th, gc_L = positions_vjp(c, self._constraint_vjp(c, pts, w_eq, w_ineq))
        if self.klass is CurveClass.Drop:
            # the relative closure residual does not depend on L
            gc_L -= float(np.dot(w_eq, pts[-1] - pts[0])) / c.total_length**2
        return gc_th, gc_L

    def _constraint_vjp(self, c, pts, w_eq, w_ineq):
        """Gradient of ``w_eq . eq + w_ineq . slack`` with respect to node positions."""
        g = np.zeros_like(pts)
        if self.klass.symmetric:
            g[self.M, 0] += w_eq[0]
        elif self.klass is CurveClass.Full:
            g[-1] += w_eq
        else:
            g[-1] += w_eq / c.total_length
            g[0] -= w_eq / c.total_length
        if self.obstacle is not None and w_ineq.size:
            # at y = 0 the rhomb slack is kinked; push upward there
            dy = np.where(pts[:, 1] < 0, -1.0, 1.0) if self.klass is CurveClass.RhombSym else np.ones(len(pts))
            dx = -np.asarray(self.obstacle.dpsi(pts[:, 0]), dtype=float)
            if self.klass.symmetric:
                dx[self.M] = 0.0
            g[:, 0] += w_ineq * dx
            g[:, 1] += w_ineq * dy
        return g

    # objective -------------------------------------------------------------------
    def al_value_grad(self, z, mu: float, nu_eq: np.ndarray, nu_in: np.ndarray):
        c = self.curve(z)
        pts = positions(c)
        _, _, E = discrete_energy(c, self.lam)
        g_th, g_L = energy_gradient(c, self.lam)
        eq, slack = self.constraints(c, pts)
        val = E + float(np.dot(nu_eq, eq)) + 0.5 * mu * float(np.dot(eq, eq))
        w_eq = nu_eq + mu * eq
        if slack.size:
            shifted = np.maximum(0.0, nu_in - mu * slack)
            val += float(np.sum(shifted**2 - nu_in**2)) / (2 * mu)
            w_in = -shifted
        else:
            w_in = np.empty(0)
        gc_th, gc_L = self._pullback(c, pts, w_eq, w_in)
        grad = np.concatenate([self._reduce(g_th + gc_th), [g_L + gc_L]])
        return val, grad

    def lagrangian_grad(self, z, nu_eq: np.ndarray, nu_in: np.ndarray) -> np.ndarray:
        """Gradient of ``E + nu_eq . eq - nu_in . slack`` (the KKT stationarity residual)."""
        c = self.curve(z)
        pts = positions(c)
        g_th, g_L = energy_gradient(c, self.lam)
        gc_th, gc_L = self._pullback(c, pts, nu_eq, -nu_in if nu_in.size else nu_in)
        return np.concatenate([self._reduce(g_th + gc_th), [g_L + gc_L]])

    def projected_gradient(self, z, grad) -> np.ndarray:
        pg = grad.copy()
        if z[-1] <= self.L_min * (1 + 1e-12) and pg[-1] > 0:
            pg[-1] = 0.0
        return pg


def resample(c: DiscreteCurve, N: int) -> DiscreteCurve:
    """Re-express ``c`` with ``N`` segments by interpolating the midpoint angles."""
    if c.N == N:
        return c
    s_old = (np.arange(c.N) + 0.5) / c.N
    s_new = (np.arange(N) + 0.5) / N
    return DiscreteCurve(c.total_length, np.interp(s_new, s_old, c.angles), c.base_point)


@dataclass
class StartResult:
    label: str
    curve: DiscreteCurve
    energies: tuple[float, float, float]
    residual: float
    violation: float
    initial_energy: float
    converged: bool
    coincidence: CoincidenceSummary | None
    al_trace: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "B": self.energies[0],
            "L": self.energies[1],
            "E": self.energies[2],
            "initial_E": self.initial_energy,
            "residual": self.residual,
            "violation": self.violation,
            "converged": self.converged,
            "min_gap": None if self.coincidence is None else self.coincidence.min_gap,
        }


def minimize_from(
    start: DiscreteCurve,
    lam: float,
    obstacle: Obstacle | None,
    klass: CurveClass = CurveClass.Sym,
    config: SolverConfig = SolverConfig(),
    label: str = "start",
    record_trace: bool = False,
) -> StartResult:
    """Run the augmented-Lagrangian loop from one initial curve."""
    klass = CurveClass(klass)
    start = resample(start, config.N)
    winding = 0
    if klass.symmetric:
        winding = int(np.round(start.angles[config.N // 2 - 1] / np.pi))
    prob = ALProblem(lam, obstacle, klass, config.N, winding)
    z = prob.encode(start)
    initial_energy = discrete_energy(prob.curve(z), lam)[2]
    nu_eq = np.zeros(prob.n_eq)
    nu_in = np.zeros(prob.n_ineq)
    mu = config.penalty_start
    bounds = [(None, None)] * (z.size - 1) + [(prob.L_min, None)]
    trace: list = []

    def solve(z, mu, nu_eq, nu_in):
        round_trace: list = []
        fun = lambda zz: prob.al_value_grad(zz, mu, nu_eq, nu_in)  # noqa: E731
        cb = (lambda zz: round_trace.append(fun(zz)[0])) if record_trace else None
        res = sp_minimize(
            fun,
            z,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            callback=cb,
            options={"maxiter": config.max_inner, "gtol": config.gtol, "ftol": 1e-15, "maxcor": 20},
        )
        trace.append(round_trace)
        eq, slack = prob.constraints(prob.curve(res.x))
        # first-order multiplier update
        nu_eq = nu_eq + mu * eq
        if slack.size:
            nu_in = np.maximum(0.0, nu_in - mu * slack)
        return res.x, nu_eq, nu_in

    for _ in range(config.rounds):
        z, nu_eq, nu_in = solve(z, mu, nu_eq, nu_in)
        mu *= config.penalty_factor

    def residual_of(z, nu_eq, nu_in):
        grad = prob.lagrangian_grad(z, nu_eq, nu_in)
        return float(np.max(np.abs(prob.projected_gradient(z, grad))))

    residual = residual_of(z, nu_eq, nu_in)
    # Large weights leave the length direction badly conditioned; with the
    # multipliers settled, a few rounds at a moderate weight reach the KKT point.
    mu_polish = config.penalty_start * config.penalty_factor**2
    for _ in range(POLISH_ROUNDS):
        if residual <= STAT_TOL * (1 + abs(discrete_energy(prob.curve(z), lam)[2])):
            break
        z_new, ne_new, ni_new = solve(z, mu_polish, nu_eq, nu_in)
        r_new = residual_of(z_new, ne_new, ni_new)
        if r_new < residual:
            z, nu_eq, nu_in, residual = z_new, ne_new, ni_new, r_new
    curve = prob.curve(z)
    energies = discrete_energy(curve, lam)
    eq, slack = prob.constraints(curve)
    violation = float(max(np.max(np.abs(eq)), np.max(-slack, initial=0.0), 0.0))
    coincidence = constraint_slack(curve, prob.obstacle) if prob.obstacle is not None else None
    converged = residual <= STAT_TOL * (1 + abs(energies[2])) and violation <= FEAS_TOL
    log.debug("%s: E=%.8g residual=%.2e violation=%.2e", label, energies[2], residual, violation)
    return StartResult(label, curve, energies, residual, violation, initial_energy, converged, coincidence, trace)


# --- multistart pool ------------------------------------------------------------------


def _semicircle(N: int) -> DiscreteCurve:
    s = (np.arange(N) + 0.5) / N
    return DiscreteCurve(0.5 * np.pi, 0.5 * np.pi - np.pi * s)


def _arc_start(lam: float, N: int) -> tuple[str, DiscreteCurve]:
    th = solve_thresholds()
    if lam <= th.lambda_hat:
        spec = zoo.make_pinned_elastica(zoo.Family.Larc, lam, 1)
    else:
        spec = zoo.make_pinned_elastica(zoo.Family.Sarc, lam, n_lambda(lam))
    return f"{spec.family.value}(n={spec.n})", zoo.export(spec, N)


def start_pool(
    lam: float, obstacle: Obstacle | None, klass: CurveClass, config: SolverConfig
) -> list[tuple[str, DiscreteCurve]]:
    """Initial curves, in priority order, truncated to ``config.multistarts``."""
    N = config.N
    klass = CurveClass(klass)
    rng = np.random.default_rng(config.seed)
    if klass is CurveClass.Drop:
        pool = [(f"leaf(n=1)", zoo.export(zoo.make_leaf(lam, 1), N))]
        pool += [(f"random-drop-{i}", random_drop(rng, N)) for i in range(max(config.n_random, 1))]
        return pool if config.multistarts is None else pool[: config.multistarts]
    pool: list[tuple[str, DiscreteCurve]] = [
        ("segment", DiscreteCurve(1.0, np.zeros(N))),
        ("semicircle", _semicircle(N)),
    ]
    arc_label, arc = _arc_start(lam, N)
    pool.append((arc_label, arc))
    if isinstance(obstacle, SymmetricCone):
        try:
            pool.append(("escaping", zoo.escaping_competitor(obstacle, lam, N)))
        except (zoo.AdmissibilityError, ValueError) as exc:
            log.debug("escaping competitor skipped: %s", exc)
    q_star = solve_thresholds().q_star
    pool.append(("leaf-segment", zoo.leaf_segment_competitor(lam, q_star, N)))
    for i in range(config.n_random):
        base = pool[1 + (i % 2)][1]
        pool.append((f"random-{i}", _perturb(base, rng, config.perturbation)))
    loop = zoo.make_pinned_elastica(zoo.Family.Loop, lam, 1)
    pool.append(("loop(n=1)", zoo.export(loop, N)))
    if config.multistarts is not None:
        pool = pool[: config.multistarts]
    return pool


def _perturb(c: DiscreteCurve, rng: np.random.Generator, scale: float) -> DiscreteCurve:
    s = (np.arange(c.N) + 0.5) / c.N
    modes = np.arange(1, 5)
    coef = rng.normal(size=modes.size) * scale / modes
    dtheta = np.sin(np.pi * np.outer(s, modes)) @ coef
    # keep the perturbation mirror-compatible
    dtheta = 0.5 * (dtheta - dtheta[::-1])
    return DiscreteCurve(c.total_length * math.exp(0.1 * rng.normal()), c.angles + dtheta)


def random_drop(rng: np.random.Generator, N: int) -> DiscreteCurve:
    """A random smooth angle profile with total turning of 0 or +-2 pi."""
    s = (np.arange(N) + 0.5) / N
    turn = rng.choice([-1.0, 0.0, 1.0]) * 2 * np.pi
    modes = np.arange(1, 6)
    coef = rng.normal(size=(2, modes.size)) * 1.5 / modes
    th = turn * s + np.cos(2 * np.pi * np.outer(s, modes)) @ coef[0] + np.sin(2 * np.pi * np.outer(s, modes)) @ coef[1]
    return DiscreteCurve(float(rng.uniform(1.0, 6.0)), th + rng.uniform(0, 2 * np.pi))


# --- reports ----------------------------------------------------------------------


@dataclass
class SolverReport:
    curve: DiscreteCurve
    energies: tuple[float, float, float]
    coincidence: CoincidenceSummary | None
    residual: float
    violation: float
    matched_family: dict | None
    verdict: Verdict
    lam: float
    klass: CurveClass
    obstacle: Obstacle | None
    best_start: str
    starts: list[StartResult]

    @property
    def energy(self) -> float:
        return self.energies[2]

    def to_dict(self) -> dict:
        pts = positions(self.curve)
        return {
            "verdict": self.verdict.value,
            "lambda": self.lam,
            "class": self.klass.value,
            "obstacle": None if self.obstacle is None else self.obstacle.to_dict(),
            "energies": {"B": self.energies[0], "L": self.energies[1], "E": self.energies[2]},
            "coincidence": None if self.coincidence is None else self.coincidence.to_dict(),
            "stationarity_residual": self.residual,
            "constraint_violation": self.violation,
            "matched_family": self.matched_family,
            "best_start": self.best_start,
            "starts": [s.to_dict() for s in self.starts],
            "curve": {
                "N": self.curve.N,
                "total_length": self.curve.total_length,
                "angles": self.curve.angles.tolist(),
                "x": pts[:, 0].tolist(),
                "y": pts[:, 1].tolist(),
            },
        }


def match_family(c: DiscreteCurve, lam: float, max_extra_n: int = 1) -> dict | None:
    """Closest pinned elastica in sup distance between corresponding nodes."""
    th = solve_thresholds()
    cands = []
    n0 = n_lambda(lam)
    for fam in (zoo.Family.Larc, zoo.Family.Sarc):
        for n in range(n0, n0 + max_extra_n + 1):
            cands.append((fam, n))
    for n in range(1, 1 + max_extra_n + 1):
        cands.append((zoo.Family.Loop, n))
    pts = positions(c)
    best = None
    for fam, n in cands:
        if fam is zoo.Family.Larc and lam / n**2 > th.lambda_hat:
            continue
        try:
            spec = zoo.make_pinned_elastica(fam, lam, n)
        except (zoo.AdmissibilityError, ValueError):
            continue
        s = np.linspace(0.0, spec.length, c.N + 1)
        for refl in (False, True):
            exact = zoo.sample(replace(spec, reflected=refl), s)
            d = float(np.max(np.hypot(*(pts - exact).T)))
            if best is None or d < best["distance"]:
                best = {"family": fam.value, "n": n, "reflected": refl, "distance": d, "q": spec.q}
    return best


def _verdict(res: StartResult) -> Verdict:
    if not res.converged:
        return Verdict.Indeterminate
    if res.coincidence is None:
        return Verdict.Nontouching
    return Verdict.Touching if res.coincidence.touching else Verdict.Nontouching


def minimize(
    obstacle: Obstacle,
    lam: float,
    config: SolverConfig = SolverConfig(),
    klass: CurveClass = CurveClass.Sym,
) -> SolverReport:
    """Best-of-multistart minimizer with a touching/nontouching verdict."""
    if not (np.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be positive, got {lam}")
    klass = CurveClass(klass)
    results = [
        minimize_from(c, lam, obstacle, klass, config, label) for label, c in start_pool(lam, obstacle, klass, config)
    ]
    ok = [r for r in results if r.converged]
    best = min(ok or results, key=lambda r: r.energies[2])
    verdict = _verdict(best)
    matched = None
    if klass is not CurveClass.Drop:
        matched = match_family(best.curve, lam)
    return SolverReport(
        curve=best.curve,
        energies=best.energies,
        coincidence=best.coincidence,
        residual=best.residual,
        violation=best.violation,
        matched_family=matched,
        verdict=verdict,
        lam=float(lam),
        klass=klass,
        obstacle=None if klass is CurveClass.Drop else obstacle,
        best_start=best.label,
        starts=results,
    )


# --- SCF stability probe ------------------------------------------------------------

DEFAULT_EPS = (0.05, 0.02, 0.01, 0.005, 0.002, 0.001)


@dataclass
class ProbeResult:
    verdict: str
    tip_height: float
    base_energy: float
    noise_floor: float
    rays: list[dict]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tip_height": self.tip_height,
            "base_energy": self.base_energy,
            "noise_floor": self.noise_floor,
            "rays": self.rays,
        }


def _segment_inserted(scf: zoo.ScfSpec, N: int, delta: float) -> tuple[np.ndarray, int]:
    """Nodes of vertical segment + SCF + vertical segment, uniformly spaced.

    Returns the points and the node index of the left junction.
    """
    h = scf.length / N
    m = max(1, int(round(delta / h)))
    s = np.linspace(0.0, scf.length, N + 1)
    body = scf.sample(s) + np.array([0.0, m * h])
    up = np.column_stack([np.zeros(m), np.arange(m) * h])
    down = np.column_stack([np.ones(m), np.arange(m)[::-1] * h])
    return np.vstack([up, body, down]), m


def scf_stability_probe(
    tip_height: float, eps_grid: Sequence[float] = DEFAULT_EPS, N: int = 512, bump_width: float = 0.25
) -> ProbeResult:
    """Look for an admissible perturbation ray along which B drops below the SCF value.

    Upward midpoint bumps ``gamma + eps phi e2`` are always admissible.  When
    the SCF leaves the origin vertically, the curve with short vertical
    segments attached at both ends has the same energy and is admissible, and
    horizontal bumps at the junction are tried in both directions.
    """
    scf, curve = zoo.make_scf(tip_height, N)
    B0 = polyline_bending(positions(curve))
    B2 = polyline_bending(positions(scf.export(2 * N)))
    floor = 3 * abs(B0 - B2)
    pts0 = positions(curve)
    phi = midpoint_bump(N, bump_width)
    rays = []
    for eps in eps_grid:
        pts = pts0.copy()
        pts[:, 1] += eps * phi
        rays.append({"ray": "midpoint-bump", "eps": eps, "delta_B": polyline_bending(pts) - B0})
    if abs(math.cos(float(scf.tangent_angle(0.0)))) < 1e-8:
        seg_pts, j = _segment_inserted(scf, N, 0.25 * scf.length)
        Bs = polyline_bending(seg_pts)
        dist = np.abs(np.arange(len(seg_pts)) - j) / j
        bump = np.where(dist < 1, np.cos(0.5 * np.pi * np.minimum(dist, 1.0)) ** 2, 0.0)
        mirror = bump[::-1]
        for sign in (1.0, -1.0):
            for eps in eps_grid:
                pts = seg_pts.copy()
                # horizontal push at both junctions, mirror-symmetric
                pts[:, 0] += sign * eps * (bump - mirror)
                rays.append(
                    {
                        "ray": f"segment-insertion{'+' if sign > 0 else '-'}",
                        "eps": eps,
                        "delta_B": polyline_bending(pts) - B0,
                        "inserted_delta_B": Bs - B0,
                    }
                )
    unstable = any(r["delta_B"] < -floor for r in rays)
    return ProbeResult("Unstable" if unstable else "LocalMin-consistent", float(tip_height), B0, floor, rays)


# --- sweeps -------------------------------------------------------------------------


@dataclass
class SweepResult:
    lambdas: list[float]
    reports: list[SolverReport]
    largest_nontouching: float | None
    smallest_touching: float | None
    monotone: bool
    indeterminate: list[float]

    def to_dict(self) -> dict:
        return {
            "rows": [
                {
                    "lambda": lam,
                    "verdict": r.verdict.value,
                    "E": r.energy,
                    "min_gap": None if r.coincidence is None else r.coincidence.min_gap,
                    "best_start": r.best_start,
                    "matched_family": r.matched_family,
                }
                for lam, r in zip(self.lambdas, self.reports)
            ],
            "largest_nontouching": self.largest_nontouching,
            "smallest_touching": self.smallest_touching,
            "monotone": self.monotone,
            "indeterminate": self.indeterminate,
        }


def _sweep_one(args):
    obstacle, lam, config, klass = args
    return minimize(obstacle, lam, config, klass)


def lambda_sweep(
    obstacle: Obstacle,
    lambdas: Sequence[float],
    config: SolverConfig = SolverConfig(),
    klass: CurveClass = CurveClass.Sym,
    workers: int = 1,
) -> SweepResult:
    """Minimize for each ``lam`` and summarize where the verdict switches."""
    lambdas = [float(x) for x in lambdas]
    lam_max = 4 * solve_thresholds().lambda_hat
    if any(not (0 < x <= lam_max + 1e-12) for x in lambdas):
        raise ValueError(f"sweep values must lie in (0, {lam_max:.6g}]")
    jobs = [(obstacle, lam, config, klass) for lam in lambdas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_sweep_one, jobs))
    else:
        reports = [_sweep_one(j) for j in jobs]
    non = [lam for lam, r in zip(lambdas, reports) if r.verdict is Verdict.Nontouching]
    touch = [lam for lam, r in zip(lambdas, reports) if r.verdict is Verdict.Touching]
    indet = [lam for lam, r in zip(lambdas, reports) if r.verdict is Verdict.Indeterminate]
    largest_non = max(non) if non else None
    smallest_touch = min(touch) if touch else None
    monotone = largest_non is None or smallest_touch is None or largest_non < smallest_touch
    return SweepResult(lambdas, reports, largest_non, smallest_touch, monotone, indet)


# --- figure-eight check -------------------------------------------------------------


@dataclass
class DropCheckResult:
    passed: bool
    leaf_energy: float
    energies: list[float]
    from_leaf: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "leaf_energy": self.leaf_energy,
            "energies": self.energies,
            "from_leaf": self.from_leaf,
            "tolerance": self.tolerance,
        }


def drop_minimality_check(lam: float, trials: int = 20, N: int = 128, seed: int = 0) -> DropCheckResult:
    """Locally minimize random closed curves and compare with the figure-eight energy."""
    if not (np.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be positive, got {lam}")
    leaf_E = zoo.closed_form_energy(zoo.make_leaf(lam, 1))[2]
    tol = 1e-2 * leaf_E
    config = SolverConfig(N=N, seed=seed)
    rng = np.random.default_rng(seed)
    energies = []
    for i in range(trials):
        res = minimize_from(random_drop(rng, N), lam, None, CurveClass.Drop, config, f"drop-{i}")
        if res.converged:
            energies.append(res.energies[2])
        else:
            log.warning("drop trial %d did not converge (residual %.2e, violation %.2e)", i, res.residual, res.violation)
            energies.append(res.energies[2])
    leaf_run = minimize_from(zoo.export(zoo.make_leaf(lam, 1), N), lam, None, CurveClass.Drop, config, "leaf")
    passed = all(e >= leaf_E - tol for e in energies) and abs(leaf_run.energies[2] - leaf_E) <= tol
    return DropCheckResult(passed, leaf_E, energies, leaf_run.energies[2], tol)
