"""Command-line entry point: ``elastica <command> [options]``.

Exit codes: 0 on success, 1 when a check command reports failure, 2 on domain
errors (bad lambda, infeasible obstacle, inadmissible family) and 3 when the
solver cannot certify its result (verdict Indeterminate).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import elastica_zoo as zoo
from .export import dumps_json, write_csv, write_json, write_svg
from .geometry import (
    DiscreteCurve,
    ObstacleMode,
    SymmetricCone,
    constraint_slack,
    discrete_energy,
    midpoint_bump,
    nonverticality_check,
    obstacle_from_dict,
    positions,
    vi_pairing,
)
from .moduli import n_lambda, solve_thresholds
from .solver import (
    DEFAULT_EPS,
    CurveClass,
    SolverConfig,
    Verdict,
    drop_minimality_check,
    lambda_sweep,
    minimize,
    scf_stability_probe,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_INDETERMINATE = 0, 1, 2, 3


class DomainError(ValueError):
    pass


# --- argument parsing helpers -------------------------------------------------------


def parse_obstacle(text: str, mode: ObstacleMode = ObstacleMode.Standard):
    """``cone:H[:slope]`` or a path to an obstacle JSON file."""
    if text.startswith("cone:"):
        parts = text.split(":")[1:]
        if not 1 <= len(parts) <= 2:
            raise DomainError(f"cone spec must be cone:<height>[:<slope>], got {text!r}")
        try:
            vals = [float(p) for p in parts]
        except ValueError as exc:
            raise DomainError(f"cone spec must be cone:<height>[:<slope>], got {text!r}") from exc
        return SymmetricCone(height=vals[0], slope=vals[1] if len(vals) > 1 else None, mode=mode)
    path = Path(text)
    if not path.is_file():
        raise DomainError(f"obstacle must be cone:<height>[:<slope>] or a JSON file, got {text!r}")
    spec = json.loads(path.read_text())
    spec.setdefault("mode", mode.value)
    return obstacle_from_dict(spec)


def parse_grid(text: str) -> list[float]:
    """``a:step:b`` (inclusive of b up to rounding) or a comma-separated list."""
    if ":" in text:
        try:
            a, step, b = (float(p) for p in text.split(":"))
        except ValueError as exc:
            raise DomainError(f"grid must be a:step:b, got {text!r}") from exc
        if step <= 0 or b < a:
            raise DomainError(f"grid needs step > 0 and b >= a, got {text!r}")
        count = int(np.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 12) for i in range(count)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise DomainError(f"cannot parse grid {text!r}") from exc


_HEIGHT = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*h\*?\s*$")


def parse_height(text: str) -> float:
    """A number, or a multiple of the critical height such as ``h*``, ``0.5h*``, ``2*h*``."""
    m = _HEIGHT.match(text)
    if m:
        factor = float(m.group(1)) if m.group(1) else 1.0
        return factor * solve_thresholds().h_star
    try:
        return float(text)
    except ValueError as exc:
        raise DomainError(f"cannot parse height {text!r}") from exc


def default_seed() -> int:
    raw = os.environ.get("ELASTICA_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise DomainError(f"ELASTICA_SEED must be an integer, got {raw!r}") from exc


def _positive(name: str, value: float) -> float:
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def _emit(obj, path: str | None, digits: int = 12) -> None:
    text = dumps_json(obj, digits)
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def _write_curve(c: DiscreteCurve, csv_path: str | None, svg_path: str | None, obstacle=None) -> list[str]:
    """Write CSV and SVG views; every SVG gets its CSV alongside."""
    written = []
    if svg_path and not csv_path:
        csv_path = str(Path(svg_path).with_suffix(".csv"))
    if csv_path:
        write_csv(csv_path, c)
        written.append(csv_path)
    if svg_path:
        write_svg(svg_path, positions(c), obstacle)
        written.append(svg_path)
    return written


# --- commands -----------------------------------------------------------------------


def cmd_thresholds(args) -> int:
    _emit(solve_thresholds().as_dict(), args.out, digits=10)
    return EXIT_OK


def _build_curve(args):
    family = args.family.lower()
    if family == "scf":
        height = parse_height(args.height)
        spec, c = zoo.make_scf(_positive("height", height), args.N)
        B, L, E = discrete_energy(c, 0.0)
        info = {
            "family": "scf",
            "tip_height": spec.tip_height,
            "ell": spec.ell,
            "alpha": spec.alpha,
            "phi": spec.phi,
            "length": spec.length,
            "curvature_slope_at_tip": spec.curvature_slope_at_tip(),
            "discrete_energy": {"B": B, "L": L, "E": E},
        }
        return info, c, spec.obstacle()
    fam = zoo.Family.parse(family)
    lam = args.lam
    if fam in (zoo.Family.Sarc, zoo.Family.Larc, zoo.Family.Loop, zoo.Family.Leaf):
        _positive("lambda", lam)
    spec = zoo.make_spec(fam, lam, args.n, args.reflected)
    c = zoo.export(spec, args.N)
    B, L, E = zoo.closed_form_energy(spec)
    info = spec.to_dict()
    info["closed_form_energy"] = {"B": B, "L": L, "E": E}
    Bd, Ld, Ed = discrete_energy(c, spec.lam)
    info["discrete_energy"] = {"B": Bd, "L": Ld, "E": Ed}
    return info, c, None


def cmd_construct(args) -> int:
    info, c, obstacle = _build_curve(args)
    if args.obstacle:
        obstacle = parse_obstacle(args.obstacle)
    info["files"] = _write_curve(c, args.out, args.svg, obstacle)
    _emit(info, args.json)
    return EXIT_OK


def energy_table(lam: float, max_n: int = 4) -> list[dict]:
    """Closed-form energies of every admissible pinned elastica with n <= max_n, plus the leaf."""
    rows = []
    n0 = n_lambda(lam)
    for fam in (zoo.Family.Sarc, zoo.Family.Larc, zoo.Family.Loop):
        for n in range(1, max_n + 1):
            row = {"family": fam.value, "n": n, "lambda": lam}
            if fam is not zoo.Family.Loop and n < n0:
                rows.append({**row, "admissible": False})
                continue
            spec = zoo.make_pinned_elastica(fam, lam, n)
            B, L, E = zoo.closed_form_energy(spec)
            rows.append({**row, "admissible": True, "q": spec.q, "alpha": spec.alpha, "B": B, "L": L, "E": E})
    leaf = zoo.make_leaf(lam, 1)
    B, L, E = zoo.closed_form_energy(leaf)
    rows.append({"family": "leaf", "n": 1, "lambda": lam, "admissible": True, "q": leaf.q, "alpha": leaf.alpha,
                 "B": B, "L": L, "E": E})
    return rows


def cmd_energy_table(args) -> int:
    rows = []
    for lam in parse_grid(args.lambdas):
        rows += energy_table(_positive("lambda", lam), args.max_n)
    if args.format == "csv":
        cols = ["family", "n", "lambda", "admissible", "q", "alpha", "B", "L", "E"]
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join("" if r.get(k) is None else (f"{r[k]:.12g}" if isinstance(r[k], float) else str(r[k]))
                                  for k in cols))
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        sys.stdout.write(text)
    else:
        _emit({"rows": rows}, args.out)
    return EXIT_OK


def _config(args) -> SolverConfig:
    seed = args.seed if args.seed is not None else default_seed()
    return SolverConfig(N=args.N, seed=seed, multistarts=args.multistarts)


def _klass(text: str) -> CurveClass:
    return CurveClass({"sym": "sym", "rhomb": "rhomb", "rhombsym": "rhomb", "full": "full"}[text.lower()])


def cmd_minimize(args) -> int:
    klass = _klass(args.klass)
    obstacle = parse_obstacle(args.obstacle)
    report = minimize(obstacle, _positive("lambda", args.lam), _config(args), klass)
    data = report.to_dict()
    if args.report:
        write_json(args.report, data)
    data.pop("curve")
    data["starts"] = [{k: s[k] for k in ("label", "E", "converged", "residual")} for s in data["starts"]]
    data["files"] = _write_curve(report.curve, args.out, args.svg, obstacle.with_mode(klass_mode(klass)))
    sys.stdout.write(dumps_json(data))
    return EXIT_INDETERMINATE if report.verdict is Verdict.Indeterminate else EXIT_OK


def klass_mode(klass: CurveClass) -> ObstacleMode:
    return ObstacleMode.Rhomb if klass is CurveClass.RhombSym else ObstacleMode.Standard


def cmd_sweep(args) -> int:
    klass = _klass(args.klass)
    obstacle = parse_obstacle(args.obstacle)
    lambdas = parse_grid(args.lambdas)
    lam_max = 4 * solve_thresholds().lambda_hat
    bad = [x for x in lambdas if not 0 < x <= lam_max + 1e-12]
    if bad:
        raise DomainError(f"sweep values must lie in (0, {lam_max:.6g}], got {bad}")
    result = lambda_sweep(obstacle, lambdas, _config(args), klass, workers=args.workers)
    _emit(result.to_dict(), args.report)
    if args.out:
        lines = ["lambda,verdict,E,min_gap"]
        for row in result.to_dict()["rows"]:
            gap = "" if row["min_gap"] is None else f"{row['min_gap']:.12g}"
            lines.append(f"{row['lambda']:.12g},{row['verdict']},{row['E']:.12g},{gap}")
        Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_INDETERMINATE if result.indeterminate else EXIT_OK


def cmd_scf_probe(args) -> int:
    height = _positive("height", parse_height(args.height))
    eps = parse_grid(args.eps) if args.eps else DEFAULT_EPS
    if any(not 0 < e <= 0.05 for e in eps):
        raise DomainError("perturbation sizes must lie in (0, 0.05]")
    result = scf_stability_probe(height, eps, N=args.N)
    spec, c = zoo.make_scf(height, args.N)
    data = result.to_dict()
    data["curvature_slope_at_tip"] = spec.curvature_slope_at_tip()
    data["files"] = _write_curve(c, args.out, args.svg, spec.obstacle())
    _emit(data, args.report)
    return EXIT_OK


def cmd_vi_check(args) -> int:
    height = _positive("height", parse_height(args.height))
    spec, c = zoo.make_scf(height, args.N)
    phi = midpoint_bump(args.N, args.width, args.kind)
    pairing = vi_pairing(c, 0.0, phi)
    slope = spec.curvature_slope_at_tip()
    obstacle = spec.obstacle()
    data = {
        "tip_height": height,
        "h_star": solve_thresholds().h_star,
        "vi_pairing": pairing,
        "predicted": -4.0 * slope * phi[args.N // 2],
        "curvature_slope_at_tip": slope,
        "vi_satisfied": pairing >= 0.0,
        "coincidence": constraint_slack(c, obstacle).to_dict(),
        "nonvertical_at_touch": bool(np.all(nonverticality_check(c, obstacle))),
    }
    _emit(data, args.report)
    return EXIT_OK


def cmd_drop_check(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    result = drop_minimality_check(_positive("lambda", args.lam), args.trials, N=args.N, seed=seed)
    _emit(result.to_dict(), args.report)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elastica", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("thresholds", help="print q_hat, q_star, lambda_hat, h_star as JSON")
    s.add_argument("--out", help="also write the JSON here")
    s.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("construct", help="export a closed-form curve")
    s.add_argument("--family", required=True, help="sarc, larc, loop, leaf, rect, segment or scf")
    s.add_argument("--lambda", dest="lam", type=float, default=0.0)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--reflected", action="store_true")
    s.add_argument("--height", default="h*", help="tip height for --family scf (number or multiple of h*)")
    s.add_argument("--N", type=int, default=512, help="segments in the exported polyline")
    s.add_argument("--out", help="CSV path (columns s,x,y,theta,k)")
    s.add_argument("--svg", help="SVG path; the CSV is written next to it when --out is absent")
    s.add_argument("--obstacle", help="obstacle overlay for the SVG")
    s.add_argument("--json", help="write the curve summary JSON here")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("energy-table", help="closed-form energies of the pinned elasticae")
    s.add_argument("--lambdas", default="0.2,0.5", help="comma list or a:step:b")
    s.add_argument("--max-n", type=int, default=4)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_energy_table)

    def solver_opts(s, N=256):
        s.add_argument("--obstacle", default="cone:0.3", help="cone:<height>[:<slope>] or JSON file")
        s.add_argument("--class", dest="klass", default="sym", choices=("sym", "rhomb", "full"))
        s.add_argument("--N", type=int, default=N)
        s.add_argument("--multistarts", type=int, default=None)
        s.add_argument("--seed", type=int, default=None, help="overrides ELASTICA_SEED")

    s = sub.add_parser("minimize", help="minimize E_lambda above an obstacle")
    solver_opts(s)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--report", help="full report JSON including the curve")
    s.add_argument("--out", help="CSV of the minimizer")
    s.add_argument("--svg", help="SVG of the minimizer with the obstacle")
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("sweep", help="verdicts over a lambda grid")
    solver_opts(s, N=128)
    s.add_argument("--lambdas", required=True, help="a:step:b or comma list")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--report")
    s.add_argument("--out", help="CSV summary")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("scf-probe", help="directional stability probe of the SCF")
    s.add_argument("--height", required=True, help="number or multiple of h*, e.g. 0.5h*")
    s.add_argument("--eps", help="perturbation sizes, comma list")
    s.add_argument("--N", type=int, default=512)
    s.add_argument("--report")
    s.add_argument("--out")
    s.add_argument("--svg")
    s.set_defaults(func=cmd_scf_probe)

    s = sub.add_parser("vi-check", help="variational-inequality pairing of the SCF with a midpoint bump")
    s.add_argument("--height", required=True)
    s.add_argument("--N", type=int, default=1024)
    s.add_argument("--width", type=float, default=0.25)
    s.add_argument("--kind", choices=("smooth", "hat"), default="smooth")
    s.add_argument("--report")
    s.set_defaults(func=cmd_vi_check)

    s = sub.add_parser("drop-check", help="random closed-curve descents against the figure-eight")
    s.add_argument("--lambda", dest="lam", type=float, default=1.0)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--N", type=int, default=128)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--report")
    s.set_defaults(func=cmd_drop_check)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        # every domain failure in the library derives from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
