import numpy as np
import pytest

from elastica_obstacle import elastica_zoo as zoo
from elastica_obstacle.geometry import SampledLipschitz, SymmetricCone, positions
from elastica_obstacle.moduli import solve_thresholds
from elastica_obstacle.solver import (
    ALProblem,
    CurveClass,
    SolverConfig,
    Verdict,
    drop_minimality_check,
    lambda_sweep,
    match_family,
    minimize,
    minimize_from,
    resample,
    scf_stability_probe,
    start_pool,
)

TH = solve_thresholds()
CONE = SymmetricCone(0.3)
HUMP = SampledLipschitz(
    nodes=((-0.5, -0.2), (0.2, -0.05), (0.35, 0.2), (0.5, 0.25), (0.65, 0.2), (0.8, -0.05), (1.5, -0.2)),
    lipschitz=2.0,
)


def fd_grad(f, z, step=1e-6):
    g = np.empty_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = step
        g[i] = (f(z + e) - f(z - e)) / (2 * step)
    return g


class TestConfig:
    def test_defaults(self):
        c = SolverConfig()
        assert (c.N, c.penalty_start, c.penalty_factor, c.rounds, c.max_inner, c.gtol) == (256, 1e2, 10.0, 6, 5000, 1e-8)

    @pytest.mark.parametrize("kw", [{"N": 7}, {"N": 101}, {"rounds": 2}, {"gtol": 0.0}, {"penalty_start": -1.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


class TestALProblem:
    @pytest.mark.parametrize(
        "klass,obstacle",
        [
            (CurveClass.Sym, CONE),
            (CurveClass.RhombSym, CONE),
            (CurveClass.Full, HUMP),
            (CurveClass.Drop, None),
        ],
    )
    def test_gradient_fd(self, klass, obstacle):
        rng = np.random.default_rng(5)
        prob = ALProblem(0.7, obstacle, klass, 32)
        n = prob.M if klass.symmetric else prob.N
        for _ in range(5):
            z = np.concatenate([rng.normal(0, 1, n), [rng.uniform(1.2, 3)]])
            nu_eq = rng.normal(size=prob.n_eq)
            nu_in = np.abs(rng.normal(size=prob.n_ineq))
            mu = 10.0
            _, g = prob.al_value_grad(z, mu, nu_eq, nu_in)
            fd = fd_grad(lambda zz: prob.al_value_grad(zz, mu, nu_eq, nu_in)[0], z)
            assert np.max(np.abs(g - fd)) <= 1e-5 * np.max(np.abs(fd))

    def test_symmetric_parametrization(self):
        prob = ALProblem(0.5, CONE, CurveClass.Sym, 16)
        z = np.concatenate([np.linspace(1.0, 0.2, 8), [1.5]])
        p = positions(prob.curve(z))
        np.testing.assert_allclose(p[::-1, 1], p[:, 1], atol=1e-14)

    def test_encode_round_trip(self):
        prob = ALProblem(0.5, CONE, CurveClass.Full, 32)
        c = zoo.export(zoo.make_pinned_elastica("larc", 0.5), 32)
        assert prob.curve(prob.encode(c)).angles.tolist() == c.angles.tolist()

    def test_obstacle_required(self):
        with pytest.raises(ValueError):
            ALProblem(0.5, None, CurveClass.Sym, 16)

    def test_resample(self):
        c = zoo.export(zoo.make_pinned_elastica("larc", 0.3), 64)
        r = resample(c, 256)
        assert r.N == 256 and r.total_length == c.total_length
        # angle interpolation costs O(h^2) in closure; the solver restores it
        assert np.linalg.norm(positions(r)[-1] - [1, 0]) < (c.total_length / c.N) ** 2


class TestMinimize:
    def test_touching_at_large_lambda(self):
        rep = minimize(CONE, 2.0, SolverConfig(N=128))
        assert rep.verdict is Verdict.Touching
        assert rep.residual <= 1e-5 * (1 + abs(rep.energy))
        assert rep.violation <= 1e-6
        assert rep.coincidence.touching and rep.coincidence.min_gap <= rep.coincidence.touch_tol

    def test_nontouching_small_lambda_matches_larc(self):
        lam = 0.05
        rep = minimize(CONE, lam, SolverConfig(N=128))
        assert rep.verdict is Verdict.Nontouching
        assert rep.coincidence.min_gap > rep.coincidence.touch_tol
        assert rep.matched_family["family"] == "larc" and rep.matched_family["n"] == 1
        assert rep.matched_family["distance"] <= 2e-2
        E_larc = zoo.closed_form_energy(zoo.make_pinned_elastica("larc", lam))[2]
        assert rep.energy == pytest.approx(E_larc, rel=1e-3)

    def test_descent_from_escaping_competitor(self):
        lam = 0.1
        start = zoo.escaping_competitor(CONE, lam, 128)
        res = minimize_from(start, lam, CONE, CurveClass.Sym, SolverConfig(N=128), "escaping")
        assert res.converged
        assert res.energies[2] <= res.initial_energy

    def test_deterministic(self):
        cfg = SolverConfig(N=64, multistarts=4)
        a = minimize(CONE, 1.2, cfg).to_dict()
        b = minimize(CONE, 1.2, cfg).to_dict()
        assert a == b

    def test_rhomb_matches_standard_when_nontouching(self):
        lam = 0.05
        cfg = SolverConfig(N=128)
        std = minimize(CONE, lam, cfg, CurveClass.Sym)
        rh = minimize(CONE, lam, cfg, CurveClass.RhombSym)
        assert rh.verdict is Verdict.Nontouching
        assert rh.energy == pytest.approx(std.energy, rel=1e-3)

    def test_full_class_hump(self):
        rep = minimize(HUMP, 1.2, SolverConfig(N=128, multistarts=3), CurveClass.Full)
        assert rep.verdict is Verdict.Touching
        np.testing.assert_allclose(positions(rep.curve)[-1], [1, 0], atol=1e-6)

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            minimize(CONE, 0.0)

    def test_start_pool(self):
        labels = [lab for lab, _ in start_pool(0.3, CONE, CurveClass.Sym, SolverConfig(N=64))]
        assert labels[:3] == ["segment", "semicircle", "larc(n=1)"]
        assert "escaping" in labels and "leaf-segment" in labels
        labels = [lab for lab, _ in start_pool(2.0, CONE, CurveClass.Sym, SolverConfig(N=64, multistarts=3))]
        assert labels == ["segment", "semicircle", "sarc(n=2)"]

    def test_match_family_exact(self):
        spec = zoo.make_pinned_elastica("sarc", 0.4, 1, reflected=True)
        m = match_family(zoo.export(spec, 256), 0.4)
        assert (m["family"], m["n"], m["reflected"]) == ("sarc", 1, True)
        assert m["distance"] < 1e-4

    @pytest.mark.slow
    def test_verdicts_stable_under_refinement(self):
        for lam, want in ((0.05, Verdict.Nontouching), (2.0, Verdict.Touching)):
            got = {minimize(CONE, lam, SolverConfig(N=N)).verdict for N in (128, 256, 512)}
            assert got == {want}


class TestSweep:
    def test_grid_validation(self):
        with pytest.raises(ValueError):
            lambda_sweep(CONE, [0.5, 3.0])
        with pytest.raises(ValueError):
            lambda_sweep(CONE, [0.0])

    def test_transition(self):
        res = lambda_sweep(CONE, [0.05, 0.8, 1.4], SolverConfig(N=64))
        assert [r.verdict for r in res.reports] == [Verdict.Nontouching, Verdict.Touching, Verdict.Touching]
        assert res.largest_nontouching == 0.05 and res.smallest_touching == 0.8 and res.monotone
        assert res.to_dict()["rows"][1]["verdict"] == "Touching"


class TestProbe:
    def test_below_critical(self):
        p = scf_stability_probe(TH.h_star / 2)
        assert p.verdict == "LocalMin-consistent"
        assert all(r["ray"] == "midpoint-bump" for r in p.rays)

    def test_critical_uses_segment_insertion(self):
        p = scf_stability_probe(TH.h_star)
        assert p.verdict == "Unstable"
        bumps = [r for r in p.rays if r["ray"] == "midpoint-bump"]
        assert all(r["delta_B"] > -p.noise_floor for r in bumps)
        assert any(r["delta_B"] < -p.noise_floor for r in p.rays if r["ray"].startswith("segment"))

    def test_above_critical(self):
        p = scf_stability_probe(2 * TH.h_star)
        assert p.verdict == "Unstable"
        assert min(r["delta_B"] for r in p.rays if r["eps"] <= 0.05) < -p.noise_floor


class TestDrop:
    def test_minimality(self):
        res = drop_minimality_check(1.0, trials=6, N=96, seed=1)
        assert res.passed
        assert min(res.energies) >= res.leaf_energy - res.tolerance

    def test_two_fold_leaf_descends_no_lower_than_one_fold(self):
        lam, N = 1.0, 128
        leaf1 = zoo.closed_form_energy(zoo.make_leaf(lam, 1))[2]
        start = zoo.export(zoo.make_leaf(lam, 2), N)
        cfg = SolverConfig(N=N)
        res = minimize_from(start, lam, None, CurveClass.Drop, cfg, "leaf2")
        assert res.energies[2] >= leaf1 * (1 - 1e-2)
        assert res.energies[2] <= res.initial_energy

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            drop_minimality_check(-1.0)
